#include "lpp/sqfree.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "lpp/errors.hpp"
#include "lpp/local_factors.hpp"
#include "lpp/parallel.hpp"

namespace lpp {

double weight_f(const PrimeTable& table, std::uint64_t n) {
    if (n + 1 > table.limit()) throw RangeError("weight_f: n + 1 beyond table limit");
    if (!table.is_squarefree(n)) return 0.0;
    return table.von_mangoldt(n + 1);
}

ShiftedLattice shifted_lattice(const AffineSystem& sys, const std::vector<std::uint64_t>& a) {
    if (a.size() != sys.t()) throw ArgumentError("shifted_lattice: tuple length mismatch");
    ShiftedLattice out;
    out.a = a;
    std::vector<mpz_class> moduli(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) throw ArgumentError("shifted_lattice: entries must be positive");
        moduli[i] = mpz_class(a[i]) * mpz_class(a[i]);
    }
    AffineLattice lat = kernel_lattice(sys.linear(), sys.constant(), moduli);
    out.feasible = lat.feasible;
    if (lat.feasible) {
        out.n0 = std::move(lat.origin);
        out.basis = std::move(lat.basis);
        out.covolume = std::move(lat.covolume);
    }
    return out;
}

AffineSystem derived_system(const AffineSystem& sys, const ShiftedLattice& lattice) {
    if (!lattice.feasible) throw ArgumentError("derived_system: lattice is infeasible");
    const std::size_t d = sys.d(), t = sys.t();
    // psi_i(n0 + B m) + 1: linear part L B^T, constants psi_i(n0) + 1
    IntMatrix linear(t, d);
    std::vector<mpz_class> constant(t);
    const std::vector<mpz_class> at_origin = sys.evaluate(lattice.n0);
    for (std::size_t i = 0; i < t; ++i) {
        const mpz_class ai2 = mpz_class(lattice.a[i]) * mpz_class(lattice.a[i]);
        if (at_origin[i] % ai2 != 0)
            throw std::logic_error("derived_system: origin value not divisible by a_i^2");
        constant[i] = at_origin[i] + 1;
        for (std::size_t j = 0; j < d; ++j) {
            mpz_class v = 0;
            for (std::size_t l = 0; l < d; ++l) v += sys.linear()(i, l) * lattice.basis(j, l);
            if (v % ai2 != 0)
                throw std::logic_error("derived_system: coefficient not divisible by a_i^2");
            linear(i, j) = v;
        }
    }
    return AffineSystem(std::move(linear), std::move(constant));
}

namespace {

std::vector<int> moebius_sieve(std::uint64_t limit) {
    std::vector<int> mu(limit + 1, 1);
    std::vector<bool> comp(limit + 1, false);
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (comp[p]) continue;
        for (std::uint64_t m = p; m <= limit; m += p) {
            if (m > p) comp[m] = true;
            mu[m] = -mu[m];
        }
        if (p <= limit / p)
            for (std::uint64_t m = p * p; m <= limit; m += p * p) mu[m] = 0;
    }
    if (limit >= 1) mu[1] = 1;
    return mu;
}

}  // namespace

CpsiResult c_psi_truncated(const AffineSystem& sys, std::uint64_t A_limit,
                           std::uint64_t P_limit, int workers, bool keep_terms) {
    if (A_limit < 1) throw ArgumentError("c_psi_truncated: A_limit must be positive");
    CpsiResult out;
    out.A_limit = A_limit;
    out.P_limit = P_limit;

    const std::vector<int> mu = moebius_sieve(A_limit);
    std::vector<std::uint64_t> primes;
    {
        std::vector<bool> comp(P_limit + 1, false);
        for (std::uint64_t p = 2; p <= P_limit; ++p) {
            if (comp[p]) continue;
            primes.push_back(p);
            for (std::uint64_t m = p * p; m <= P_limit; m += p) comp[m] = true;
        }
    }

    // all squarefree tuples, lexicographic
    const std::size_t t = sys.t();
    std::vector<std::vector<std::uint64_t>> tuples;
    std::vector<std::uint64_t> a(t, 1);
    for (;;) {
        bool sf = true;
        for (std::uint64_t ai : a)
            if (mu[ai] == 0) {
                sf = false;
                break;
            }
        if (sf) tuples.push_back(a);
        std::size_t j = t;
        while (j > 0 && a[j - 1] == A_limit) {
            a[j - 1] = 1;
            --j;
        }
        if (j == 0) break;
        ++a[j - 1];
    }
    out.tuples_scanned = tuples.size();

    struct Partial {
        long double sum = 0.0L;
        std::uint64_t feasible = 0;
        std::vector<double> blocks;
        std::vector<CpsiTerm> terms;
    };
    std::vector<Partial> parts(std::max(workers, 1));

    parallel_chunks(tuples.size(), workers, [&](int wid, std::size_t lo, std::size_t hi) {
        Partial& part = parts[wid];
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const auto& tup = tuples[idx];
            const ShiftedLattice lat = shifted_lattice(sys, tup);
            if (!lat.feasible) continue;
            ++part.feasible;
            const AffineSystem derived = derived_system(sys, lat);
            double beta_prod = 1.0;
            for (std::uint64_t p : primes) beta_prod *= beta_p(derived, p).get_d();
            const double alpha = 1.0 / mpq_class(lat.covolume).get_d();
            int sign = 1;
            std::uint64_t amax = 1;
            for (std::uint64_t ai : tup) {
                sign *= mu[ai];
                amax = std::max(amax, ai);
            }
            const double term = sign * alpha * beta_prod;
            part.sum += term;
            // block j holds max a_i in (2^j, 2^(j+1)], block 0 also takes a = 1
            const std::size_t block =
                amax <= 2 ? 0 : static_cast<std::size_t>(std::bit_width(amax - 1) - 1);
            if (part.blocks.size() <= block) part.blocks.resize(block + 1, 0.0);
            part.blocks[block] += std::fabs(term);
            if (keep_terms) part.terms.push_back({tup, alpha, beta_prod, term});
        }
    });

    long double total = 0.0L;
    for (const auto& part : parts) {
        total += part.sum;
        out.tuples_feasible += part.feasible;
        if (out.dyadic_block_abs.size() < part.blocks.size())
            out.dyadic_block_abs.resize(part.blocks.size(), 0.0);
        for (std::size_t b = 0; b < part.blocks.size(); ++b)
            out.dyadic_block_abs[b] += part.blocks[b];
        for (const auto& term : part.terms) out.terms.push_back(term);
    }
    out.value = static_cast<double>(total);
    if (!out.dyadic_block_abs.empty()) out.last_block_abs = out.dyadic_block_abs.back();
    if (keep_terms)
        std::sort(out.terms.begin(), out.terms.end(),
                  [](const CpsiTerm& x, const CpsiTerm& y) { return x.a < y.a; });
    return out;
}

MirskyResult mirsky_density(std::uint64_t P_limit) {
    if (P_limit < 2) throw ArgumentError("mirsky_density: P_limit must be at least 2");
    MirskyResult out;
    out.P_limit = P_limit;
    std::vector<bool> comp(P_limit + 1, false);
    long double prod = 1.0L;
    for (std::uint64_t p = 2; p <= P_limit; ++p) {
        if (comp[p]) continue;
        for (std::uint64_t m = p * p; m <= P_limit; m += p) comp[m] = true;
        prod *= 1.0L - 1.0L / (static_cast<long double>(p) * static_cast<long double>(p - 1));
    }
    out.value = static_cast<double>(prod);
    out.tail_bound = 1.0 / static_cast<double>(P_limit - 1);
    return out;
}

ComparisonReport sqfree_compare(const PrimeTable& table, const AffineSystem& sys,
                                const ConvexBody& body, std::uint64_t A_limit,
                                std::uint64_t P_limit, std::uint64_t resolution, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonReport rep;
    rep.system_digest = sys.digest();
    rep.mode = "sqfree";
    rep.P_limit = P_limit;
    rep.workers = workers;

    const EmpiricalResult emp =
        empirical_sum(table, sys, body, {{WeightKind::SqfreeShift, {}}}, workers);
    rep.empirical = emp.sum;
    rep.lattice_count = emp.lattice_count;
    rep.negative_skips = emp.negative_skips;

    const CpsiResult cpsi = c_psi_truncated(sys, A_limit, P_limit, workers);
    const VolumeEstimate vol = volume(body, resolution);
    rep.volume_value = vol.value;
    rep.volume_error = vol.error_bound;
    rep.predicted = cpsi.value * vol.value;
    rep.tail_bound_log = cpsi.last_block_abs;
    if (rep.predicted != 0.0) {
        rep.ratio = rep.empirical / rep.predicted;
        rep.ratio_defined = true;
    }
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

}  // namespace lpp
