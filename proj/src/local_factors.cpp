#include "lpp/local_factors.hpp"

#include <algorithm>
#include <cmath>

#include "lpp/arithmetic.hpp"
#include "lpp/errors.hpp"
#include "lpp/parallel.hpp"

namespace lpp {

namespace {

constexpr std::uint64_t kMaxPrime31 = (std::uint64_t{1} << 31) - 1;

struct ModSystem {
    std::size_t d, t;
    std::vector<std::int64_t> linear;  // t x d, reduced into [0, p)
    std::vector<std::int64_t> constant;
};

ModSystem reduce_mod_p(const AffineSystem& sys, std::int64_t p) {
    ModSystem m{sys.d(), sys.t(), {}, {}};
    m.linear.resize(m.t * m.d);
    m.constant.resize(m.t);
    for (std::size_t i = 0; i < m.t; ++i) {
        for (std::size_t j = 0; j < m.d; ++j) {
            mpz_class r = sys.linear()(i, j) % static_cast<long>(p);
            std::int64_t x = r.get_si();
            m.linear[i * m.d + j] = x < 0 ? x + p : x;
        }
        mpz_class r = sys.constant()[i] % static_cast<long>(p);
        std::int64_t x = r.get_si();
        m.constant[i] = x < 0 ? x + p : x;
    }
    return m;
}

int echelon_rank(std::vector<std::int64_t>& m, std::size_t rows, std::size_t cols,
                 std::int64_t p) {
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols && r < rows; ++j) {
        std::size_t piv = r;
        while (piv < rows && m[piv * cols + j] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t c = 0; c < cols; ++c)
                std::swap(m[piv * cols + c], m[r * cols + c]);
        const std::int64_t a = m[r * cols + j];
        for (std::size_t i = r + 1; i < rows; ++i) {
            const std::int64_t b = m[i * cols + j];
            if (b == 0) continue;
            for (std::size_t c = j; c < cols; ++c) {
                const std::int64_t v = (a * m[i * cols + c] - b * m[r * cols + c]) % p;
                m[i * cols + c] = v < 0 ? v + p : v;
            }
        }
        ++r;
    }
    return static_cast<int>(r);
}

}  // namespace

mpq_class beta_p(const AffineSystem& sys, std::uint64_t p) {
    if (p > kMaxPrime31) throw ArgumentError("beta_p: prime exceeds the 31-bit fast path");
    if (!is_prime_u64(p)) throw ArgumentError("beta_p: p is not prime");
    if (sys.t() > 20) throw ResourceError("beta_p: 2^t subsets exceed the budget");
    const auto sp = static_cast<std::int64_t>(p);
    const ModSystem m = reduce_mod_p(sys, sp);
    const std::size_t d = m.d, t = m.t;

    // sum over subsets S of (-1)^|S| #{a : psi_i(a) = 0 mod p for i in S}
    mpz_class signed_sum = 0;
    std::vector<std::int64_t> plain, aug;
    for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
        const int bits = __builtin_popcount(mask);
        plain.clear();
        aug.clear();
        for (std::size_t i = 0; i < t; ++i) {
            if (!(mask >> i & 1)) continue;
            for (std::size_t j = 0; j < d; ++j) {
                plain.push_back(m.linear[i * d + j]);
                aug.push_back(m.linear[i * d + j]);
            }
            aug.push_back((p - m.constant[i]) % sp);
        }
        const std::size_t rows = static_cast<std::size_t>(bits);
        std::vector<std::int64_t> plain2 = plain;
        const int r = echelon_rank(plain2, rows, d, sp);
        const int r_aug = echelon_rank(aug, rows, d + 1, sp);
        mpz_class count = 0;
        if (r_aug == r) mpz_ui_pow_ui(count.get_mpz_t(), p, d - static_cast<std::size_t>(r));
        signed_sum += (bits % 2 == 0) ? count : -count;
    }

    mpz_class pt, pm1t, pd;
    mpz_ui_pow_ui(pt.get_mpz_t(), p, t);
    mpz_ui_pow_ui(pm1t.get_mpz_t(), p - 1, t);
    mpz_ui_pow_ui(pd.get_mpz_t(), p, d);
    mpq_class beta(pt * signed_sum, pm1t * pd);
    beta.canonicalize();
    return beta;
}

mpq_class beta_p_bruteforce(const AffineSystem& sys, std::uint64_t p, std::uint64_t budget) {
    if (p > kMaxPrime31) throw ArgumentError("beta_p_bruteforce: prime too large");
    if (!is_prime_u64(p)) throw ArgumentError("beta_p_bruteforce: p is not prime");
    const std::size_t d = sys.d(), t = sys.t();
    double tuples = std::pow(static_cast<double>(p), static_cast<double>(d));
    if (tuples > static_cast<double>(budget))
        throw ResourceError("beta_p_bruteforce: p^d exceeds budget");
    const auto sp = static_cast<std::int64_t>(p);
    const ModSystem m = reduce_mod_p(sys, sp);

    std::uint64_t good = 0;
    std::vector<std::int64_t> a(d, 0);
    for (;;) {
        bool all_nonzero = true;
        for (std::size_t i = 0; i < t && all_nonzero; ++i) {
            std::int64_t v = m.constant[i];
            for (std::size_t j = 0; j < d; ++j) v += m.linear[i * d + j] * a[j];
            if (v % sp == 0) all_nonzero = false;
        }
        if (all_nonzero) ++good;
        std::size_t j = 0;
        while (j < d && a[j] == sp - 1) {
            a[j] = 0;
            ++j;
        }
        if (j == d) break;
        ++a[j];
    }

    mpz_class pt, pm1t, pd;
    mpz_ui_pow_ui(pt.get_mpz_t(), p, t);
    mpz_ui_pow_ui(pm1t.get_mpz_t(), p - 1, t);
    mpz_ui_pow_ui(pd.get_mpz_t(), p, d);
    mpq_class beta(pt * good, pm1t * pd);
    beta.canonicalize();
    return beta;
}

mpq_class beta_p_example1(const std::vector<long long>& q, std::uint64_t p) {
    if (q.empty()) throw ArgumentError("beta_p_example1: empty shift tuple");
    if (!is_prime_u64(p)) throw ArgumentError("beta_p_example1: p is not prime");
    const auto k = q.size();
    std::vector<std::int64_t> classes;
    for (long long qi : q) {
        std::int64_t r = static_cast<std::int64_t>(qi % static_cast<long long>(p));
        if (r < 0) r += p;
        classes.push_back(r);
    }
    std::sort(classes.begin(), classes.end());
    const auto h = static_cast<std::uint64_t>(
        std::unique(classes.begin(), classes.end()) - classes.begin());

    mpz_class pk, pm1k;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
    mpz_ui_pow_ui(pm1k.get_mpz_t(), p - 1, k);
    mpq_class beta(pk * (p - 1) * (1 + p - h), pm1k * p * p);
    beta.canonicalize();
    return beta;
}

mpq_class beta_p_example2(int k, std::uint64_t q, std::uint64_t p) {
    if (k < 1) throw ArgumentError("beta_p_example2: k must be positive");
    if (!is_prime_u64(p)) throw ArgumentError("beta_p_example2: p is not prime");
    const mpz_class pk = primorial(static_cast<std::uint64_t>(k));
    if (mpz_class(q) % pk != 0)
        throw ArgumentError("beta_p_example2: q must be divisible by the primorial of k");
    mpz_class pk1, pm1k1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), p, static_cast<unsigned long>(k) + 1);
    mpz_ui_pow_ui(pm1k1.get_mpz_t(), p - 1, static_cast<unsigned long>(k) + 1);
    mpz_class num;
    if (q % p == 0)
        num = mpz_class(p - 1) * (p - 1);
    else
        num = mpz_class(p - 1) * (p - static_cast<unsigned long>(k));
    mpq_class beta(pk1 * num, pm1k1 * p * p);
    beta.canonicalize();
    return beta;
}

LocalFactorReport singular_series(const AffineSystem& sys, std::uint64_t P_limit,
                                  int workers) {
    if (P_limit < 2) throw ArgumentError("singular_series: P_limit must be at least 2");
    LocalFactorReport rep;
    rep.system_digest = sys.digest();
    rep.P_limit = P_limit;
    rep.exceptional = exceptional_primes(sys);
    if (!rep.exceptional.empty() && rep.exceptional.back() > P_limit)
        throw ArgumentError("singular_series: P_limit below the largest exceptional prime " +
                            std::to_string(rep.exceptional.back()));

    // Admissibility: beta_p != 0 only needs checking up to a finite bound.
    std::uint64_t bound = sys.t() + 1;
    if (!rep.exceptional.empty()) bound = std::max(bound, rep.exceptional.back());
    for (std::uint64_t p = 2; p <= bound; ++p) {
        if (!is_prime_u64(p)) continue;
        if (beta_p(sys, p) == 0)
            throw ArgumentError("singular_series: system not admissible, beta_" +
                                std::to_string(p) + " = 0");
    }

    std::vector<std::uint64_t> primes;
    {
        std::vector<bool> composite(P_limit + 1, false);
        for (std::uint64_t p = 2; p <= P_limit; ++p) {
            if (composite[p]) continue;
            primes.push_back(p);
            for (std::uint64_t m = p * p; m <= P_limit; m += p) composite[m] = true;
        }
    }

    struct Partial {
        std::vector<std::pair<std::uint64_t, mpq_class>> factors;
        mpz_class num = 1, den = 1;
    };
    std::vector<Partial> parts(std::max(workers, 1));
    parallel_chunks(primes.size(), workers, [&](int wid, std::size_t lo, std::size_t hi) {
        Partial& part = parts[wid];
        for (std::size_t i = lo; i < hi; ++i) {
            mpq_class b = beta_p(sys, primes[i]);
            part.num *= b.get_num();
            part.den *= b.get_den();
            part.factors.emplace_back(primes[i], std::move(b));
        }
    });

    mpz_class num = 1, den = 1;
    for (auto& part : parts) {
        num *= part.num;
        den *= part.den;
        for (auto& [p, b] : part.factors) rep.factors.emplace(p, std::move(b));
    }
    rep.truncated_product = mpq_class(num, den);
    rep.truncated_product.canonicalize();
    rep.tail_bound_log =
        std::pow(4.0, static_cast<double>(sys.t())) / static_cast<double>(P_limit - 1);
    return rep;
}

mpq_class alpha_density(const AffineSystem& sys, const std::vector<mpz_class>& k) {
    if (k.size() != sys.t()) throw ArgumentError("alpha_density: modulus tuple length mismatch");
    std::vector<std::uint64_t> ku(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < 1) throw ArgumentError("alpha_density: moduli must be positive");
        if (!k[i].fits_ulong_p()) throw ResourceError("alpha_density: modulus too large");
        ku[i] = k[i].get_ui();
    }
    // distinct primes across all moduli
    std::vector<std::uint64_t> primes;
    for (std::uint64_t v : ku)
        for (const auto& pp : factor_u64(v)) primes.push_back(pp.p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    mpq_class alpha = 1;
    for (std::uint64_t p : primes) {
        unsigned long emax = 0;
        std::vector<mpz_class> moduli(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) {
            unsigned long e = 0;
            std::uint64_t v = ku[i];
            while (v % p == 0) {
                v /= p;
                ++e;
            }
            emax = std::max(emax, e);
            mpz_ui_pow_ui(moduli[i].get_mpz_t(), p, e);
        }
        mpz_class pe, ped;
        mpz_ui_pow_ui(pe.get_mpz_t(), p, emax);
        const mpz_class count =
            congruence_solution_count(sys.linear(), sys.constant(), moduli, pe);
        mpz_pow_ui(ped.get_mpz_t(), pe.get_mpz_t(), static_cast<unsigned long>(sys.d()));
        mpq_class local(count, ped);
        local.canonicalize();
        alpha *= local;
    }
    return alpha;
}

}  // namespace lpp
