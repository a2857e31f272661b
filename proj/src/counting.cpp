#include "lpp/counting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "lpp/errors.hpp"
#include "lpp/parallel.hpp"

namespace lpp {

namespace {

// Exact solve of a d x d rational system by Gaussian elimination.
// Returns false when singular.
bool solve_square(std::vector<std::vector<mpq_class>> m, std::vector<mpq_class> rhs,
                  std::vector<mpq_class>& x) {
    const std::size_t d = rhs.size();
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t piv = k;
        while (piv < d && m[piv][k] == 0) ++piv;
        if (piv == d) return false;
        std::swap(m[piv], m[k]);
        std::swap(rhs[piv], rhs[k]);
        for (std::size_t i = k + 1; i < d; ++i) {
            if (m[i][k] == 0) continue;
            const mpq_class f = m[i][k] / m[k][k];
            for (std::size_t j = k; j < d; ++j) m[i][j] -= f * m[k][j];
            rhs[i] -= f * rhs[k];
        }
    }
    x.assign(d, 0);
    for (std::size_t k = d; k-- > 0;) {
        mpq_class v = rhs[k];
        for (std::size_t j = k + 1; j < d; ++j) v -= m[k][j] * x[j];
        x[k] = v / m[k][k];
    }
    return true;
}

}  // namespace

std::uint64_t required_sieve_limit(const AffineSystem& sys, const ConvexBody& body,
                                   bool plus_one) {
    if (sys.d() != body.d()) throw ArgumentError("required_sieve_limit: dimension mismatch");
    const auto cs = body.all_constraints();
    const std::size_t d = body.d(), m = cs.size();
    mpq_class best = 0;
    bool any_vertex = false;

    std::vector<std::size_t> pick(d);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t got) {
        if (got == d) {
            std::vector<std::vector<mpq_class>> mat(d, std::vector<mpq_class>(d));
            std::vector<mpq_class> rhs(d);
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t j = 0; j < d; ++j) mat[r][j] = cs[pick[r]].normal[j];
                rhs[r] = cs[pick[r]].offset;
            }
            std::vector<mpq_class> x;
            if (!solve_square(std::move(mat), std::move(rhs), x)) return;
            if (!body.contains(x)) return;
            any_vertex = true;
            for (std::size_t i = 0; i < sys.t(); ++i) {
                mpq_class v = mpq_class(sys.constant()[i]);
                for (std::size_t j = 0; j < d; ++j)
                    v += mpq_class(sys.linear()(i, j)) * x[j];
                if (v < 0) v = -v;
                if (v > best) best = v;
            }
            return;
        }
        for (std::size_t i = from; i + (d - got) <= m; ++i) {
            pick[got] = i;
            rec(i + 1, got + 1);
        }
    };
    rec(0, 0);
    if (!any_vertex) return 0;  // empty body
    mpz_class ceil_best;
    mpz_cdiv_q(ceil_best.get_mpz_t(), best.get_num().get_mpz_t(), best.get_den().get_mpz_t());
    if (!ceil_best.fits_ulong_p()) throw ResourceError("required_sieve_limit: value too large");
    return ceil_best.get_ui() + (plus_one ? 1 : 0);
}

namespace {

std::vector<double> build_table(const PrimeTable& table, const WeightSpec& spec,
                                std::uint64_t limit) {
    std::vector<double> tab(limit + 1, 0.0);
    switch (spec.kind) {
        case WeightKind::VonMangoldt:
            for (std::uint64_t p : table.primes()) {
                if (p > limit) break;
                const double lp = std::log(static_cast<double>(p));
                for (std::uint64_t q = p; q <= limit; q *= p) {
                    tab[q] = lp;
                    if (q > limit / p) break;
                }
            }
            break;
        case WeightKind::PrimeLog:
            for (std::uint64_t p : table.primes()) {
                if (p > limit) break;
                tab[p] = std::log(static_cast<double>(p));
            }
            break;
        case WeightKind::SqfreeShift: {
            if (limit + 1 > table.limit())
                throw ResourceError("weight F needs the table to reach limit + 1");
            // mu^2 flags by striking p^2 multiples
            std::vector<bool> sqfree(limit + 1, true);
            for (std::uint64_t p : table.primes()) {
                if (p > limit / p) break;
                for (std::uint64_t q = p * p; q <= limit; q += p * p) sqfree[q] = false;
            }
            for (std::uint64_t n = 1; n <= limit; ++n)
                if (sqfree[n]) tab[n] = table.von_mangoldt(n + 1);
            break;
        }
        case WeightKind::One:
            for (std::uint64_t n = 0; n <= limit; ++n) tab[n] = 1.0;
            break;
        case WeightKind::Custom:
            if (!spec.custom) throw ArgumentError("custom weight without an evaluator");
            for (std::uint64_t n = 0; n <= limit; ++n) tab[n] = spec.custom(n);
            break;
    }
    return tab;
}

struct I64System {
    std::size_t d, t;
    std::vector<std::int64_t> linear;  // t x d
    std::vector<std::int64_t> constant;
};

I64System to_i64(const AffineSystem& sys) {
    I64System out{sys.d(), sys.t(), {}, {}};
    out.linear.resize(out.t * out.d);
    out.constant.resize(out.t);
    for (std::size_t i = 0; i < out.t; ++i) {
        for (std::size_t j = 0; j < out.d; ++j) {
            if (!sys.linear()(i, j).fits_slong_p())
                throw ResourceError("empirical_sum: coefficient exceeds int64");
            out.linear[i * out.d + j] = sys.linear()(i, j).get_si();
        }
        if (!sys.constant()[i].fits_slong_p())
            throw ResourceError("empirical_sum: constant exceeds int64");
        out.constant[i] = sys.constant()[i].get_si();
    }
    return out;
}

struct SumAccum {
    long double sum = 0.0L;
    std::uint64_t points = 0;
    std::uint64_t negative = 0;
};

// Walks the enumeration subtree below a fixed first coordinate range.
void sum_over_subtree(const detail::CompiledChain& chain, const I64System& sys,
                      const std::vector<const std::vector<double>*>& tabs, std::size_t level,
                      std::vector<std::int64_t>& prefix, SumAccum& acc) {
    const std::size_t d = sys.d;
    const detail::IntInterval iv = detail::chain_interval(chain, level, prefix);
    if (iv.empty) return;
    if (level < d) {
        prefix.push_back(iv.lo);
        for (std::int64_t x = iv.lo; x <= iv.hi; ++x) {
            prefix.back() = x;
            sum_over_subtree(chain, sys, tabs, level + 1, prefix, acc);
        }
        prefix.pop_back();
        return;
    }
    // innermost coordinate: evaluate forms as base + step * x
    const std::size_t t = sys.t;
    std::vector<std::int64_t> base(t), step(t);
    for (std::size_t i = 0; i < t; ++i) {
        std::int64_t b = sys.constant[i];
        for (std::size_t j = 0; j + 1 < d; ++j) b += sys.linear[i * d + j] * prefix[j];
        base[i] = b;
        step[i] = sys.linear[i * d + (d - 1)];
    }
    const std::uint64_t npts = static_cast<std::uint64_t>(iv.hi - iv.lo + 1);
    acc.points += npts;

    // forms that ignore the innermost variable are constant on the column
    long double column_factor = 1.0L;
    std::vector<std::size_t> varying;
    for (std::size_t i = 0; i < t; ++i) {
        if (step[i] != 0) {
            varying.push_back(i);
            continue;
        }
        if (base[i] < 0) {
            acc.negative += npts;
            return;
        }
        const double w = (*tabs[i])[static_cast<std::uint64_t>(base[i])];
        if (w == 0.0) return;
        column_factor *= w;
    }
    for (std::int64_t x = iv.lo; x <= iv.hi; ++x) {
        long double prod = column_factor;
        for (std::size_t i : varying) {
            const std::int64_t v = base[i] + step[i] * x;
            if (v < 0) {
                ++acc.negative;
                prod = 0.0L;
                break;
            }
            const double w = (*tabs[i])[static_cast<std::uint64_t>(v)];
            if (w == 0.0) {
                prod = 0.0L;
                break;
            }
            prod *= w;
        }
        acc.sum += prod;
    }
}

}  // namespace

EmpiricalResult empirical_sum(const PrimeTable& table, const AffineSystem& sys,
                              const ConvexBody& body, const std::vector<WeightSpec>& weights,
                              int workers) {
    if (weights.empty()) throw ArgumentError("empirical_sum: no weights given");
    if (weights.size() != 1 && weights.size() != sys.t())
        throw ArgumentError("empirical_sum: need one weight or one per form");
    std::vector<WeightSpec> per_form(weights);
    if (per_form.size() == 1) per_form.assign(sys.t(), weights[0]);

    EmpiricalResult res;
    bool plus_one = false;
    for (const auto& w : per_form)
        if (w.kind == WeightKind::SqfreeShift) plus_one = true;
    res.required_limit = required_sieve_limit(sys, body, plus_one);
    if (res.required_limit > table.limit())
        throw ResourceError("empirical_sum: sieve limit " + std::to_string(table.limit()) +
                            " too small, need " + std::to_string(res.required_limit));

    // share tables across forms with the same built-in weight
    std::vector<std::vector<double>> storage;
    std::vector<const std::vector<double>*> tabs(sys.t(), nullptr);
    std::vector<std::pair<WeightKind, std::size_t>> built;
    const std::uint64_t tab_limit =
        plus_one && res.required_limit > 0 ? res.required_limit - 1 : res.required_limit;
    storage.reserve(sys.t());
    for (std::size_t i = 0; i < sys.t(); ++i) {
        const WeightSpec& spec = per_form[i];
        std::size_t idx = storage.size();
        if (spec.kind != WeightKind::Custom) {
            auto it = std::find_if(built.begin(), built.end(),
                                   [&](const auto& b) { return b.first == spec.kind; });
            if (it != built.end()) {
                tabs[i] = &storage[it->second];
                continue;
            }
            built.emplace_back(spec.kind, idx);
        }
        storage.push_back(build_table(table, spec, tab_limit));
        tabs[i] = &storage[idx];
    }
    for (std::size_t i = 0; i < sys.t(); ++i)
        if (tabs[i] == nullptr) throw std::logic_error("empirical_sum: missing weight table");

    const auto chain = detail::compile_chain(body);
    const I64System isys = to_i64(sys);

    const detail::IntInterval top = detail::chain_interval(chain, 1, {});
    if (top.empty) return res;
    const std::uint64_t span = static_cast<std::uint64_t>(top.hi - top.lo + 1);

    std::vector<SumAccum> parts(std::max(workers, 1));
    parallel_chunks(span, workers, [&](int wid, std::size_t lo, std::size_t hi) {
        SumAccum& acc = parts[wid];
        std::vector<std::int64_t> prefix;
        prefix.reserve(body.d());
        for (std::size_t off = lo; off < hi; ++off) {
            const std::int64_t x = top.lo + static_cast<std::int64_t>(off);
            if (body.d() == 1) {
                // level 1 is already innermost; evaluate directly
                long double prod = 1.0L;
                for (std::size_t i = 0; i < isys.t; ++i) {
                    const std::int64_t v = isys.constant[i] + isys.linear[i] * x;
                    if (v < 0) {
                        ++acc.negative;
                        prod = 0.0L;
                        break;
                    }
                    const double w = (*tabs[i])[static_cast<std::uint64_t>(v)];
                    if (w == 0.0) {
                        prod = 0.0L;
                        break;
                    }
                    prod *= w;
                }
                acc.sum += prod;
                ++acc.points;
            } else {
                prefix.assign(1, x);
                sum_over_subtree(chain, isys, tabs, 2, prefix, acc);
            }
        }
    });

    long double total = 0.0L;
    for (const auto& p : parts) {
        total += p.sum;
        res.lattice_count += p.points;
        res.negative_skips += p.negative;
    }
    res.sum = static_cast<double>(total);
    return res;
}

Prediction predicted(const AffineSystem& sys, const ConvexBody& body, std::uint64_t P_limit,
                     PredictionMode mode, std::uint64_t resolution, int workers) {
    Prediction out;
    out.P_limit = P_limit;
    const LocalFactorReport series = singular_series(sys, P_limit, workers);
    out.series_value = series.value();
    out.tail_bound_log = series.tail_bound_log;
    const VolumeEstimate vol = mode == PredictionMode::Volume
                                   ? volume(body, resolution)
                                   : beta_infinity(body, sys, resolution);
    out.volume_value = vol.value;
    out.volume_error = vol.error_bound;
    out.value = vol.value * out.series_value;
    return out;
}

ComparisonReport compare(const PrimeTable& table, const AffineSystem& sys,
                         const ConvexBody& body, std::uint64_t P_limit, PredictionMode mode,
                         const std::vector<WeightSpec>& weights, std::uint64_t resolution,
                         int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonReport rep;
    rep.system_digest = sys.digest();
    rep.mode = mode == PredictionMode::Volume ? "volume" : "beta_infinity";
    rep.P_limit = P_limit;
    rep.workers = workers;

    const EmpiricalResult emp = empirical_sum(table, sys, body, weights, workers);
    rep.empirical = emp.sum;
    rep.lattice_count = emp.lattice_count;
    rep.negative_skips = emp.negative_skips;

    const Prediction pred = predicted(sys, body, P_limit, mode, resolution, workers);
    rep.predicted = pred.value;
    rep.tail_bound_log = pred.tail_bound_log;
    rep.volume_value = pred.volume_value;
    rep.volume_error = pred.volume_error;
    if (pred.value != 0.0) {
        rep.ratio = emp.sum / pred.value;
        rep.ratio_defined = true;
    }
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

WTrickCheckReport wtrick_identity_check(const PrimeTable& table, const AffineSystem& sys,
                                        std::uint64_t w, std::uint64_t M, int workers) {
    WTrickCheckReport rep;
    rep.w = w;
    rep.M = M;

    const WTrickDecomposition dec = wtrick(sys, w);
    rep.W_tilde = dec.W_tilde;
    if (!dec.W_tilde.fits_slong_p())
        throw ResourceError("wtrick_identity_check: W~ too large");
    const std::int64_t wt = dec.W_tilde.get_si();
    const std::size_t d = sys.d(), t = sys.t();

    // box [1, M]^d
    std::vector<Halfspace> hs;
    for (std::size_t j = 0; j < d; ++j) {
        Halfspace lo{std::vector<mpq_class>(d, 0), mpq_class(-1)};
        lo.normal[j] = -1;
        Halfspace up{std::vector<mpq_class>(d, 0), mpq_class(static_cast<long>(M))};
        up.normal[j] = 1;
        hs.push_back(std::move(lo));
        hs.push_back(std::move(up));
    }
    const ConvexBody box(d, static_cast<long long>(M), std::move(hs));

    const std::uint64_t limit = required_sieve_limit(sys, box, false);
    if (limit > table.limit())
        throw ResourceError("wtrick_identity_check: need sieve limit " + std::to_string(limit));
    std::vector<double> tab = build_table(table, {WeightKind::PrimeLog, {}}, limit);

    const EmpiricalResult lhs =
        empirical_sum(table, sys, box, {{WeightKind::PrimeLog, {}}}, workers);
    rep.lhs = lhs.sum;

    const I64System isys = to_i64(sys);
    auto eval_form = [&](std::size_t i, const std::vector<std::int64_t>& n) {
        std::int64_t v = isys.constant[i];
        for (std::size_t j = 0; j < d; ++j) v += isys.linear[i * d + j] * n[j];
        return v;
    };

    // every residue class a in [1, W~]^d
    long double total = 0.0L, coprime_mass = 0.0L, dropped = 0.0L;
    std::uint64_t coprime_classes = 0;
    std::vector<std::int64_t> a(d, 1), n(d), m(d);
    for (;;) {
        ++rep.classes;
        bool coprime = true;
        for (std::size_t i = 0; i < t && coprime; ++i) {
            std::int64_t va = eval_form(i, a) % wt;
            if (va < 0) va += wt;
            if (std::gcd(va, wt) != 1) coprime = false;
        }
        // class sum over the m grid with n = W~ m + a in [1, M]^d
        long double class_sum = 0.0L;
        std::vector<std::int64_t> mmax(d);
        bool nonempty = true;
        for (std::size_t j = 0; j < d; ++j) {
            mmax[j] = (static_cast<std::int64_t>(M) - a[j]) / wt;
            if (a[j] > static_cast<std::int64_t>(M)) nonempty = false;
        }
        if (nonempty) {
            std::fill(m.begin(), m.end(), 0);
            for (;;) {
                for (std::size_t j = 0; j < d; ++j) n[j] = wt * m[j] + a[j];
                long double prod = 1.0L;
                for (std::size_t i = 0; i < t; ++i) {
                    const std::int64_t v = eval_form(i, n);
                    const double wv = (v >= 0 && v <= static_cast<std::int64_t>(limit))
                                          ? tab[static_cast<std::uint64_t>(v)]
                                          : 0.0;
                    if (wv == 0.0) {
                        prod = 0.0L;
                        break;
                    }
                    prod *= wv;
                }
                class_sum += prod;
                std::size_t j = 0;
                while (j < d && m[j] == mmax[j]) {
                    m[j] = 0;
                    ++j;
                }
                if (j == d) break;
                ++m[j];
            }
        }
        total += class_sum;
        if (coprime) {
            ++coprime_classes;
            coprime_mass += class_sum;
        } else {
            dropped += class_sum;
        }

        std::size_t j = 0;
        while (j < d && a[j] == wt) {
            a[j] = 1;
            ++j;
        }
        if (j == d) break;
        ++a[j];
    }
    rep.partition_total = static_cast<double>(total);
    rep.coprime_mass = static_cast<double>(coprime_mass);
    rep.dropped_mass = static_cast<double>(dropped);
    rep.coprime_classes = coprime_classes;

    // independent account of the dropped terms: a nonzero product lands in a
    // non-coprime class exactly when some psi_i(n) is a prime dividing W~
    long double expected = 0.0L;
    {
        std::vector<std::int64_t> point(d, 1);
        for (;;) {
            long double prod = 1.0L;
            bool small_prime = false;
            for (std::size_t i = 0; i < t; ++i) {
                const std::int64_t v = eval_form(i, point);
                const double wv = (v >= 0 && v <= static_cast<std::int64_t>(limit))
                                      ? tab[static_cast<std::uint64_t>(v)]
                                      : 0.0;
                if (wv == 0.0) {
                    prod = 0.0L;
                    break;
                }
                prod *= wv;
                if (v <= wt && wt % v == 0) small_prime = true;  // v is prime here
            }
            if (prod != 0.0L && small_prime) expected += prod;
            std::size_t j = 0;
            while (j < d && point[j] == static_cast<std::int64_t>(M)) {
                point[j] = 1;
                ++j;
            }
            if (j == d) break;
            ++point[j];
        }
    }
    rep.dropped_expected = static_cast<double>(expected);

    rep.coprime_classes = coprime_classes;
    if (coprime_classes != dec.residues.size())
        throw std::logic_error("wtrick_identity_check: residue enumeration mismatch");

    // the defining identity of the decomposition, checked symbolically
    rep.reduced_identity_ok = true;
    for (const auto& res : dec.residues) {
        if (!(res.reduced.linear() == sys.linear())) {
            rep.reduced_identity_ok = false;
            break;
        }
        std::vector<mpz_class> pa(d);
        for (std::size_t j = 0; j < d; ++j) pa[j] = static_cast<long>(res.a[j]);
        const auto values = sys.evaluate(pa);
        for (std::size_t i = 0; i < t; ++i) {
            if (dec.W_tilde * res.reduced.constant()[i] + res.b[i] != values[i]) {
                rep.reduced_identity_ok = false;
                break;
            }
        }
        if (!rep.reduced_identity_ok) break;
    }

    const double scale = 1.0 + std::fabs(rep.lhs);
    rep.partition_exact = std::fabs(rep.lhs - rep.partition_total) <= 1e-9 * scale;
    rep.dropped_matches = std::fabs(rep.dropped_mass - rep.dropped_expected) <= 1e-9 * scale;
    return rep;
}

CrtCheckReport crt_local_product_check(const AffineSystem& sys, std::uint64_t W_tilde,
                                       std::uint64_t budget) {
    CrtCheckReport rep;
    rep.W_tilde = W_tilde;
    if (W_tilde == 0) throw ArgumentError("crt_local_product_check: W~ must be positive");
    const std::size_t d = sys.d(), t = sys.t();
    double tuples = std::pow(static_cast<double>(W_tilde), static_cast<double>(d));
    if (tuples > static_cast<double>(budget))
        throw ResourceError("crt_local_product_check: W~^d exceeds budget");

    const auto wt = static_cast<std::int64_t>(W_tilde);
    // reduce coefficients mod W~ so form values stay in int64
    std::vector<std::int64_t> lin(t * d), cst(t);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            mpz_class r = sys.linear()(i, j) % wt;
            std::int64_t x = static_cast<std::int64_t>(r.get_si());
            lin[i * d + j] = x < 0 ? x + wt : x;
        }
        mpz_class r = sys.constant()[i] % wt;
        std::int64_t x = static_cast<std::int64_t>(r.get_si());
        cst[i] = x < 0 ? x + wt : x;
    }

    std::uint64_t good = 0;
    std::vector<std::int64_t> a(d, 1);
    for (;;) {
        bool all = true;
        for (std::size_t i = 0; i < t && all; ++i) {
            std::int64_t v = cst[i];
            for (std::size_t j = 0; j < d; ++j) v = (v + lin[i * d + j] * (a[j] % wt)) % wt;
            if (std::gcd(v, wt) != 1) all = false;
        }
        if (all) ++good;
        std::size_t j = 0;
        while (j < d && a[j] == wt) {
            a[j] = 1;
            ++j;
        }
        if (j == d) break;
        ++a[j];
    }

    mpz_class wtt, phit, wtd;
    mpz_ui_pow_ui(wtt.get_mpz_t(), W_tilde, t);
    mpz_ui_pow_ui(phit.get_mpz_t(), euler_phi_u64(W_tilde), t);
    mpz_ui_pow_ui(wtd.get_mpz_t(), W_tilde, d);
    rep.lhs = mpq_class(wtt * good, phit * wtd);
    rep.lhs.canonicalize();

    rep.rhs = 1;
    for (const auto& pp : factor_u64(W_tilde)) rep.rhs *= beta_p(sys, pp.p);
    rep.equal = rep.lhs == rep.rhs;
    return rep;
}

namespace {

ConvexBody square_box(std::size_t d, std::uint64_t N) {
    std::vector<Halfspace> hs;
    for (std::size_t j = 0; j < d; ++j) {
        Halfspace lo{std::vector<mpq_class>(d, 0), mpq_class(-1)};
        lo.normal[j] = -1;
        Halfspace up{std::vector<mpq_class>(d, 0), mpq_class(static_cast<long>(N))};
        up.normal[j] = 1;
        hs.push_back(std::move(lo));
        hs.push_back(std::move(up));
    }
    return ConvexBody(d, static_cast<long long>(N), std::move(hs));
}

}  // namespace

ExampleReport example_ap_positions(const PrimeTable& table, int k, std::uint64_t N,
                                   std::uint64_t P_limit, std::uint64_t resolution,
                                   int workers) {
    if (k < 1) throw ArgumentError("example_ap_positions: k must be positive");
    ExampleReport out;
    const double logN = std::log(static_cast<double>(N));
    for (int i = 1; i <= k; ++i)
        out.q.push_back(static_cast<long long>(std::floor(std::pow(logN, i))));

    IntMatrix linear(static_cast<std::size_t>(k), 2);
    std::vector<mpz_class> constant(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
        linear(i, 0) = 1;
        linear(i, 1) = static_cast<long>(out.q[i]);
    }
    const AffineSystem sys(std::move(linear), std::move(constant));
    const ConvexBody body = square_box(2, N);

    const auto t0 = std::chrono::steady_clock::now();
    const EmpiricalResult emp =
        empirical_sum(table, sys, body, {{WeightKind::PrimeLog, {}}}, workers);

    // closed-form singular series, cross-validated against beta_p on small p
    double series = 1.0;
    {
        std::vector<bool> comp(P_limit + 1, false);
        for (std::uint64_t p = 2; p <= P_limit; ++p) {
            if (comp[p]) continue;
            for (std::uint64_t m2 = p * p; m2 <= P_limit; m2 += p) comp[m2] = true;
            const mpq_class cf = beta_p_example1(out.q, p);
            if (p <= 101 && cf != beta_p(sys, p)) out.closed_form_mismatches.push_back(p);
            series *= cf.get_d();
        }
    }
    const VolumeEstimate vol = volume(body, resolution);

    ComparisonReport& rep = out.comparison;
    rep.system_digest = sys.digest();
    rep.mode = "volume";
    rep.P_limit = P_limit;
    rep.workers = workers;
    rep.empirical = emp.sum;
    rep.lattice_count = emp.lattice_count;
    rep.negative_skips = emp.negative_skips;
    rep.volume_value = vol.value;
    rep.volume_error = vol.error_bound;
    rep.tail_bound_log = std::pow(4.0, static_cast<double>(sys.t())) /
                         static_cast<double>(P_limit - 1);
    rep.predicted = vol.value * series;
    if (rep.predicted != 0.0) {
        rep.ratio = rep.empirical / rep.predicted;
        rep.ratio_defined = true;
    }
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

ExampleReport example_prime_step(const PrimeTable& table, int k, std::uint64_t q,
                                 std::uint64_t N, std::uint64_t P_limit,
                                 std::uint64_t resolution, int workers) {
    if (k < 1) throw ArgumentError("example_prime_step: k must be positive");
    if (mpz_class(q) % primorial(static_cast<std::uint64_t>(k)) != 0)
        throw ArgumentError("example_prime_step: q must be divisible by prod_{p<=k} p");
    ExampleReport out;
    out.q = {static_cast<long long>(q)};

    // forms (d, n, n+qd, ..., n+(k-1)qd) in variables (n, d)
    IntMatrix linear(static_cast<std::size_t>(k) + 1, 2);
    std::vector<mpz_class> constant(static_cast<std::size_t>(k) + 1, 0);
    linear(0, 0) = 0;
    linear(0, 1) = 1;
    for (int i = 1; i <= k; ++i) {
        linear(i, 0) = 1;
        linear(i, 1) = static_cast<long>(static_cast<std::int64_t>(i - 1) *
                                         static_cast<std::int64_t>(q));
    }
    const AffineSystem sys(std::move(linear), std::move(constant));

    // {n >= 1, d >= 1, n + (k-1) q d <= N}
    std::vector<Halfspace> hs;
    {
        Halfspace n_lo{{mpq_class(-1), mpq_class(0)}, mpq_class(-1)};
        Halfspace d_lo{{mpq_class(0), mpq_class(-1)}, mpq_class(-1)};
        Halfspace cap{{mpq_class(1), mpq_class(static_cast<long>((k - 1) * q))},
                      mpq_class(static_cast<long>(N))};
        hs = {n_lo, d_lo, cap};
    }
    const ConvexBody body(2, static_cast<long long>(N), std::move(hs));

    const auto t0 = std::chrono::steady_clock::now();
    const EmpiricalResult emp =
        empirical_sum(table, sys, body, {{WeightKind::PrimeLog, {}}}, workers);

    double series = 1.0;
    {
        std::vector<bool> comp(P_limit + 1, false);
        for (std::uint64_t p = 2; p <= P_limit; ++p) {
            if (comp[p]) continue;
            for (std::uint64_t m2 = p * p; m2 <= P_limit; m2 += p) comp[m2] = true;
            const mpq_class cf = beta_p_example2(k, q, p);
            if (p <= 101 && cf != beta_p(sys, p)) out.closed_form_mismatches.push_back(p);
            series *= cf.get_d();
        }
    }
    const VolumeEstimate vol = volume(body, resolution);

    ComparisonReport& rep = out.comparison;
    rep.system_digest = sys.digest();
    rep.mode = "volume";
    rep.P_limit = P_limit;
    rep.workers = workers;
    rep.empirical = emp.sum;
    rep.lattice_count = emp.lattice_count;
    rep.negative_skips = emp.negative_skips;
    rep.volume_value = vol.value;
    rep.volume_error = vol.error_bound;
    rep.tail_bound_log = std::pow(4.0, static_cast<double>(sys.t())) /
                         static_cast<double>(P_limit - 1);
    rep.predicted = vol.value * series;
    if (rep.predicted != 0.0) {
        rep.ratio = rep.empirical / rep.predicted;
        rep.ratio_defined = true;
    }
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

}  // namespace lpp
