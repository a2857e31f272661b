#include "lpp/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpp/counting.hpp"
#include "lpp/errors.hpp"

namespace lpp {

Cutoff cosine_squared_cutoff() {
    Cutoff c;
    c.eval = [](double x) {
        if (std::fabs(x) >= 1.0) return 0.0;
        const double v = std::cos(M_PI * x / 2.0);
        return v * v;
    };
    c.c_chi = M_PI * M_PI / 8.0;
    return c;
}

double lambda_chi_r(const PrimeTable& table, const Cutoff& chi, double R, std::uint64_t n) {
    if (R <= 1.0) throw ArgumentError("lambda_chi_r: R must exceed 1");
    const double logR = std::log(R);
    const auto factors = table.factor(n);  // range-checks n

    // squarefree divisors d with log d / log R < 1; chi vanishes beyond
    double sum = 0.0;
    const std::size_t k = factors.size();
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        double logd = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) logd += std::log(static_cast<double>(factors[i].p));
        if (logd >= logR) continue;
        const int mu = (__builtin_popcount(mask) % 2 == 0) ? 1 : -1;
        sum += mu * (logd == 0.0 ? 1.0 : chi.eval(logd / logR));
    }
    return logR * sum * sum;
}

DominationReport domination_check(const PrimeTable& table, const Cutoff& chi, std::uint64_t N,
                                  double gamma) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw ArgumentError("domination_check: gamma must lie in (0, 1)");
    if (N > table.limit()) throw RangeError("domination_check: N beyond table limit");
    DominationReport rep;
    rep.N = N;
    rep.gamma = gamma;
    rep.R = std::pow(static_cast<double>(N), gamma);
    for (std::uint64_t p : table.primes()) {
        if (static_cast<double>(p) < rep.R) continue;
        if (p > N) break;
        ++rep.primes_checked;
        const double lhs = std::log(static_cast<double>(p));
        const double rhs = lambda_chi_r(table, chi, rep.R, p) / gamma;
        if (lhs > rhs) rep.violations.push_back(p);
    }
    return rep;
}

std::vector<double> nu_majorant(const PrimeTable& table, const Cutoff& chi,
                                const std::vector<std::uint64_t>& b, std::uint64_t W_tilde,
                                double R, std::uint64_t Z) {
    if (b.empty()) throw ArgumentError("nu_majorant: need at least one residue");
    if (W_tilde == 0) throw ArgumentError("nu_majorant: W~ must be positive");
    std::uint64_t bmax = 0;
    for (std::uint64_t bi : b) {
        if (bi < 1 || bi > W_tilde)
            throw ArgumentError("nu_majorant: residues must lie in [1, W~]");
        if (std::gcd(bi, W_tilde) != 1)
            throw ArgumentError("nu_majorant: residues must be coprime to W~");
        bmax = std::max(bmax, bi);
    }
    if (W_tilde * Z + bmax > table.limit())
        throw RangeError("nu_majorant: W~ Z + max b exceeds the table limit");

    const double t0 = static_cast<double>(b.size());
    const double phi_ratio =
        static_cast<double>(euler_phi_u64(W_tilde)) / static_cast<double>(W_tilde);
    std::vector<double> nu(Z + 1, 0.0);
    for (std::uint64_t n = 1; n <= Z; ++n) {
        double s = 0.0;
        for (std::uint64_t bi : b)
            s += lambda_chi_r(table, chi, R, W_tilde * n + bi) / chi.c_chi;
        nu[n] = (1.0 + phi_ratio * s) / (t0 + 1.0);
    }
    return nu;
}

LfcReport linear_forms_average(const PrimeTable& table, const Cutoff& chi,
                               const AffineSystem& sys, std::uint64_t Z, double R,
                               std::uint64_t P_limit, int workers) {
    LfcReport rep;
    rep.Z = Z;
    rep.R = R;
    rep.P_limit = P_limit;

    std::vector<Halfspace> hs;
    for (std::size_t j = 0; j < sys.d(); ++j) {
        Halfspace lo{std::vector<mpq_class>(sys.d(), 0), mpq_class(-1)};
        lo.normal[j] = -1;
        Halfspace up{std::vector<mpq_class>(sys.d(), 0), mpq_class(static_cast<long>(Z))};
        up.normal[j] = 1;
        hs.push_back(std::move(lo));
        hs.push_back(std::move(up));
    }
    const ConvexBody box(sys.d(), static_cast<long long>(Z), std::move(hs));

    WeightSpec spec;
    spec.kind = WeightKind::Custom;
    const double c_chi = chi.c_chi;
    spec.custom = [&table, &chi, R, c_chi](std::uint64_t n) {
        if (n == 0) return 0.0;
        return lambda_chi_r(table, chi, R, n) / c_chi;
    };
    const EmpiricalResult emp = empirical_sum(table, sys, box, {spec}, workers);
    rep.average = emp.sum / std::pow(static_cast<double>(Z), static_cast<double>(sys.d()));

    const LocalFactorReport series = singular_series(sys, P_limit, workers);
    rep.predicted = series.value();
    if (rep.predicted != 0.0) rep.ratio = rep.average / rep.predicted;
    for (std::uint64_t p : series.exceptional)
        rep.exceptional_x += 1.0 / std::sqrt(static_cast<double>(p));
    return rep;
}

}  // namespace lpp
