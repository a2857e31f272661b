#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <gmpxx.h>

#include "lpp/arithmetic.hpp"
#include "lpp/forms.hpp"

namespace lpp {

// Smooth even cutoff chi on [-1, 1] with chi(0) = 1, plus the normalization
// c_chi = int_0^1 chi'(x)^2 dx. Averages divide each Lambda_{chi,R} by c_chi
// so their main term is prod_p beta_p; the raw value keeps chi(0) = 1 for the
// domination bound.
struct Cutoff {
    std::function<double(double)> eval;
    double c_chi = 1.0;
};

// chi(x) = cos^2(pi x / 2) on [-1, 1]; c_chi = pi^2 / 8.
Cutoff cosine_squared_cutoff();

// log R (sum_{d | n} mu(d) chi(log d / log R))^2, unnormalized. Only
// squarefree divisors <= R contribute. Equals log R exactly for primes > R.
double lambda_chi_r(const PrimeTable& table, const Cutoff& chi, double R, std::uint64_t n);

struct DominationReport {
    std::uint64_t N = 0;
    double gamma = 0.0;
    double R = 0.0;
    std::uint64_t primes_checked = 0;
    std::vector<std::uint64_t> violations;  // primes with Lambda' > gamma^{-1} Lambda_{chi,R}
};

// Scans every prime in [N^gamma, N] for Lambda'(p) <= gamma^{-1} Lambda_{chi,R}(p).
DominationReport domination_check(const PrimeTable& table, const Cutoff& chi, std::uint64_t N,
                                  double gamma);

// nu(n) = (1 + (phi(W~)/W~) sum_i Lambda_{chi,R}(W~ n + b_i)/c_chi) / (t0+1)
// for n = 1..Z; index 0 of the returned vector is unused.
std::vector<double> nu_majorant(const PrimeTable& table, const Cutoff& chi,
                                const std::vector<std::uint64_t>& b, std::uint64_t W_tilde,
                                double R, std::uint64_t Z);

struct LfcReport {
    double average = 0.0;    // E prod_i Lambda_{chi,R}(psi_i(n))/c_chi over [Z]^d
    double predicted = 0.0;  // truncated prod_p beta_p
    double ratio = 0.0;
    std::uint64_t Z = 0;
    double R = 0.0;
    std::uint64_t P_limit = 0;
    double exceptional_x = 0.0;  // X = sum over exceptional p of p^{-1/2}
};

// Desk-scale instance of the GPY average: the linear forms condition says
// this ratio tends to 1; convergence is O(1/log R) and slow.
LfcReport linear_forms_average(const PrimeTable& table, const Cutoff& chi,
                               const AffineSystem& sys, std::uint64_t Z, double R,
                               std::uint64_t P_limit, int workers = 1);

}  // namespace lpp
