#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lpp/arithmetic.hpp"
#include "lpp/forms.hpp"
#include "lpp/geometry.hpp"
#include "lpp/local_factors.hpp"

namespace lpp {

enum class WeightKind {
    VonMangoldt,  // Lambda
    PrimeLog,     // Lambda' = 1_P log
    SqfreeShift,  // F(n) = Lambda(n+1) mu^2(n)
    One,
    Custom,
};

struct WeightSpec {
    WeightKind kind = WeightKind::PrimeLog;
    std::function<double(std::uint64_t)> custom;  // used when kind == Custom
};

struct EmpiricalResult {
    double sum = 0.0;
    std::uint64_t lattice_count = 0;
    std::uint64_t negative_skips = 0;   // points where some psi_i(n) < 0
    std::uint64_t required_limit = 0;   // sieve limit demanded by the body
};

// Largest |psi_i| over the body (attained at a vertex), plus one when a
// weight looks at n+1. This is the sieve limit empirical_sum will demand.
std::uint64_t required_sieve_limit(const AffineSystem& sys, const ConvexBody& body,
                                   bool plus_one);

// sum over Z^d cap K of prod_i w_i(psi_i(n)). One WeightSpec is broadcast to
// every form. Negative form values contribute 0 and are counted. Per-worker
// partial sums are combined in worker order, so results are reproducible for
// a fixed worker count.
EmpiricalResult empirical_sum(const PrimeTable& table, const AffineSystem& sys,
                              const ConvexBody& body, const std::vector<WeightSpec>& weights,
                              int workers = 1);

enum class PredictionMode { Volume, BetaInfinity };

struct Prediction {
    double value = 0.0;
    double volume_value = 0.0;
    double volume_error = 0.0;
    double series_value = 0.0;
    double tail_bound_log = 0.0;
    std::uint64_t P_limit = 0;
};

Prediction predicted(const AffineSystem& sys, const ConvexBody& body, std::uint64_t P_limit,
                     PredictionMode mode, std::uint64_t resolution = 64, int workers = 1);

struct ComparisonReport {
    std::string system_digest;
    std::string mode;
    double empirical = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;  // empirical / predicted when predicted != 0
    bool ratio_defined = false;
    std::uint64_t P_limit = 0;
    double tail_bound_log = 0.0;
    std::uint64_t lattice_count = 0;
    std::uint64_t negative_skips = 0;
    double volume_value = 0.0;
    double volume_error = 0.0;
    std::int64_t runtime_ms = 0;
    int workers = 1;
};

ComparisonReport compare(const PrimeTable& table, const AffineSystem& sys,
                         const ConvexBody& body, std::uint64_t P_limit, PredictionMode mode,
                         const std::vector<WeightSpec>& weights = {{WeightKind::PrimeLog, {}}},
                         std::uint64_t resolution = 64, int workers = 1);

// Finite W-trick bookkeeping: partitioning [M]^d into residue classes mod W~
// reproduces the plain sum exactly; classes with gcd(psi_i(a), W~) > 1 can
// only pick up terms whose form values are primes dividing W~.
struct WTrickCheckReport {
    std::uint64_t w = 0;
    std::uint64_t M = 0;
    mpz_class W_tilde;
    double lhs = 0.0;              // sum over [M]^d
    double partition_total = 0.0;  // sum over all residue classes
    double coprime_mass = 0.0;
    double dropped_mass = 0.0;      // non-coprime classes
    double dropped_expected = 0.0;  // terms with some psi_i(n) a prime dividing W~
    std::uint64_t classes = 0;
    std::uint64_t coprime_classes = 0;
    bool partition_exact = false;
    bool dropped_matches = false;
    bool reduced_identity_ok = false;  // W~ psi~_i + b_i = psi_i on every stored residue
    bool ok() const { return partition_exact && dropped_matches && reduced_identity_ok; }
};

WTrickCheckReport wtrick_identity_check(const PrimeTable& table, const AffineSystem& sys,
                                        std::uint64_t w, std::uint64_t M, int workers = 1);

// E_{a in [W~]^d} prod_i Lambda_{W~}(psi_i(a)) = prod_{p | W~} beta_p, both
// sides exact rationals. Holds for any W~ >= 1 since Lambda_{p^k} = Lambda_p.
struct CrtCheckReport {
    std::uint64_t W_tilde = 0;
    mpq_class lhs;
    mpq_class rhs;
    bool equal = false;
};

CrtCheckReport crt_local_product_check(const AffineSystem& sys, std::uint64_t W_tilde,
                                       std::uint64_t budget = 10'000'000);

// Example driver: forms n + q_i d with q_i = floor(log^i N) over [1, N]^2.
struct ExampleReport {
    ComparisonReport comparison;
    std::vector<long long> q;
    std::vector<std::uint64_t> closed_form_mismatches;  // primes where the
                                                        // closed form differs
                                                        // from beta_p
};

ExampleReport example_ap_positions(const PrimeTable& table, int k, std::uint64_t N,
                                   std::uint64_t P_limit, std::uint64_t resolution = 64,
                                   int workers = 1);

// Example driver: forms (d, n, n+qd, ..., n+(k-1)qd) over
// {n >= 1, d >= 1, n + (k-1)qd <= N}; requires prod_{p <= k} p | q.
ExampleReport example_prime_step(const PrimeTable& table, int k, std::uint64_t q,
                                 std::uint64_t N, std::uint64_t P_limit,
                                 std::uint64_t resolution = 64, int workers = 1);

}  // namespace lpp
