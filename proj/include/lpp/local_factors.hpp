#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lpp/forms.hpp"

namespace lpp {

// beta_p = E_{a in (Z/pZ)^d} prod_i Lambda_p(psi_i(a)), exact. Evaluated by
// inclusion-exclusion over form subsets with one rank computation per subset,
// so large p stay cheap. beta_p = 0 is a valid value.
mpq_class beta_p(const AffineSystem& sys, std::uint64_t p);

// Direct average over all p^d residue tuples; the oracle for beta_p.
mpq_class beta_p_bruteforce(const AffineSystem& sys, std::uint64_t p,
                            std::uint64_t budget = 10'000'000);

// Closed form for the system (n + q_1 d, ..., n + q_k d):
// beta_p = (p/(p-1))^k (p-1)(1+p-h(p))/p^2 with h(p) = #{q_i mod p}.
mpq_class beta_p_example1(const std::vector<long long>& q, std::uint64_t p);

// Closed form for (d, n, n+qd, ..., n+(k-1)qd) under prod_{p<=k} p | q:
// beta_p = (p/(p-1))^{k+1} (p-1)^2/p^2       if p | q,
//          (p/(p-1))^{k+1} (p-1)(p-k)/p^2    otherwise.
mpq_class beta_p_example2(int k, std::uint64_t q, std::uint64_t p);

struct LocalFactorReport {
    std::string system_digest;
    std::map<std::uint64_t, mpq_class> factors;  // p -> beta_p, p <= P_limit
    std::vector<std::uint64_t> exceptional;
    mpq_class truncated_product;  // exactly prod of stored factors
    double tail_bound_log = 0.0;  // 4^t / (P_limit - 1), implementer's envelope
    std::uint64_t P_limit = 0;

    double value() const { return truncated_product.get_d(); }
};

// Exact truncated singular series prod_{p <= P_limit} beta_p with the tail
// envelope |log tail| <= 4^t/(P_limit - 1). Requires an admissible system and
// P_limit at least as large as every exceptional prime.
LocalFactorReport singular_series(const AffineSystem& sys, std::uint64_t P_limit,
                                  int workers = 1);

// alpha_Psi(k_1, ..., k_t): density of {n : k_i | psi_i(n)}, computed per
// prime power and multiplied (multiplicativity across primes), exact.
mpq_class alpha_density(const AffineSystem& sys, const std::vector<mpz_class>& k);

}  // namespace lpp
