#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "lpp/arithmetic.hpp"
#include "lpp/counting.hpp"
#include "lpp/exact_linalg.hpp"
#include "lpp/forms.hpp"
#include "lpp/geometry.hpp"

namespace lpp {

// F(n) = Lambda(n+1) mu^2(n), the von Mangoldt weight on squarefree shifts.
double weight_f(const PrimeTable& table, std::uint64_t n);

// L_a = {n : a_i^2 | psi_i(n)}, as an affine sublattice of full rank. When
// feasible, covolume * alpha_Psi(a_1^2, ..., a_t^2) = 1.
struct ShiftedLattice {
    std::vector<std::uint64_t> a;
    bool feasible = false;
    std::vector<mpz_class> n0;  // coordinates in [0, prod a_i^2)
    IntMatrix basis;            // rows generate the direction lattice
    mpz_class covolume;
};

ShiftedLattice shifted_lattice(const AffineSystem& sys, const std::vector<std::uint64_t>& a);

// The system m -> psi_i(n0 + B m) + 1 = a_i^2 phi_i^a(m) + 1, with the exact
// divisibility a_i^2 | psi_i on L_a checked on every coefficient.
AffineSystem derived_system(const AffineSystem& sys, const ShiftedLattice& lattice);

struct CpsiTerm {
    std::vector<std::uint64_t> a;
    double alpha = 0.0;
    double beta_product = 0.0;
    double term = 0.0;
};

struct CpsiResult {
    double value = 0.0;
    std::uint64_t A_limit = 0;
    std::uint64_t P_limit = 0;
    std::uint64_t tuples_scanned = 0;
    std::uint64_t tuples_feasible = 0;
    // |term| totals per dyadic block of max_i a_i; the last block is the
    // convergence diagnostic; no effective tail constant is asserted.
    std::vector<double> dyadic_block_abs;
    double last_block_abs = 0.0;
    std::vector<CpsiTerm> terms;  // populated when keep_terms
};

// Truncation of C(Psi) = sum_a mu(a_1)...mu(a_t) alpha_Psi(a^2) prod_p beta_p(a)
// over squarefree tuples with a_i <= A_limit, local products over p <= P_limit.
CpsiResult c_psi_truncated(const AffineSystem& sys, std::uint64_t A_limit,
                           std::uint64_t P_limit, int workers = 1, bool keep_terms = false);

struct MirskyResult {
    double value = 0.0;       // prod_{p <= P} (1 - 1/(p(p-1)))
    double tail_bound = 0.0;  // sum_{p > P} 1/(p(p-1)) < 1/(P-1)
    std::uint64_t P_limit = 0;
};

MirskyResult mirsky_density(std::uint64_t P_limit);

// Empirical sum of prod F(psi_i(n)) over the body against C(Psi) Vol(K).
// tail_bound_log carries the last dyadic block of the C(Psi) truncation.
ComparisonReport sqfree_compare(const PrimeTable& table, const AffineSystem& sys,
                                const ConvexBody& body, std::uint64_t A_limit,
                                std::uint64_t P_limit, std::uint64_t resolution = 64,
                                int workers = 1);

}  // namespace lpp
