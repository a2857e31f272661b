#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lpp/exact_linalg.hpp"

namespace lpp {

// A system Psi = (psi_1, ..., psi_t) : Z^d -> Z^t of affine-linear forms,
// psi_i(n) = sum_j linear(i,j) n_j + constant[i]. A form may not be
// identically zero.
class AffineSystem {
public:
    AffineSystem(IntMatrix linear, std::vector<mpz_class> constant,
                 std::vector<std::string> labels = {});

    std::size_t d() const { return linear_.cols(); }
    std::size_t t() const { return linear_.rows(); }
    const IntMatrix& linear() const { return linear_; }
    const std::vector<mpz_class>& constant() const { return constant_; }
    const std::vector<std::string>& labels() const { return labels_; }

    std::vector<mpz_class> evaluate(const std::vector<mpz_class>& n) const;
    mpz_class form_value(std::size_t i, const std::vector<mpz_class>& n) const;

    // (1/log^B N) (sum_i |psi_i(0)/N| + sum_{i,j} |linear(i,j)|), Definition 1.2 size.
    double size_norm(std::uint64_t N, double B) const;

    // Content hash of the canonical serialization; stable across runs.
    std::string digest() const;

    bool operator==(const AffineSystem&) const = default;

private:
    IntMatrix linear_;
    std::vector<mpz_class> constant_;
    std::vector<std::string> labels_;
};

// No form lies in the affine-linear span of another. For d >= 2 this is
// pairwise linear independence of the rows of the linear part; for d = 1 a
// pair is accepted when (linear || constant) rows are non-proportional, so
// classical tuples like (n, n+2) count as finite complexity.
bool finite_complexity(const AffineSystem& sys);

// |prod of nonzero entries| * |prod of nonzero 2x2 minors| of the linear part.
mpz_class minors_product(const AffineSystem& sys);

// Primes p at which two forms become affinely related mod p (rank of the
// augmented pair matrix <= 1 over F_p) or some form reduces to a nonzero
// constant mod p.
std::vector<std::uint64_t> exceptional_primes(const AffineSystem& sys);

using BetaOracle = std::function<mpq_class(const AffineSystem&, std::uint64_t)>;

// Finite complexity and beta_p != 0 for all p. Only p <= max(t+1, largest
// exceptional prime) need checking: beyond that bound the t zero-sets mod p
// cannot cover (Z/pZ)^d.
bool is_admissible(const AffineSystem& sys, const BetaOracle& beta);

AffineSystem subsystem(const AffineSystem& sys, const std::vector<std::size_t>& indices);

// Same linear part, constants become psi_i(shift).
AffineSystem translate(const AffineSystem& sys, const std::vector<mpz_class>& shift);

struct WTrickResidue {
    std::vector<std::int64_t> a;  // residue tuple in [1, W~]^d
    std::vector<mpz_class> b;     // b_i = psi_i(a) reduced into [1, W~]
    AffineSystem reduced;         // psi~ with psi_i(W~ n + a) = W~ psi~_i(n) + b_i
};

struct WTrickDecomposition {
    std::uint64_t w = 0;
    mpz_class W;        // prod_{p <= w} p
    mpz_class Q;        // minors product
    mpz_class W_tilde;  // W * Q
    std::vector<WTrickResidue> residues;  // exactly the a with gcd(psi_i(a), W~) = 1
};

// The W-trick substitution n -> W~ n + a over all admissible residues a.
WTrickDecomposition wtrick(const AffineSystem& sys, std::uint64_t w,
                           std::uint64_t enumeration_budget = 10'000'000);

}  // namespace lpp
