#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include <gmpxx.h>

namespace lpp {

// Dense row-major matrix of arbitrary-precision integers. All counting built
// on top of it is exact; there is no floating point anywhere in this module.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {}

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(std::initializer_list<std::initializer_list<long long>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    IntMatrix transposed() const;
    void swap_rows(std::size_t i, std::size_t k);
    void negate_row(std::size_t i);
    // row i += q * row k
    void addmul_row(std::size_t i, std::size_t k, const mpz_class& q);

    bool operator==(const IntMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpz_class> e_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
std::vector<mpz_class> operator*(const IntMatrix& a, const std::vector<mpz_class>& x);

// Fraction-free (Bareiss) determinant of a square matrix.
mpz_class determinant(IntMatrix a);

// Rank of A over F_p. Throws if p is not prime or does not fit 31 bits.
int rank_mod_p(const IntMatrix& a, std::uint64_t p);

// #{x in (Z/pZ)^d : A x = -c mod p}: p^(d-rank) if consistent, else 0.
mpz_class affine_solution_count_mod_p(const IntMatrix& a, const std::vector<mpz_class>& c,
                                      std::uint64_t p);

struct HnfResult {
    IntMatrix h;  // row-style Hermite normal form
    IntMatrix u;  // unimodular, h = u * a
};
HnfResult hermite_normal_form(const IntMatrix& a);

struct SnfResult {
    IntMatrix s;  // diagonal, s = u * a * v, diagonal entries divide successors
    IntMatrix u;
    IntMatrix v;
    std::size_t rank = 0;
};
SnfResult smith_normal_form(const IntMatrix& a);

// #{x in (Z/mZ)^d : k_i | (A x + c)_i for all i}. Every k_i must divide m.
// Rows are lifted to the common modulus m, then counted via the Smith normal
// form of the lifted matrix.
mpz_class congruence_solution_count(const IntMatrix& a, const std::vector<mpz_class>& c,
                                    const std::vector<mpz_class>& row_moduli,
                                    const mpz_class& m);

// The affine lattice {n in Z^d : k_i | (A n + c)_i}. When feasible, `origin`
// has coordinates in [0, prod k_i) and `basis` rows generate the direction
// lattice {n : k_i | (A n)_i}; the basis is in row Hermite form, so it is
// triangular with reduced off-diagonal entries and covolume = |det basis|.
struct AffineLattice {
    bool feasible = false;
    std::vector<mpz_class> origin;
    IntMatrix basis;
    mpz_class covolume;
};
AffineLattice kernel_lattice(const IntMatrix& a, const std::vector<mpz_class>& c,
                             const std::vector<mpz_class>& row_moduli);

}  // namespace lpp
