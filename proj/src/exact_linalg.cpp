#include "lpp/exact_linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>

#include "lpp/arithmetic.hpp"
#include "lpp/errors.hpp"

namespace lpp {

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    IntMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ArgumentError("from_rows: ragged rows");
        std::size_t j = 0;
        for (long long v : row) m(i, j++) = static_cast<long>(v);
        ++i;
    }
    return m;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < cols_; ++j)
        std::swap(e_[i * cols_ + j], e_[k * cols_ + j]);
}

void IntMatrix::negate_row(std::size_t i) {
    for (std::size_t j = 0; j < cols_; ++j) e_[i * cols_ + j] = -e_[i * cols_ + j];
}

void IntMatrix::addmul_row(std::size_t i, std::size_t k, const mpz_class& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) e_[i * cols_ + j] += q * e_[k * cols_ + j];
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw ArgumentError("matrix product: dimension mismatch");
    IntMatrix m(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const mpz_class& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
        }
    return m;
}

std::vector<mpz_class> operator*(const IntMatrix& a, const std::vector<mpz_class>& x) {
    if (a.cols() != x.size()) throw ArgumentError("matrix-vector product: dimension mismatch");
    std::vector<mpz_class> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

mpz_class determinant(IntMatrix a) {
    if (a.rows() != a.cols()) throw ArgumentError("determinant: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t piv = k + 1;
            while (piv < n && a(piv, k) == 0) ++piv;
            if (piv == n) return 0;
            a.swap_rows(k, piv);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = t;
            }
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : mpz_class(-a(n - 1, n - 1));
}

namespace {

constexpr std::uint64_t kMaxPrime31 = (std::uint64_t{1} << 31) - 1;

std::int64_t mod_i64(const mpz_class& v, std::int64_t p) {
    mpz_class r = v % static_cast<long>(p);
    std::int64_t x = r.get_si();
    return x < 0 ? x + p : x;
}

// Row echelon over F_p on an int64 buffer; returns the rank.
int rank_rows_mod_p(std::vector<std::int64_t>& m, std::size_t rows, std::size_t cols,
                    std::int64_t p) {
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols && r < rows; ++j) {
        std::size_t piv = r;
        while (piv < rows && m[piv * cols + j] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t t = 0; t < cols; ++t)
                std::swap(m[piv * cols + t], m[r * cols + t]);
        const std::int64_t a = m[r * cols + j];
        for (std::size_t i = r + 1; i < rows; ++i) {
            const std::int64_t b = m[i * cols + j];
            if (b == 0) continue;
            // row_i := a*row_i - b*row_r, eliminating column j without inverses
            for (std::size_t t = j; t < cols; ++t) {
                const std::int64_t v =
                    (a * m[i * cols + t] - b * m[r * cols + t]) % p;
                m[i * cols + t] = v < 0 ? v + p : v;
            }
        }
        ++r;
    }
    return static_cast<int>(r);
}

void check_prime_arg(std::uint64_t p) {
    if (p > kMaxPrime31)
        throw ArgumentError("rank_mod_p: prime exceeds the 31-bit fast path");
    if (!is_prime_u64(p)) throw ArgumentError("rank_mod_p: modulus is not prime");
}

}  // namespace

int rank_mod_p(const IntMatrix& a, std::uint64_t p) {
    check_prime_arg(p);
    const auto rows = a.rows(), cols = a.cols();
    std::vector<std::int64_t> m(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m[i * cols + j] = mod_i64(a(i, j), static_cast<std::int64_t>(p));
    return rank_rows_mod_p(m, rows, cols, static_cast<std::int64_t>(p));
}

mpz_class affine_solution_count_mod_p(const IntMatrix& a, const std::vector<mpz_class>& c,
                                      std::uint64_t p) {
    check_prime_arg(p);
    if (c.size() != a.rows())
        throw ArgumentError("affine_solution_count_mod_p: constant column length mismatch");
    const auto rows = a.rows(), cols = a.cols();
    const auto sp = static_cast<std::int64_t>(p);
    std::vector<std::int64_t> plain(rows * cols), aug(rows * (cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            plain[i * cols + j] = mod_i64(a(i, j), sp);
            aug[i * (cols + 1) + j] = plain[i * cols + j];
        }
        aug[i * (cols + 1) + cols] = mod_i64(-c[i], sp);
    }
    const int r = rank_rows_mod_p(plain, rows, cols, sp);
    const int r_aug = rank_rows_mod_p(aug, rows, cols + 1, sp);
    if (r_aug > r) return 0;
    mpz_class count;
    mpz_ui_pow_ui(count.get_mpz_t(), p, cols - static_cast<std::size_t>(r));
    return count;
}

HnfResult hermite_normal_form(const IntMatrix& a) {
    HnfResult res{a, IntMatrix::identity(a.rows())};
    IntMatrix& h = res.h;
    IntMatrix& u = res.u;
    const std::size_t rows = a.rows(), cols = a.cols();
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols && r < rows; ++j) {
        // Euclid on the column below r until one nonzero entry remains.
        for (;;) {
            std::size_t piv = rows;
            for (std::size_t i = r; i < rows; ++i) {
                if (h(i, j) == 0) continue;
                if (piv == rows || mpz_cmpabs(h(i, j).get_mpz_t(), h(piv, j).get_mpz_t()) < 0) piv = i;
            }
            if (piv == rows) break;  // column empty below r
            h.swap_rows(r, piv);
            u.swap_rows(r, piv);
            if (h(r, j) < 0) {
                h.negate_row(r);
                u.negate_row(r);
            }
            bool clean = true;
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (h(i, j) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), h(i, j).get_mpz_t(), h(r, j).get_mpz_t());
                h.addmul_row(i, r, -q);
                u.addmul_row(i, r, -q);
                if (h(i, j) != 0) clean = false;
            }
            if (clean) {
                // pivot settled; reduce the entries above it into [0, pivot)
                for (std::size_t i = 0; i < r; ++i) {
                    mpz_class q;
                    mpz_fdiv_q(q.get_mpz_t(), h(i, j).get_mpz_t(), h(r, j).get_mpz_t());
                    h.addmul_row(i, r, -q);
                    u.addmul_row(i, r, -q);
                }
                ++r;
                break;
            }
        }
    }
#ifndef NDEBUG
    assert(res.u * a == res.h);
    mpz_class det_u = determinant(res.u);
    assert(det_u == 1 || det_u == -1);
#endif
    return res;
}

SnfResult smith_normal_form(const IntMatrix& a) {
    SnfResult res{a, IntMatrix::identity(a.rows()), IntMatrix::identity(a.cols()), 0};
    IntMatrix& s = res.s;
    IntMatrix& u = res.u;
    IntMatrix& v = res.v;
    const std::size_t rows = a.rows(), cols = a.cols();
    const std::size_t nmin = std::min(rows, cols);

    auto swap_cols = [&](IntMatrix& m, std::size_t x, std::size_t y) {
        if (x == y) return;
        for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, x), m(i, y));
    };
    auto addmul_col = [&](IntMatrix& m, std::size_t dst, std::size_t src, const mpz_class& q) {
        if (q == 0) return;
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += q * m(i, src);
    };

    for (std::size_t k = 0; k < nmin; ++k) {
        for (;;) {
            // smallest nonzero entry of the trailing block to (k, k)
            std::size_t bi = rows, bj = cols;
            for (std::size_t i = k; i < rows; ++i)
                for (std::size_t j = k; j < cols; ++j) {
                    if (s(i, j) == 0) continue;
                    if (bi == rows || mpz_cmpabs(s(i, j).get_mpz_t(), s(bi, bj).get_mpz_t()) < 0) {
                        bi = i;
                        bj = j;
                    }
                }
            if (bi == rows) goto done;  // trailing block all zero
            s.swap_rows(k, bi);
            u.swap_rows(k, bi);
            swap_cols(s, k, bj);
            swap_cols(v, k, bj);

            bool dirty = false;
            for (std::size_t i = k + 1; i < rows; ++i) {
                if (s(i, k) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), s(i, k).get_mpz_t(), s(k, k).get_mpz_t());
                s.addmul_row(i, k, -q);
                u.addmul_row(i, k, -q);
                if (s(i, k) != 0) dirty = true;
            }
            for (std::size_t j = k + 1; j < cols; ++j) {
                if (s(k, j) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), s(k, j).get_mpz_t(), s(k, k).get_mpz_t());
                addmul_col(s, j, k, -q);
                addmul_col(v, j, k, -q);
                if (s(k, j) != 0) dirty = true;
            }
            if (dirty) continue;

            if (s(k, k) < 0) {
                s.negate_row(k);
                u.negate_row(k);
            }
            // divisibility: s(k,k) must divide the rest of the trailing block
            bool fixed = true;
            for (std::size_t i = k + 1; i < rows && fixed; ++i)
                for (std::size_t j = k + 1; j < cols && fixed; ++j)
                    if (s(i, j) % s(k, k) != 0) {
                        s.addmul_row(k, i, 1);
                        u.addmul_row(k, i, 1);
                        fixed = false;
                    }
            if (fixed) break;
        }
        res.rank = k + 1;
    }
done:
    return res;
}

mpz_class congruence_solution_count(const IntMatrix& a, const std::vector<mpz_class>& c,
                                    const std::vector<mpz_class>& row_moduli,
                                    const mpz_class& m) {
    const std::size_t t = a.rows(), d = a.cols();
    if (c.size() != t || row_moduli.size() != t)
        throw ArgumentError("congruence_solution_count: row count mismatch");
    if (m < 1) throw ArgumentError("congruence_solution_count: modulus must be positive");

    IntMatrix lifted(t, d);
    std::vector<mpz_class> lc(t);
    for (std::size_t i = 0; i < t; ++i) {
        if (row_moduli[i] < 1)
            throw ArgumentError("congruence_solution_count: row moduli must be positive");
        if (m % row_moduli[i] != 0)
            throw ArgumentError("congruence_solution_count: row modulus does not divide m");
        const mpz_class scale = m / row_moduli[i];
        for (std::size_t j = 0; j < d; ++j) lifted(i, j) = a(i, j) * scale;
        lc[i] = c[i] * scale;
    }

    const SnfResult snf = smith_normal_form(lifted);
    // S y = -U c (mod m) after the substitution x = V y
    std::vector<mpz_class> b(t);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) b[i] -= snf.u(i, j) * lc[j];
        mpz_mod(b[i].get_mpz_t(), b[i].get_mpz_t(), m.get_mpz_t());
    }

    mpz_class count = 1;
    const std::size_t nmin = std::min(t, d);
    for (std::size_t j = 0; j < nmin; ++j) {
        const mpz_class& s = snf.s(j, j);
        if (s == 0) break;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
        if (b[j] % g != 0) return 0;
        count *= g;
    }
    for (std::size_t i = snf.rank; i < t; ++i)
        if (b[i] % m != 0) return 0;
    mpz_class free_part;
    mpz_pow_ui(free_part.get_mpz_t(), m.get_mpz_t(),
               static_cast<unsigned long>(d - snf.rank));
    return count * free_part;
}

AffineLattice kernel_lattice(const IntMatrix& a, const std::vector<mpz_class>& c,
                             const std::vector<mpz_class>& row_moduli) {
    const std::size_t t = a.rows(), d = a.cols();
    if (c.size() != t || row_moduli.size() != t)
        throw ArgumentError("kernel_lattice: row count mismatch");
    mpz_class m = 1;
    mpz_class period = 1;
    for (const auto& k : row_moduli) {
        if (k < 1) throw ArgumentError("kernel_lattice: row moduli must be positive");
        mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), k.get_mpz_t());
        period *= k;
    }

    IntMatrix lifted(t, d);
    std::vector<mpz_class> lc(t);
    for (std::size_t i = 0; i < t; ++i) {
        const mpz_class scale = m / row_moduli[i];
        for (std::size_t j = 0; j < d; ++j) lifted(i, j) = a(i, j) * scale;
        lc[i] = c[i] * scale;
    }

    AffineLattice out;

    // Particular solution from the Smith form.
    const SnfResult snf = smith_normal_form(lifted);
    std::vector<mpz_class> b(t);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) b[i] -= snf.u(i, j) * lc[j];
        mpz_mod(b[i].get_mpz_t(), b[i].get_mpz_t(), m.get_mpz_t());
    }
    std::vector<mpz_class> y(d);
    const std::size_t nmin = std::min(t, d);
    for (std::size_t j = 0; j < nmin; ++j) {
        const mpz_class& s = snf.s(j, j);
        if (s == 0) break;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
        if (b[j] % g != 0) return out;  // infeasible
        const mpz_class mg = m / g;
        if (mg == 1) continue;
        mpz_class inv, sg = s / g;
        if (mpz_invert(inv.get_mpz_t(), sg.get_mpz_t(), mg.get_mpz_t()) == 0)
            throw std::logic_error("kernel_lattice: inverse must exist after gcd division");
        y[j] = (b[j] / g) * inv % mg;
    }
    for (std::size_t i = snf.rank; i < t; ++i)
        if (b[i] % m != 0) return out;  // infeasible

    out.origin.assign(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) out.origin[i] += snf.v(i, j) * y[j];
        mpz_mod(out.origin[i].get_mpz_t(), out.origin[i].get_mpz_t(), period.get_mpz_t());
    }

    // Direction lattice: project ker [lifted | m I_t] onto the n coordinates.
    IntMatrix stacked(d + t, t);  // transpose of [lifted | m I]
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < d; ++j) stacked(j, i) = lifted(i, j);
        stacked(d + i, i) = m;
    }
    const HnfResult hnf = hermite_normal_form(stacked);
    IntMatrix gen(d, d);
    std::size_t found = 0;
    for (std::size_t i = 0; i < d + t && found < d; ++i) {
        bool zero_row = true;
        for (std::size_t j = 0; j < t; ++j)
            if (hnf.h(i, j) != 0) {
                zero_row = false;
                break;
            }
        if (!zero_row) continue;
        for (std::size_t j = 0; j < d; ++j) gen(found, j) = hnf.u(i, j);
        ++found;
    }
    if (found != d)
        throw std::logic_error("kernel_lattice: direction lattice must have full rank");
    const HnfResult reduced = hermite_normal_form(gen);
    out.basis = reduced.h;
    out.covolume = 1;
    for (std::size_t i = 0; i < d; ++i) out.covolume *= out.basis(i, i);
    if (out.covolume < 0) out.covolume = -out.covolume;

    // Membership self-check; a failure here is a bug, not bad input.
    for (std::size_t i = 0; i < t; ++i) {
        mpz_class v = c[i];
        for (std::size_t j = 0; j < d; ++j) v += a(i, j) * out.origin[j];
        if (v % row_moduli[i] != 0)
            throw std::logic_error("kernel_lattice: origin fails the congruences");
        for (std::size_t r = 0; r < d; ++r) {
            mpz_class w = 0;
            for (std::size_t j = 0; j < d; ++j) w += a(i, j) * out.basis(r, j);
            if (w % row_moduli[i] != 0)
                throw std::logic_error("kernel_lattice: basis vector fails the congruences");
        }
    }
    out.feasible = true;
    return out;
}

}  // namespace lpp
