#include "lpp/forms.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <set>

#include "lpp/arithmetic.hpp"
#include "lpp/errors.hpp"

namespace lpp {

AffineSystem::AffineSystem(IntMatrix linear, std::vector<mpz_class> constant,
                           std::vector<std::string> labels)
    : linear_(std::move(linear)), constant_(std::move(constant)), labels_(std::move(labels)) {
    if (linear_.rows() == 0 || linear_.cols() == 0)
        throw ArgumentError("AffineSystem: needs at least one form and one variable");
    if (constant_.size() != linear_.rows())
        throw ArgumentError("AffineSystem: constant column length mismatch");
    if (!labels_.empty() && labels_.size() != linear_.rows())
        throw ArgumentError("AffineSystem: label count mismatch");
    for (std::size_t i = 0; i < linear_.rows(); ++i) {
        bool zero = constant_[i] == 0;
        for (std::size_t j = 0; zero && j < linear_.cols(); ++j)
            if (linear_(i, j) != 0) zero = false;
        if (zero) throw ArgumentError("AffineSystem: form " + std::to_string(i) + " is zero");
    }
}

std::vector<mpz_class> AffineSystem::evaluate(const std::vector<mpz_class>& n) const {
    if (n.size() != d()) throw ArgumentError("evaluate: point dimension mismatch");
    std::vector<mpz_class> v(constant_);
    for (std::size_t i = 0; i < t(); ++i)
        for (std::size_t j = 0; j < d(); ++j) v[i] += linear_(i, j) * n[j];
    return v;
}

mpz_class AffineSystem::form_value(std::size_t i, const std::vector<mpz_class>& n) const {
    if (i >= t()) throw ArgumentError("form_value: index out of range");
    if (n.size() != d()) throw ArgumentError("form_value: point dimension mismatch");
    mpz_class v = constant_[i];
    for (std::size_t j = 0; j < d(); ++j) v += linear_(i, j) * n[j];
    return v;
}

double AffineSystem::size_norm(std::uint64_t N, double B) const {
    if (N < 2) throw ArgumentError("size_norm: N must be at least 2");
    mpq_class sum = 0;
    for (const auto& c : constant_) sum += mpq_class(abs(c), N);
    for (std::size_t i = 0; i < t(); ++i)
        for (std::size_t j = 0; j < d(); ++j) sum += abs(linear_(i, j));
    return sum.get_d() / std::pow(std::log(static_cast<double>(N)), B);
}

std::string AffineSystem::digest() const {
    std::string s = "lpp/system;d=" + std::to_string(d()) + ";t=" + std::to_string(t()) + ";L=";
    for (std::size_t i = 0; i < t(); ++i)
        for (std::size_t j = 0; j < d(); ++j) s += linear_(i, j).get_str() + ",";
    s += ";c=";
    for (const auto& c : constant_) s += c.get_str() + ",";
    s += ";labels=";
    for (const auto& l : labels_) s += l + ",";
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// true when the two rows of the 2 x w matrix are linearly dependent over Q
bool rows_dependent(const IntMatrix& m, std::size_t r0, std::size_t r1, std::size_t w) {
    for (std::size_t x = 0; x < w; ++x)
        for (std::size_t y = x + 1; y < w; ++y)
            if (m(r0, x) * m(r1, y) != m(r0, y) * m(r1, x)) return false;
    return true;
}

IntMatrix augmented(const AffineSystem& sys) {
    IntMatrix m(sys.t(), sys.d() + 1);
    for (std::size_t i = 0; i < sys.t(); ++i) {
        for (std::size_t j = 0; j < sys.d(); ++j) m(i, j) = sys.linear()(i, j);
        m(i, sys.d()) = sys.constant()[i];
    }
    return m;
}

std::vector<std::uint64_t> prime_divisors(mpz_class g) {
    std::vector<std::uint64_t> out;
    if (g < 0) g = -g;
    if (g <= 1) return out;
    if (!g.fits_ulong_p())
        throw ResourceError("exceptional_primes: minor gcd too large to factor");
    for (const auto& pp : factor_u64(g.get_ui())) out.push_back(pp.p);
    return out;
}

}  // namespace

bool finite_complexity(const AffineSystem& sys) {
    if (sys.t() < 2) throw ArgumentError("finite_complexity: needs at least two forms");
    const bool use_constants = sys.d() == 1;
    const IntMatrix aug = use_constants ? augmented(sys) : sys.linear();
    const std::size_t w = use_constants ? sys.d() + 1 : sys.d();
    for (std::size_t i = 0; i < sys.t(); ++i)
        for (std::size_t j = i + 1; j < sys.t(); ++j)
            if (rows_dependent(aug, i, j, w)) return false;
    return true;
}

mpz_class minors_product(const AffineSystem& sys) {
    const IntMatrix& L = sys.linear();
    mpz_class q = 1;
    for (std::size_t i = 0; i < sys.t(); ++i)
        for (std::size_t j = 0; j < sys.d(); ++j)
            if (L(i, j) != 0) q *= L(i, j);
    for (std::size_t i = 0; i < sys.t(); ++i)
        for (std::size_t k = i + 1; k < sys.t(); ++k)
            for (std::size_t x = 0; x < sys.d(); ++x)
                for (std::size_t y = x + 1; y < sys.d(); ++y) {
                    const mpz_class minor = L(i, x) * L(k, y) - L(i, y) * L(k, x);
                    if (minor != 0) q *= minor;
                }
    return abs(q);
}

std::vector<std::uint64_t> exceptional_primes(const AffineSystem& sys) {
    if (sys.t() >= 2 && !finite_complexity(sys))
        throw ArgumentError("exceptional_primes: system has infinite complexity");
    const IntMatrix aug = augmented(sys);
    std::set<std::uint64_t> candidates;

    // Rows that are constant modulo some prime: p | gcd of the linear row.
    for (std::size_t i = 0; i < sys.t(); ++i) {
        mpz_class g = 0;
        for (std::size_t j = 0; j < sys.d(); ++j)
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), sys.linear()(i, j).get_mpz_t());
        if (g == 0)
            throw ArgumentError(
                "exceptional_primes: a form with zero linear part is exceptional at "
                "infinitely many primes");
        for (std::uint64_t p : prime_divisors(g)) candidates.insert(p);
    }
    // Pairs: p must divide every 2x2 minor of the augmented pair matrix.
    for (std::size_t i = 0; i < sys.t(); ++i)
        for (std::size_t k = i + 1; k < sys.t(); ++k) {
            mpz_class g = 0;
            for (std::size_t x = 0; x <= sys.d(); ++x)
                for (std::size_t y = x + 1; y <= sys.d(); ++y) {
                    const mpz_class minor = aug(i, x) * aug(k, y) - aug(i, y) * aug(k, x);
                    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), minor.get_mpz_t());
                }
            for (std::uint64_t p : prime_divisors(g)) candidates.insert(p);
        }

    std::vector<std::uint64_t> out;
    for (std::uint64_t p : candidates) {
        bool exceptional = false;
        for (std::size_t i = 0; i < sys.t() && !exceptional; ++i) {
            bool row_zero = true;
            for (std::size_t j = 0; j < sys.d(); ++j)
                if (sys.linear()(i, j) % static_cast<long>(p) != 0) {
                    row_zero = false;
                    break;
                }
            if (row_zero && sys.constant()[i] % static_cast<long>(p) != 0) exceptional = true;
        }
        for (std::size_t i = 0; i < sys.t() && !exceptional; ++i)
            for (std::size_t k = i + 1; k < sys.t() && !exceptional; ++k) {
                IntMatrix pair(2, sys.d() + 1);
                for (std::size_t j = 0; j <= sys.d(); ++j) {
                    pair(0, j) = aug(i, j);
                    pair(1, j) = aug(k, j);
                }
                if (rank_mod_p(pair, p) <= 1) exceptional = true;
            }
        if (exceptional) out.push_back(p);
    }
#ifndef NDEBUG
    // Lemma-side containment: exceptional primes divide the minors product
    // (the d = 1 analogue goes through the augmented pair minors instead).
    if (sys.d() >= 2) {
        const mpz_class q = minors_product(sys);
        for (std::uint64_t p : out) assert(q % static_cast<long>(p) == 0);
    }
#endif
    return out;
}

bool is_admissible(const AffineSystem& sys, const BetaOracle& beta) {
    if (sys.t() >= 2 && !finite_complexity(sys)) return false;
    std::uint64_t bound = sys.t() + 1;
    for (std::uint64_t p : exceptional_primes(sys)) bound = std::max(bound, p);
    for (std::uint64_t p = 2; p <= bound; ++p) {
        if (!is_prime_u64(p)) continue;
        if (beta(sys, p) == 0) return false;
    }
    return true;
}

AffineSystem subsystem(const AffineSystem& sys, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw ArgumentError("subsystem: empty index list");
    for (std::size_t i = 0; i + 1 < indices.size(); ++i)
        if (indices[i] >= indices[i + 1])
            throw ArgumentError("subsystem: indices must be strictly increasing");
    if (indices.back() >= sys.t()) throw ArgumentError("subsystem: index out of range");
    IntMatrix linear(indices.size(), sys.d());
    std::vector<mpz_class> constant(indices.size());
    std::vector<std::string> labels;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        for (std::size_t j = 0; j < sys.d(); ++j) linear(r, j) = sys.linear()(indices[r], j);
        constant[r] = sys.constant()[indices[r]];
        if (!sys.labels().empty()) labels.push_back(sys.labels()[indices[r]]);
    }
    return AffineSystem(std::move(linear), std::move(constant), std::move(labels));
}

AffineSystem translate(const AffineSystem& sys, const std::vector<mpz_class>& shift) {
    return AffineSystem(sys.linear(), sys.evaluate(shift), sys.labels());
}

WTrickDecomposition wtrick(const AffineSystem& sys, std::uint64_t w,
                           std::uint64_t enumeration_budget) {
    WTrickDecomposition out;
    out.w = w;
    out.W = primorial(w);
    out.Q = minors_product(sys);
    out.W_tilde = out.W * out.Q;

    mpz_class tuples;
    mpz_pow_ui(tuples.get_mpz_t(), out.W_tilde.get_mpz_t(),
               static_cast<unsigned long>(sys.d()));
    if (tuples > enumeration_budget)
        throw ResourceError("wtrick: W~ = " + out.W_tilde.get_str() + " gives " +
                            tuples.get_str() + " residue tuples, budget is " +
                            std::to_string(enumeration_budget));
    const std::int64_t wt = static_cast<std::int64_t>(out.W_tilde.get_ui());

    const std::size_t d = sys.d(), t = sys.t();
    std::vector<std::int64_t> a(d, 1);
    std::vector<mpz_class> point(d);
    for (;;) {
        for (std::size_t j = 0; j < d; ++j) point[j] = static_cast<long>(a[j]);
        const std::vector<mpz_class> values = sys.evaluate(point);
        bool coprime = true;
        for (const auto& v : values) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), out.W_tilde.get_mpz_t());
            if (g != 1) {
                coprime = false;
                break;
            }
        }
        if (coprime) {
            std::vector<mpz_class> b(t), cred(t);
            for (std::size_t i = 0; i < t; ++i) {
                mpz_class r;
                mpz_mod(r.get_mpz_t(), values[i].get_mpz_t(), out.W_tilde.get_mpz_t());
                b[i] = (r == 0) ? out.W_tilde : r;  // reduction taken in [1, W~]
                cred[i] = (values[i] - b[i]) / out.W_tilde;
            }
            out.residues.push_back(
                {a, std::move(b), AffineSystem(sys.linear(), std::move(cred), sys.labels())});
        }
        std::size_t j = 0;
        while (j < d && a[j] == wt) {
            a[j] = 1;
            ++j;
        }
        if (j == d) break;
        ++a[j];
    }
    return out;
}

}  // namespace lpp
