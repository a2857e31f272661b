#include <cmath>
#include <numeric>

#include <doctest.h>

#include "lpp/errors.hpp"
#include "lpp/majorant.hpp"
#include "oracles.hpp"

using namespace lpp;

namespace {

AffineSystem twin() { return AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 2}); }

// divisor-sum exchange oracle: E_{n <= Z} prod_i Lambda_{chi,R}(psi_i(n))
// computed by expanding the squares and counting divisibility directly
double exchange_oracle(const PrimeTable& table, const Cutoff& chi, double R,
                       const AffineSystem& sys, std::uint64_t Z) {
    const double logR = std::log(R);
    // squarefree d <= R
    std::vector<std::uint64_t> ds;
    for (std::uint64_t d = 1; static_cast<double>(d) < R; ++d)
        if (table.is_squarefree(d)) ds.push_back(d);
    const std::size_t t = sys.t();
    std::vector<std::size_t> idx(2 * t, 0);
    double total = 0.0;
    for (;;) {
        double coeff = 1.0;
        std::vector<std::uint64_t> mod(t, 1);
        for (std::size_t s = 0; s < 2 * t; ++s) {
            const std::uint64_t d = ds[idx[s]];
            coeff *= table.moebius(d) *
                     (d == 1 ? 1.0 : chi.eval(std::log(static_cast<double>(d)) / logR));
            const std::size_t form = s / 2;
            mod[form] = std::lcm(mod[form], d);
        }
        if (coeff != 0.0) {
            std::uint64_t count = 0;  // n <= Z with mod[i] | psi_i(n)
            for (std::uint64_t n = 1; n <= Z; ++n) {
                bool all = true;
                std::vector<mpz_class> pt{mpz_class(static_cast<unsigned long>(n))};
                const auto vals = sys.evaluate(pt);
                for (std::size_t i = 0; i < t && all; ++i)
                    if (vals[i] % mpz_class(static_cast<unsigned long>(mod[i])) != 0) all = false;
                if (all) ++count;
            }
            total += coeff * static_cast<double>(count);
        }
        std::size_t s = 0;
        while (s < 2 * t && idx[s] == ds.size() - 1) {
            idx[s] = 0;
            ++s;
        }
        if (s == 2 * t) break;
        ++idx[s];
    }
    return std::pow(logR, static_cast<double>(t)) * total / static_cast<double>(Z);
}

}  // namespace

TEST_SUITE_BEGIN("majorant");

TEST_CASE("cutoff shape") {
    const Cutoff chi = cosine_squared_cutoff();
    CHECK(chi.eval(0.0) == 1.0);
    CHECK(chi.eval(1.0) == 0.0);
    CHECK(chi.eval(-1.0) == 0.0);
    CHECK(chi.eval(2.5) == 0.0);
    CHECK(chi.eval(0.5) == doctest::Approx(0.5));
    CHECK(chi.c_chi == doctest::Approx(M_PI * M_PI / 8.0));
}

TEST_CASE("lambda_chi_R fixed values") {
    const PrimeTable table = PrimeTable::sieve(1000);
    const Cutoff chi = cosine_squared_cutoff();
    const double R = 10.0;
    const double logR = std::log(R);
    CHECK(lambda_chi_r(table, chi, R, 1) == logR);
    CHECK(lambda_chi_r(table, chi, R, 13) == logR);  // prime above R
    // prime p <= R: divisors 1 and p
    const double expect7 = logR * std::pow(1.0 - chi.eval(std::log(7.0) / logR), 2);
    CHECK(lambda_chi_r(table, chi, R, 7) == doctest::Approx(expect7).epsilon(1e-12));
    for (std::uint64_t n = 1; n <= 1000; ++n) CHECK(lambda_chi_r(table, chi, R, n) >= 0.0);
}

TEST_CASE("lambda_chi_R equals log R exactly on primes beyond R") {
    const PrimeTable table = PrimeTable::sieve(20'000);
    const Cutoff chi = cosine_squared_cutoff();
    const double R = 10.0;
    const double logR = std::log(R);
    for (std::uint64_t p : table.primes())
        if (static_cast<double>(p) > R) CHECK(lambda_chi_r(table, chi, R, p) == logR);
}

TEST_CASE("domination scan finds no violations") {
    const Cutoff chi = cosine_squared_cutoff();
    const PrimeTable table = PrimeTable::sieve(10'000);
    for (double gamma : {0.2, 0.9}) {
        const auto rep = domination_check(table, chi, 10'000, gamma);
        CHECK(rep.violations.empty());
        CHECK(rep.primes_checked > 0);
    }
    CHECK_THROWS_AS(domination_check(table, chi, 10'000, 1.5), ArgumentError);
}

TEST_CASE("nu majorant degenerate W-trick") {
    const PrimeTable table = PrimeTable::sieve(2000);
    const Cutoff chi = cosine_squared_cutoff();
    const double R = 5.0;
    const auto nu = nu_majorant(table, chi, {1}, 1, R, 1000);
    REQUIRE(nu.size() == 1001);
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        const double expect = (1.0 + lambda_chi_r(table, chi, R, n + 1) / chi.c_chi) / 2.0;
        CHECK(nu[n] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(nu[n] >= 0.5);  // 1/(t0+1) floor
    }
}

TEST_CASE("nu majorant validates residues") {
    const PrimeTable table = PrimeTable::sieve(10'000);
    const Cutoff chi = cosine_squared_cutoff();
    CHECK_THROWS_AS(nu_majorant(table, chi, {2}, 6, 3.0, 100), ArgumentError);   // gcd > 1
    CHECK_THROWS_AS(nu_majorant(table, chi, {7}, 6, 3.0, 100), ArgumentError);   // out of range
    CHECK_THROWS_AS(nu_majorant(table, chi, {5}, 6, 3.0, 10'000), RangeError);   // table
}

TEST_CASE("nu majorant dominates the W-tricked prime logs") {
    // 1 + sum Lambda'_{W~,b_i} <= (t0+1) max(1, 1/gamma) nu on [Z^{3/5}, Z]
    const PrimeTable table = PrimeTable::sieve(70'000);
    const Cutoff chi = cosine_squared_cutoff();
    const std::uint64_t W = 6, Z = 10'000;
    const double gamma = 0.3;
    const double R = std::pow(static_cast<double>(Z) * W, gamma);
    const std::vector<std::uint64_t> b{1, 5};
    const auto nu = nu_majorant(table, chi, b, W, R, Z);
    const double phi_ratio = 2.0 / 6.0;
    const double cap = 3.0 * std::max(1.0, chi.c_chi / gamma);
    for (std::uint64_t n = static_cast<std::uint64_t>(std::pow(Z, 0.6)); n <= Z; ++n) {
        double lhs = 1.0;
        for (std::uint64_t bi : b) lhs += phi_ratio * table.lambda_prime(W * n + bi);
        CHECK(lhs <= cap * nu[n] + 1e-9);
    }
}

TEST_CASE("linear forms average matches the divisor-exchange oracle") {
    const PrimeTable table = PrimeTable::sieve(5000);
    const Cutoff chi = cosine_squared_cutoff();
    const double R = 3.1622776601683795;
    {
        const AffineSystem single(IntMatrix::from_rows({{1}}), {0});
        const auto rep = linear_forms_average(table, chi, single, 2000, R, 500);
        const double oracle =
            exchange_oracle(table, chi, R, single, 2000) / chi.c_chi;
        CHECK(rep.average == doctest::Approx(oracle).epsilon(1e-9));
    }
    {
        const auto rep = linear_forms_average(table, chi, twin(), 2000, R, 500);
        const double oracle =
            exchange_oracle(table, chi, R, twin(), 2000) / (chi.c_chi * chi.c_chi);
        CHECK(rep.average == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(rep.exceptional_x == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
}

TEST_CASE("linear forms averages factor over disjoint variables") {
    const PrimeTable table = PrimeTable::sieve(600);
    const Cutoff chi = cosine_squared_cutoff();
    const double R = 4.0;
    const AffineSystem prod(IntMatrix::from_rows({{1, 0}, {0, 1}}), {0, 0});
    const AffineSystem single(IntMatrix::from_rows({{1}}), {0});
    const auto two = linear_forms_average(table, chi, prod, 500, R, 200);
    const auto one = linear_forms_average(table, chi, single, 500, R, 200);
    CHECK(two.average == doctest::Approx(one.average * one.average).epsilon(1e-9));
}

TEST_SUITE_END();
