#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "lpp/arithmetic.hpp"
#include "lpp/errors.hpp"
#include "lpp/local_factors.hpp"
#include "oracles.hpp"

using namespace lpp;

namespace {

AffineSystem twin() { return AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 2}); }
AffineSystem ap3() {
    return AffineSystem(IntMatrix::from_rows({{1, 0}, {1, 1}, {1, 2}}), {0, 0, 0});
}
AffineSystem identity2() { return AffineSystem(IntMatrix::from_rows({{1, 0}, {0, 1}}), {0, 0}); }

}  // namespace

TEST_SUITE_BEGIN("localfactors");

TEST_CASE("beta_p fixed values") {
    CHECK(beta_p(twin(), 2) == 2);
    CHECK(beta_p(twin(), 3) == mpq_class(3, 4));
    CHECK(beta_p(AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 1}), 2) == 0);
    CHECK(beta_p(identity2(), 5) == 1);
    CHECK(beta_p(ap3(), 2) == 2);
    CHECK_THROWS_AS(beta_p(twin(), 4), ArgumentError);
}

TEST_CASE("beta_p equals the brute-force average") {
    CHECK(beta_p_bruteforce(twin(), 2) == 2);
    CHECK(beta_p_bruteforce(AffineSystem(IntMatrix::from_rows({{1}}), {0}), 3) == 1);
    testing::SystemPool pool(505);
    for (int iter = 0; iter < 80; ++iter) {
        const AffineSystem sys = pool.next(3, 4, 9);
        for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL})
            CHECK(beta_p(sys, p) == beta_p_bruteforce(sys, p));
    }
}

TEST_CASE("beta_p with a form vanishing mod p is zero") {
    const AffineSystem sys(IntMatrix::from_rows({{3, 0}, {0, 1}}), {3, 1});
    CHECK(beta_p(sys, 3) == 0);
    CHECK(beta_p_bruteforce(sys, 3) == 0);
}

TEST_CASE("beta_p is translation invariant") {
    testing::SystemPool pool(606);
    std::mt19937_64 rng(607);
    std::uniform_int_distribution<int> v(-20, 20);
    for (int iter = 0; iter < 60; ++iter) {
        const AffineSystem sys = pool.next(3, 3, 9);
        std::vector<mpz_class> shift(sys.d());
        for (auto& s : shift) s = v(rng);
        const AffineSystem moved = translate(sys, shift);
        for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 13ULL})
            CHECK(beta_p(sys, p) == beta_p(moved, p));
    }
}

TEST_CASE("example 1 closed form") {
    CHECK(beta_p_example1({1, 2}, 5) == 1);
    for (std::uint64_t p : {2ULL, 3ULL, 11ULL, 97ULL}) CHECK(beta_p_example1({1}, p) == 1);
    CHECK(beta_p_example1({1, 1}, 7) == mpq_class(7, 6));

    // against beta_p over a parameter grid, including p | q_i cases
    std::mt19937_64 rng(708);
    std::uniform_int_distribution<long long> qv(1, 50);
    const PrimeTable primes = PrimeTable::sieve(101);
    for (int k = 1; k <= 4; ++k)
        for (int rep = 0; rep < 12; ++rep) {
            std::vector<long long> q(k);
            for (auto& x : q) x = qv(rng);
            if (rep == 0) std::fill(q.begin(), q.end(), 7);  // h(p) collapse
            IntMatrix linear(k, 2);
            for (int i = 0; i < k; ++i) {
                linear(i, 0) = 1;
                linear(i, 1) = static_cast<long>(q[i]);
            }
            const AffineSystem sys(std::move(linear), std::vector<mpz_class>(k, 0));
            for (std::uint64_t p : primes.primes())
                CHECK(beta_p_example1(q, p) == beta_p(sys, p));
        }
}

TEST_CASE("example 2 closed form") {
    CHECK(beta_p_example2(3, 6, 2) == 4);
    CHECK(beta_p_example2(3, 6, 5) == mpq_class(25, 32));
    CHECK(beta_p_example2(2, 2, 3) == mpq_class(3, 4));
    CHECK_THROWS_AS(beta_p_example2(3, 4, 5), ArgumentError);  // 6 does not divide 4

    const PrimeTable primes = PrimeTable::sieve(101);
    const struct {
        int k;
        std::uint64_t q;
    } grid[] = {{1, 1}, {1, 3}, {2, 2}, {2, 6}, {2, 10}, {3, 6}, {3, 30}, {4, 210}};
    for (const auto& g : grid) {
        IntMatrix linear(g.k + 1, 2);
        linear(0, 0) = 0;
        linear(0, 1) = 1;
        for (int i = 1; i <= g.k; ++i) {
            linear(i, 0) = 1;
            linear(i, 1) = static_cast<long>((i - 1) * g.q);
        }
        const AffineSystem sys(std::move(linear), std::vector<mpz_class>(g.k + 1, 0));
        for (std::uint64_t p : primes.primes())
            CHECK(beta_p_example2(g.k, g.q, p) == beta_p(sys, p));
    }
}

TEST_CASE("twin singular series hits the twin prime constant") {
    const LocalFactorReport rep = singular_series(twin(), 100'000);
    CHECK(std::fabs(rep.value() - 1.3203236) < 1e-4);
    CHECK(rep.exceptional == std::vector<std::uint64_t>{2});
    CHECK(rep.factors.size() == 9592);
    CHECK(rep.tail_bound_log == doctest::Approx(16.0 / 99'999));
}

TEST_CASE("identity system has singular series exactly 1") {
    const LocalFactorReport rep = singular_series(identity2(), 1000);
    CHECK(rep.truncated_product == 1);
    CHECK(rep.tail_bound_log > 0.0);
}

TEST_CASE("truncated product is exactly the product of stored factors") {
    const LocalFactorReport rep = singular_series(ap3(), 500);
    mpq_class prod = 1;
    for (const auto& [p, b] : rep.factors) prod *= b;
    CHECK(prod == rep.truncated_product);
}

TEST_CASE("singular series is stable under deeper truncation") {
    const LocalFactorReport a = singular_series(ap3(), 10'000);
    const LocalFactorReport b = singular_series(ap3(), 100'000);
    CHECK(std::fabs(std::log(a.value()) - std::log(b.value())) <=
          a.tail_bound_log + b.tail_bound_log);
}

TEST_CASE("singular series parallel merge is deterministic") {
    const LocalFactorReport a = singular_series(twin(), 20'000, 1);
    const LocalFactorReport b = singular_series(twin(), 20'000, 4);
    CHECK(a.truncated_product == b.truncated_product);
    CHECK(a.factors.size() == b.factors.size());
}

TEST_CASE("singular series rejects bad inputs") {
    CHECK_THROWS_WITH_AS(
        singular_series(AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 1}), 100),
        doctest::Contains("beta_2"), ArgumentError);
    // P_limit below an exceptional prime
    const AffineSystem wide(IntMatrix::from_rows({{1}, {1}}), {0, 14});  // exceptional {2, 7}
    CHECK_THROWS_AS(singular_series(wide, 3), ArgumentError);
}

TEST_CASE("alpha density fixed values") {
    CHECK(alpha_density(AffineSystem(IntMatrix::from_rows({{1}}), {0}), {4}) == mpq_class(1, 4));
    CHECK(alpha_density(twin(), {2, 2}) == mpq_class(1, 2));
    CHECK(alpha_density(twin(), {2, 3}) == mpq_class(1, 6));
    CHECK(alpha_density(twin(), {1, 1}) == 1);
}

TEST_CASE("alpha density is multiplicative and matches the direct count") {
    testing::SystemPool pool(809);
    std::mt19937_64 rng(810);
    std::uniform_int_distribution<int> kv(1, 10);
    int done = 0;
    while (done < 60) {
        const AffineSystem sys = pool.next(3, 3, 9);
        std::vector<mpz_class> k(sys.t());
        mpz_class m = 1;
        for (auto& ki : k) {
            ki = kv(rng);
            mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), ki.get_mpz_t());
        }
        if (m > 60) continue;
        ++done;
        const mpq_class alpha = alpha_density(sys, k);
        const std::uint64_t brute =
            testing::brute_congruence_count(sys.linear(), sys.constant(), k, m.get_ui());
        mpz_class md;
        mpz_pow_ui(md.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(sys.d()));
        mpq_class direct(mpz_class(brute), md);
        direct.canonicalize();
        CHECK(alpha == direct);
    }
}

TEST_SUITE_END();

TEST_CASE("beta_p at the top of the 31-bit range") {
    // 2^31 - 1 is prime; the identity pair has beta_p = 1 exactly at every p
    const AffineSystem id2(IntMatrix::from_rows({{1, 0}, {0, 1}}), {0, 0});
    CHECK(beta_p(id2, 2147483647ULL) == 1);
    // twin: beta_p = 1 - 1/(p-1)^2 at odd primes
    const AffineSystem tw(IntMatrix::from_rows({{1}, {1}}), {0, 2});
    const mpz_class p(2147483647L);
    mpq_class expect = 1 - mpq_class(1, (p - 1) * (p - 1));
    expect.canonicalize();
    CHECK(beta_p(tw, 2147483647ULL) == expect);
    CHECK_THROWS_AS(beta_p(tw, (std::uint64_t{1} << 31) + 11), ArgumentError);
}
