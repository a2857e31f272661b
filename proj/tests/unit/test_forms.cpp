#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "lpp/arithmetic.hpp"
#include "lpp/errors.hpp"
#include "lpp/forms.hpp"
#include "lpp/local_factors.hpp"
#include "oracles.hpp"

using namespace lpp;

namespace {

AffineSystem twin() { return AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 2}); }
AffineSystem ap3() {
    return AffineSystem(IntMatrix::from_rows({{1, 0}, {1, 1}, {1, 2}}), {0, 0, 0});
}
AffineSystem identity2() { return AffineSystem(IntMatrix::from_rows({{1, 0}, {0, 1}}), {0, 0}); }

const BetaOracle kBeta = [](const AffineSystem& s, std::uint64_t p) { return beta_p(s, p); };

}  // namespace

TEST_SUITE_BEGIN("forms");

TEST_CASE("construction rejects zero forms") {
    CHECK_THROWS_AS(AffineSystem(IntMatrix::from_rows({{0, 0}, {1, 0}}), {0, 1}), ArgumentError);
    CHECK_THROWS_AS(AffineSystem(IntMatrix::from_rows({{1}}), {0, 1}), ArgumentError);
}

TEST_CASE("evaluate") {
    CHECK(twin().evaluate({5}) == std::vector<mpz_class>{5, 7});
    CHECK(ap3().evaluate({3, 2}) == std::vector<mpz_class>{3, 5, 7});
    CHECK(twin().evaluate({0}) == twin().constant());
}

TEST_CASE("size norm") {
    CHECK(twin().size_norm(100, 0.0) == doctest::Approx(2.02));
    CHECK(ap3().size_norm(1000, 0.0) == doctest::Approx(6.0));
    const double b0 = twin().size_norm(100, 0.0);
    const double b1 = twin().size_norm(100, 1.0);
    CHECK(b0 / b1 == doctest::Approx(std::log(100.0)));
    CHECK_THROWS_AS(twin().size_norm(1, 0.0), ArgumentError);
}

TEST_CASE("finite complexity") {
    CHECK(finite_complexity(ap3()));
    // forms n1 and 2 n1 + 1: proportional linear parts
    CHECK_FALSE(finite_complexity(AffineSystem(IntMatrix::from_rows({{1, 0}, {2, 0}}), {0, 1})));
    // d = 1 pairs go through the (linear || constant) test
    CHECK(finite_complexity(twin()));
    CHECK_FALSE(finite_complexity(AffineSystem(IntMatrix::from_rows({{1}, {2}}), {0, 0})));
    CHECK_FALSE(finite_complexity(AffineSystem(IntMatrix::from_rows({{1}, {2}}), {1, 2})));
}

TEST_CASE("minors product") {
    CHECK(minors_product(ap3()) == 4);
    CHECK(minors_product(identity2()) == 1);
    CHECK(minors_product(twin()) == 1);
}

TEST_CASE("exceptional primes") {
    CHECK(exceptional_primes(ap3()) == std::vector<std::uint64_t>{2});
    CHECK(exceptional_primes(twin()) == std::vector<std::uint64_t>{2});
    CHECK(exceptional_primes(identity2()).empty());
    // a form that is a nonzero constant mod 3
    const AffineSystem constant_mod3(IntMatrix::from_rows({{3, 0}, {0, 1}}), {1, 0});
    const auto exc = exceptional_primes(constant_mod3);
    CHECK(std::find(exc.begin(), exc.end(), 3) != exc.end());
}

TEST_CASE("exceptional primes divide the minors product") {
    testing::SystemPool pool(101);
    int d2 = 0;
    while (d2 < 150) {
        const AffineSystem sys = pool.next_finite_complexity(3, 4, 9);
        const mpz_class q = minors_product(sys);
        if (sys.d() >= 2) {
            ++d2;
            for (std::uint64_t p : exceptional_primes(sys))
                CHECK(q % static_cast<unsigned long>(p) == 0);
        }
    }
}

TEST_CASE("non-exceptional local factors stay near 1") {
    // |beta_p - 1| <= 4^t / p^2 away from exceptional primes
    testing::SystemPool pool(202);
    for (int iter = 0; iter < 200; ++iter) {
        const AffineSystem sys = pool.next_finite_complexity(3, 3, 9);
        const auto exc = exceptional_primes(sys);
        const mpq_class bound_num(std::uint64_t{1} << (2 * sys.t()));
        for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 31ULL, 97ULL, 101ULL}) {
            if (std::find(exc.begin(), exc.end(), p) != exc.end()) continue;
            mpq_class diff = beta_p(sys, p) - 1;
            if (diff < 0) diff = -diff;
            CHECK(diff <= bound_num / (mpq_class(p) * p));
        }
    }
}

TEST_CASE("admissibility") {
    CHECK(is_admissible(ap3(), kBeta));
    CHECK(is_admissible(twin(), kBeta));
    CHECK_FALSE(is_admissible(AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 1}), kBeta));
    // infinite complexity is never admissible
    CHECK_FALSE(is_admissible(AffineSystem(IntMatrix::from_rows({{1}, {2}}), {0, 0}), kBeta));
}

TEST_CASE("subsystem") {
    const AffineSystem sub = subsystem(ap3(), {0, 2});
    CHECK(sub.t() == 2);
    CHECK(sub.linear() == IntMatrix::from_rows({{1, 0}, {1, 2}}));
    CHECK(subsystem(ap3(), {0, 1, 2}) == ap3());
    CHECK(subsystem(ap3(), {1}).t() == 1);
    CHECK_THROWS_AS(subsystem(ap3(), {}), ArgumentError);
    CHECK_THROWS_AS(subsystem(ap3(), {2, 1}), ArgumentError);
    CHECK_THROWS_AS(subsystem(ap3(), {3}), ArgumentError);
}

TEST_CASE("translate") {
    CHECK(translate(twin(), {0}) == twin());
    CHECK(translate(twin(), {10}).constant() == std::vector<mpz_class>{10, 12});
    CHECK(translate(ap3(), {1, 1}).constant() == std::vector<mpz_class>{1, 2, 3});
}

TEST_CASE("translate composes with evaluate") {
    testing::SystemPool pool(303);
    std::mt19937_64 rng(304);
    std::uniform_int_distribution<int> v(-50, 50);
    for (int iter = 0; iter < 100; ++iter) {
        const AffineSystem sys = pool.next(3, 4, 9);
        std::vector<mpz_class> shift(sys.d()), n(sys.d()), sum(sys.d());
        for (std::size_t j = 0; j < sys.d(); ++j) {
            shift[j] = v(rng);
            n[j] = v(rng);
            sum[j] = shift[j] + n[j];
        }
        CHECK(translate(sys, shift).evaluate(n) == sys.evaluate(sum));
    }
}

TEST_CASE("wtrick on the twin system") {
    const WTrickDecomposition dec = wtrick(twin(), 3);
    CHECK(dec.W == 6);
    CHECK(dec.Q == 1);
    CHECK(dec.W_tilde == 6);
    REQUIRE(dec.residues.size() == 1);
    CHECK(dec.residues[0].a == std::vector<std::int64_t>{5});
    CHECK(dec.residues[0].b == std::vector<mpz_class>{5, 1});
}

TEST_CASE("wtrick defining identity at the all-ones point") {
    testing::SystemPool pool(404);
    int done = 0;
    while (done < 40) {
        const AffineSystem sys = pool.next_finite_complexity(2, 3, 4);
        mpz_class wt = lpp::primorial(3) * minors_product(sys);
        mpz_class tuples;
        mpz_pow_ui(tuples.get_mpz_t(), wt.get_mpz_t(), static_cast<unsigned long>(sys.d()));
        if (tuples > 100'000) continue;
        ++done;
        const WTrickDecomposition dec = wtrick(sys, 3);
        const std::vector<mpz_class> ones(sys.d(), 1);
        for (const auto& res : dec.residues) {
            std::vector<mpz_class> arg(sys.d());
            for (std::size_t j = 0; j < sys.d(); ++j)
                arg[j] = dec.W_tilde + res.a[j];  // W~ * 1 + a
            const auto direct = sys.evaluate(arg);
            const auto reduced = res.reduced.evaluate(ones);
            for (std::size_t i = 0; i < sys.t(); ++i)
                CHECK(dec.W_tilde * reduced[i] + res.b[i] == direct[i]);
            // stored residues really are coprime
            for (std::size_t i = 0; i < sys.t(); ++i) {
                std::vector<mpz_class> pa(sys.d());
                for (std::size_t j = 0; j < sys.d(); ++j) pa[j] = res.a[j];
                mpz_class g;
                const mpz_class v = sys.evaluate(pa)[i];
                mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), dec.W_tilde.get_mpz_t());
                CHECK(g == 1);
            }
        }
    }
}

TEST_CASE("wtrick honors the enumeration budget") {
    CHECK_THROWS_AS(wtrick(ap3(), 13), ResourceError);  // W~ = 30030*4, squared
}

TEST_CASE("digest is stable and content-sensitive") {
    CHECK(twin().digest() == twin().digest());
    CHECK(twin().digest() != ap3().digest());
    CHECK(twin().digest().size() == 16);
}

TEST_SUITE_END();
