// Acceptance suite: one numbered check per criterion, each printing a single
// PASS/FAIL line with the measured values and enforcing its runtime budget.
// Run with no arguments for everything, or with a list of criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lpp/arithmetic.hpp"
#include "lpp/cli.hpp"
#include "lpp/counting.hpp"
#include "lpp/errors.hpp"
#include "lpp/exact_linalg.hpp"
#include "lpp/forms.hpp"
#include "lpp/geometry.hpp"
#include "lpp/json_io.hpp"
#include "lpp/local_factors.hpp"
#include "lpp/majorant.hpp"
#include "lpp/sqfree.hpp"

#include "../unit/oracles.hpp"

using namespace lpp;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

AffineSystem twin() { return AffineSystem(IntMatrix::from_rows({{1}, {1}}), {0, 2}); }
AffineSystem ap3() {
    return AffineSystem(IntMatrix::from_rows({{1, 0}, {1, 1}, {1, 2}}), {0, 0, 0});
}

ConvexBody interval1(long long lo, long long hi) {
    return ConvexBody(1, std::max(std::llabs(lo), std::llabs(hi)),
                      {{{mpq_class(-1)}, mpq_class(static_cast<long>(-lo))},
                       {{mpq_class(1)}, mpq_class(static_cast<long>(hi))}});
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 1. beta_p equals the brute-force average on random systems, exactly.
Outcome criterion_01() {
    testing::SystemPool pool(20260811);
    std::uint64_t checked = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const AffineSystem sys = pool.next(3, 4, 9);
        for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
            if (beta_p(sys, p) != beta_p_bruteforce(sys, p))
                return {false, "mismatch at p=" + std::to_string(p)};
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " exact comparisons over 200 systems"};
}

// 2. Example 1 and Example 2 closed forms equal beta_p, exactly.
Outcome criterion_02() {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = 2; p <= 101; ++p)
        if (is_prime_u64(p)) primes.push_back(p);

    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<long long> qv(1, 50);
    std::uint64_t checked = 0;
    for (int k = 1; k <= 4; ++k) {
        for (int rep = 0; rep < 40; ++rep) {
            std::vector<long long> q(k);
            for (auto& x : q) x = qv(rng);
            if (rep == 0) std::fill(q.begin(), q.end(), 2);
            if (rep == 1)
                for (int i = 0; i < k; ++i) q[i] = 7 * (i + 1);  // p | q_i cases at p = 7
            IntMatrix linear(k, 2);
            for (int i = 0; i < k; ++i) {
                linear(i, 0) = 1;
                linear(i, 1) = static_cast<long>(q[i]);
            }
            const AffineSystem sys(std::move(linear), std::vector<mpz_class>(k, 0));
            for (std::uint64_t p : primes) {
                if (beta_p_example1(q, p) != beta_p(sys, p))
                    return {false, "example 1 mismatch at p=" + std::to_string(p)};
                ++checked;
            }
        }
    }
    const struct {
        int k;
        std::uint64_t q;
    } grid2[] = {{1, 1}, {1, 2}, {1, 5}, {1, 50},  {2, 2},  {2, 6},  {2, 14}, {2, 50},
                 {3, 6}, {3, 12}, {3, 30}, {3, 42}, {4, 210}, {4, 420}};
    for (const auto& g : grid2) {
        IntMatrix linear(g.k + 1, 2);
        linear(0, 0) = 0;
        linear(0, 1) = 1;
        for (int i = 1; i <= g.k; ++i) {
            linear(i, 0) = 1;
            linear(i, 1) = static_cast<long>((i - 1) * g.q);
        }
        const AffineSystem sys(std::move(linear), std::vector<mpz_class>(g.k + 1, 0));
        for (std::uint64_t p : primes) {
            if (beta_p_example2(g.k, g.q, p) != beta_p(sys, p))
                return {false, "example 2 mismatch at p=" + std::to_string(p)};
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " exact closed-form comparisons"};
}

// 3. CRT local product identity, exactly, on random admissible systems.
Outcome criterion_03() {
    testing::SystemPool pool(777);
    const BetaOracle oracle = [](const AffineSystem& s, std::uint64_t p) {
        return beta_p(s, p);
    };
    int admissible = 0;
    std::uint64_t checked = 0;
    while (admissible < 50) {
        const AffineSystem sys = pool.next(3, 4, 9);
        try {
            if (!is_admissible(sys, oracle)) continue;
        } catch (const ArgumentError&) {
            continue;
        }
        ++admissible;
        for (std::uint64_t wt : {2, 6, 30, 60}) {
            if (std::pow(static_cast<double>(wt), static_cast<double>(sys.d())) > 1e7) continue;
            const auto rep = crt_local_product_check(sys, wt);
            if (!rep.equal)
                return {false, "identity fails at W~=" + std::to_string(wt)};
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " exact identities over 50 admissible systems"};
}

// 4. Exact W-trick partition on twin and AP3, with the dropped mass accounted.
Outcome criterion_04() {
    const PrimeTable table = PrimeTable::sieve(40'000);
    const auto t = wtrick_identity_check(table, twin(), 3, 10'000);
    if (!t.ok())
        return {false, "twin: partition=" + std::to_string(t.partition_exact) +
                           " dropped=" + std::to_string(t.dropped_matches)};
    const double hand = std::log(3.0) * std::log(5.0);  // the only dropped pair, (3,5)
    if (std::fabs(t.dropped_mass - hand) > 1e-9)
        return {false, "twin dropped mass " + fmt(t.dropped_mass) + " != " + fmt(hand)};
    const auto a = wtrick_identity_check(table, ap3(), 3, 10'000);
    if (!a.ok())
        return {false, "ap3: partition=" + std::to_string(a.partition_exact) +
                           " dropped=" + std::to_string(a.dropped_matches)};
    return {true, "twin dropped mass log3*log5=" + fmt(t.dropped_mass) +
                      ", ap3 dropped mass " + fmt(a.dropped_mass)};
}

// 5. Congruence counting equals exhaustive enumeration, exactly.
Outcome criterion_05() {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<int> dim(1, 3), rows(1, 4), coeff(-9, 9), kpick(1, 12);
    int done = 0;
    while (done < 500) {
        const int d = dim(rng), t = rows(rng);
        IntMatrix a(t, d);
        std::vector<mpz_class> c(t), k(t);
        mpz_class m = 1;
        for (int i = 0; i < t; ++i) {
            for (int j = 0; j < d; ++j) a(i, j) = coeff(rng);
            c[i] = coeff(rng);
            k[i] = kpick(rng);
            mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), k[i].get_mpz_t());
        }
        if (m > 60) continue;
        ++done;
        if (congruence_solution_count(a, c, k, m) !=
            testing::brute_congruence_count(a, c, k, m.get_ui()))
            return {false, "mismatch at instance " + std::to_string(done)};
    }
    return {true, "500 exact counts, m <= 60"};
}

// 6. Twin-prime main term at N = 1e6 and the twin constant.
Outcome criterion_06() {
    const PrimeTable table = PrimeTable::sieve(1'000'002);
    const auto emp = empirical_sum(table, twin(), interval1(1, 1'000'000),
                                   {{WeightKind::PrimeLog, {}}});
    const LocalFactorReport series = singular_series(twin(), 100'000);
    const double ratio = emp.sum / (1e6 * series.value());
    if (ratio < 0.95 || ratio > 1.05) return {false, "ratio " + fmt(ratio)};
    const double constant_gap = std::fabs(series.value() - 1.3203236);
    if (constant_gap > 1e-4)
        return {false, "series " + fmt(series.value()) + " off by " + fmt(constant_gap)};
    return {true, "ratio " + fmt(ratio) + ", series " + fmt(series.value())};
}

// 7. AP3 main term over the triangle at N = 2e4.
Outcome criterion_07() {
    const std::uint64_t N = 20'000;
    const PrimeTable table = PrimeTable::sieve(N + 2);
    const ConvexBody body(2, static_cast<long long>(N),
                          {{{mpq_class(-1), mpq_class(0)}, mpq_class(-1)},
                           {{mpq_class(0), mpq_class(-1)}, mpq_class(-1)},
                           {{mpq_class(1), mpq_class(2)}, mpq_class(static_cast<long>(N))}});
    const auto rep = compare(table, ap3(), body, 10'000, PredictionMode::Volume,
                             {{WeightKind::PrimeLog, {}}}, 16);
    if (!rep.ratio_defined || rep.ratio < 0.85 || rep.ratio > 1.15)
        return {false, "ratio " + fmt(rep.ratio)};
    return {true, "ratio " + fmt(rep.ratio) + " over " +
                      std::to_string(rep.lattice_count) + " points"};
}

// 8. Example 2 driver at k=3, q=6, N=1e5.
Outcome criterion_08() {
    const PrimeTable table = PrimeTable::sieve(100'000);
    const auto rep = example_prime_step(table, 3, 6, 100'000, 10'000, 16);
    if (!rep.closed_form_mismatches.empty())
        return {false, "closed form disagreed with beta_p"};
    const double ratio = rep.comparison.ratio;
    if (!rep.comparison.ratio_defined || ratio < 0.8 || ratio > 1.2)
        return {false, "ratio " + fmt(ratio)};
    return {true, "ratio " + fmt(ratio)};
}

// 9. Mirsky density of squarefree shifted primes at 1e6.
Outcome criterion_09() {
    const PrimeTable table = PrimeTable::sieve(1'000'000);
    std::uint64_t total = 0, good = 0;
    for (std::uint64_t p : table.primes()) {
        ++total;
        if (table.is_squarefree(p - 1)) ++good;
    }
    const double empirical = static_cast<double>(good) / static_cast<double>(total);
    const auto mirsky = mirsky_density(100'000);
    const double rel = std::fabs(empirical - mirsky.value) / mirsky.value;
    if (rel > 0.01)
        return {false, "empirical " + fmt(empirical) + " vs " + fmt(mirsky.value)};
    return {true, "empirical " + fmt(empirical) + " vs product " + fmt(mirsky.value) +
                      " (rel " + fmt(rel) + ")"};
}

// 10. Single-form consistency: C truncation vs Mirsky, and the desk-scale count.
Outcome criterion_10() {
    const AffineSystem single(IntMatrix::from_rows({{1}}), {0});
    const auto cpsi = c_psi_truncated(single, 100, 10'000);
    const auto mirsky = mirsky_density(10'000);
    const double gap = std::fabs(cpsi.value - mirsky.value);
    if (gap > 1e-3)
        return {false, "C " + fmt(cpsi.value) + " vs Mirsky " + fmt(mirsky.value)};
    const PrimeTable table = PrimeTable::sieve(1'000'002);
    const auto rep =
        sqfree_compare(table, single, interval1(1, 1'000'000), 100, 10'000, 16);
    if (!rep.ratio_defined || rep.ratio < 0.97 || rep.ratio > 1.03)
        return {false, "ratio " + fmt(rep.ratio)};
    return {true, "C-Mirsky gap " + fmt(gap) + ", ratio " + fmt(rep.ratio)};
}

// 11. Squarefree-shifted twin system (n, n+2) at N = 1e6, as stated.
Outcome criterion_11() {
    const PrimeTable table = PrimeTable::sieve(1'000'005);
    const auto rep = sqfree_compare(table, twin(), interval1(1, 1'000'000), 100, 10'000, 16);
    std::ostringstream detail;
    detail << "ratio " << fmt(rep.ratio) << " (empirical " << fmt(rep.empirical)
           << ", C_trunc " << fmt(rep.predicted / rep.volume_value) << ")";
    // Diagnostic, not part of the criterion: the nearest non-degenerate
    // two-form instance behaves as intended.
    const AffineSystem twin4(IntMatrix::from_rows({{1}, {1}}), {0, 4});
    const auto alt = sqfree_compare(table, twin4, interval1(1, 1'000'000), 100, 10'000, 16);
    detail << "; non-criterion diagnostic (n, n+4): ratio " << fmt(alt.ratio);
    const bool pass = rep.ratio_defined && rep.ratio >= 0.85 && rep.ratio <= 1.15;
    if (!pass) {
        detail << " -- for (n, n+2) one of n, n+2 is divisible by 4, so C(Psi) = 0 "
                  "exactly and the only term is n=1; see the analysis notes";
    }
    return {pass, detail.str()};
}

// 12. Majorant suite: domination, exact log R on primes beyond R, GPY average.
Outcome criterion_12() {
    const Cutoff chi = cosine_squared_cutoff();
    const PrimeTable table = PrimeTable::sieve(100'002);
    std::ostringstream detail;
    bool pass = true;

    for (std::uint64_t N : {std::uint64_t{10'000}, std::uint64_t{100'000}})
        for (double gamma : {0.1, 0.2, 0.5}) {
            const auto rep = domination_check(table, chi, N, gamma);
            if (!rep.violations.empty()) {
                pass = false;
                detail << "domination violated at N=" << N << " gamma=" << gamma << "; ";
            }
        }
    detail << "domination grid clean; ";

    const double R = std::pow(1e5, 0.2);  // 10
    const double logR = std::log(R);
    bool exact = true;
    for (std::uint64_t p : table.primes())
        if (p <= 100'000 && static_cast<double>(p) > R &&
            lambda_chi_r(table, chi, R, p) != logR)
            exact = false;
    if (!exact) {
        pass = false;
        detail << "lambda_chi_R(p) != log R beyond R; ";
    } else {
        detail << "lambda_chi_R = log R exactly on primes in (R, 1e5]; ";
    }

    const double Rlfc = std::pow(1e5, 0.1);
    const auto lfc = linear_forms_average(table, chi, twin(), 100'000, Rlfc, 10'000);
    detail << "twin GPY ratio " << fmt(lfc.ratio) << " at R=Z^0.1=" << fmt(Rlfc);
    if (std::fabs(lfc.ratio - 1.0) > 0.25) {
        pass = false;
        detail << " -- outside 25%: at R=3.16 only divisors {1,2,3} enter the truncated "
                  "sum and the exact average is ~0.39 of the product; the GPY o(1) is "
                  "O(1/log R); see the analysis notes";
    }
    return {pass, detail.str()};
}

// 13. Geometry suite: exact enumeration, volume error accounting, sandwich.
Outcome criterion_13() {
    std::mt19937_64 rng(1313);
    // fixed exhaustive cases at the stated scale
    {
        const ConvexBody tri(3, 50,
                             {{{mpq_class(-1), mpq_class(0), mpq_class(0)}, mpq_class(0)},
                              {{mpq_class(0), mpq_class(-1), mpq_class(0)}, mpq_class(0)},
                              {{mpq_class(0), mpq_class(0), mpq_class(-1)}, mpq_class(0)},
                              {{mpq_class(1), mpq_class(1), mpq_class(1)}, mpq_class(50)}});
        const auto pts = lattice_points(tri);
        const auto brute = testing::brute_lattice_points(tri);
        if (pts.size() != brute.size())
            return {false, "3d simplex enumeration mismatch"};
    }
    std::uint64_t enumerated = 0;
    for (int iter = 0; iter < 100; ++iter) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const long long N = d == 3 ? 4 + static_cast<long long>(rng() % 12)
                                   : 4 + static_cast<long long>(rng() % 47);
        const ConvexBody body = testing::random_body(rng, d, N, 3);

        const auto fast = lattice_points(body);
        const auto brute = testing::brute_lattice_points(body);
        if (fast.size() != brute.size())
            return {false, "enumeration mismatch at iteration " + std::to_string(iter)};
        std::set<std::vector<std::int64_t>> fset;
        for (const auto& p : fast) {
            std::vector<std::int64_t> v;
            for (const auto& x : p) v.push_back(x.get_si());
            fset.insert(v);
        }
        for (const auto& p : brute)
            if (!fset.count(p)) return {false, "missing point at iteration " + std::to_string(iter)};
        enumerated += fast.size();

        const auto vol = volume(body, 2);
        const auto cells = box_decomposition(body, 1);
        const double count = static_cast<double>(fast.size());
        if (std::fabs(count - vol.value) >
            vol.error_bound + static_cast<double>(cells.boundary.size()) + 1e-9)
            return {false, "volume error bound violated at iteration " + std::to_string(iter)};

        const long long M = 1 + static_cast<long long>(rng() % 4);
        const auto dec = box_decomposition(body, M);
        std::uint64_t md = 1;
        for (int j = 0; j < d; ++j) md *= static_cast<std::uint64_t>(M);
        const std::uint64_t npts = fast.size();
        if (dec.inner.size() * md > npts)
            return {false, "sandwich lower bound violated"};
        if (npts > (dec.inner.size() + dec.boundary.size()) * md)
            return {false, "sandwich upper bound violated"};
    }
    return {true, "100 random polytopes, " + std::to_string(enumerated) +
                      " points cross-checked"};
}

// 14. Byte-identical reports for identical configurations.
Outcome criterion_14() {
    const auto dir = std::filesystem::temp_directory_path();
    const auto sys_path = (dir / "lpp_acc_twin.json").string();
    const auto body_path = (dir / "lpp_acc_body.json").string();
    {
        std::ofstream f(sys_path);
        f << R"({"d": 1, "t": 2, "linear": [[1],[1]], "constant": [0, 2]})";
        std::ofstream g(body_path);
        g << R"({"d": 1, "N": 5000, "halfspaces": [{"normal": ["-1"], "offset": "-1"}]})";
    }
    auto run_once = [&](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"lpp"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = lpp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return std::pair<int, std::string>(code, out.str());
    };
    const std::vector<std::vector<std::string>> configs = {
        {"count", "--system", sys_path, "--body", body_path, "--plimit", "2000",
         "--workers", "2"},
        {"series", "--system", sys_path, "--plimit", "5000"},
        {"sqfree", "--system", sys_path, "--body", body_path, "--alimit", "30",
         "--plimit", "500"},
        {"wtrick", "--system", sys_path, "--w", "3", "--M", "2000"},
    };
    for (const auto& cfg : configs) {
        const auto a = run_once(cfg);
        const auto b = run_once(cfg);
        if (a.first != b.first || a.second != b.second)
            return {false, "outputs differ for subcommand " + cfg[0]};
        if (a.second.empty()) return {false, "empty report for subcommand " + cfg[0]};
    }
    return {true, std::to_string(configs.size()) + " configurations byte-identical"};
}

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> cs = {
        {1, "beta_p equals the brute-force oracle", 30, criterion_01},
        {2, "example closed forms equal beta_p", 30, criterion_02},
        {3, "CRT local product identity", 120, criterion_03},
        {4, "exact W-trick partition", 120, criterion_04},
        {5, "congruence counting oracle", 60, criterion_05},
        {6, "twin-prime main term", 60, criterion_06},
        {7, "AP3 main term", 300, criterion_07},
        {8, "prime-step progressions driver", 300, criterion_08},
        {9, "Mirsky density", 60, criterion_09},
        {10, "single-form squarefree-shift consistency", 120, criterion_10},
        {11, "two-form squarefree-shift desk check", 300, criterion_11},
        {12, "majorant suite", 120, criterion_12},
        {13, "geometry suite", 120, criterion_13},
        {14, "report determinism", 60, criterion_14},
    };
    return cs;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria()) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        if (secs > c.budget_seconds) {
            outcome.pass = false;
            outcome.detail += " [over budget " + fmt(c.budget_seconds) + "s]";
        }
        std::printf("[%s] %02d %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", c.id,
                    c.title, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
