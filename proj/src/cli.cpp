#include "lpp/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpp/arithmetic.hpp"
#include "lpp/counting.hpp"
#include "lpp/errors.hpp"
#include "lpp/json_io.hpp"
#include "lpp/local_factors.hpp"
#include "lpp/majorant.hpp"
#include "lpp/sqfree.hpp"

namespace lpp::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string system_path;
    std::string body_path;
    std::uint64_t N = 1000;
    std::uint64_t M = 0;  // 0: use floor(N/64), a tuning default
    std::uint64_t w = 3;
    std::uint64_t P_limit = 10000;
    std::uint64_t A_limit = 100;
    std::uint64_t W_tilde = 6;
    std::uint64_t Z = 100000;
    std::uint64_t p = 2;
    int k = 2;
    std::uint64_t q = 2;
    double gamma = 0.1;
    std::uint64_t resolution = 64;
    int workers = 1;
    std::string format = "json";
    std::string spf_cache;
    std::string terms_csv;
    std::string mode = "volume";
    std::string weight = "lambda-prime";
    bool timings = false;
};

json knobs_json(const RunConfig& c) {
    return json{{"system", c.system_path}, {"body", c.body_path},  {"N", c.N},
                {"M", c.M},                {"w", c.w},             {"plimit", c.P_limit},
                {"alimit", c.A_limit},     {"wtilde", c.W_tilde},  {"Z", c.Z},
                {"p", c.p},                {"k", c.k},             {"q", c.q},
                {"gamma", c.gamma},        {"resolution", c.resolution},
                {"workers", c.workers},    {"format", c.format},   {"spf_cache", c.spf_cache},
                {"mode", c.mode},          {"weight", c.weight},   {"timings", c.timings}};
}

PrimeTable acquire_table(const RunConfig& c, std::uint64_t limit, std::ostream& err) {
    limit = std::max<std::uint64_t>(limit, 2);
    if (!c.spf_cache.empty()) {
        if (auto t = PrimeTable::load_spf_cache(c.spf_cache, limit)) {
            err << "# spf cache hit: " << c.spf_cache << " limit=" << t->limit() << "\n";
            return std::move(*t);
        }
    }
    PrimeTable t = PrimeTable::sieve(limit);
    if (!c.spf_cache.empty()) {
        t.save_spf_cache(c.spf_cache);
        err << "# spf cache written: " << c.spf_cache << " limit=" << limit << "\n";
    }
    return t;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json comparison_json(const ComparisonReport& r, bool timings) {
    json j{{"digest", r.system_digest},
           {"mode", r.mode},
           {"empirical", r.empirical},
           {"predicted", r.predicted},
           {"P_limit", r.P_limit},
           {"tail_bound_log", r.tail_bound_log},
           {"lattice_count", r.lattice_count},
           {"negative_skips", r.negative_skips},
           {"volume", r.volume_value},
           {"volume_error", r.volume_error},
           {"runtime_ms", timings ? r.runtime_ms : 0},
           {"workers", r.workers}};
    if (r.ratio_defined)
        j["ratio"] = r.ratio;
    else
        j["ratio"] = nullptr;
    return j;
}

std::string comparison_csv(const ComparisonReport& r, bool timings) {
    std::ostringstream os;
    os << "empirical,predicted,ratio,P_limit,tail_bound_log,lattice_count,runtime_ms,workers\n"
       << fmt_double(r.empirical) << ',' << fmt_double(r.predicted) << ','
       << (r.ratio_defined ? fmt_double(r.ratio) : "") << ',' << r.P_limit << ','
       << fmt_double(r.tail_bound_log) << ',' << r.lattice_count << ','
       << (timings ? r.runtime_ms : 0) << ',' << r.workers << "\n";
    return os.str();
}

void emit(const RunConfig& c, json payload, std::ostream& out,
          const ComparisonReport* table_row = nullptr) {
    if (c.format == "csv" && table_row != nullptr) {
        out << comparison_csv(*table_row, c.timings);
        return;
    }
    if (c.format == "csv") {
        // non-tabular reports degrade to key,value rows
        out << "key,value\n";
        for (auto it = payload.begin(); it != payload.end(); ++it)
            out << it.key() << ',' << it.value().dump() << "\n";
        return;
    }
    json envelope{{"command", c.command}, {"knobs", knobs_json(c)}, {"report", payload}};
    out << envelope.dump(2) << "\n";
}

PredictionMode parse_mode(const std::string& mode) {
    if (mode == "volume") return PredictionMode::Volume;
    if (mode == "beta-infinity" || mode == "beta_infinity") return PredictionMode::BetaInfinity;
    throw ArgumentError("unknown mode: " + mode);
}

std::vector<WeightSpec> parse_weight(const std::string& weight) {
    if (weight == "lambda") return {{WeightKind::VonMangoldt, {}}};
    if (weight == "lambda-prime") return {{WeightKind::PrimeLog, {}}};
    if (weight == "F" || weight == "sqfree-shift") return {{WeightKind::SqfreeShift, {}}};
    throw ArgumentError("unknown weight: " + weight);
}

int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream&) {
    const AffineSystem sys = load_system(c.system_path);
    json j{{"digest", sys.digest()},
           {"d", sys.d()},
           {"t", sys.t()},
           {"Q", minors_product(sys).get_str()},
           {"size_norm_B0", sys.size_norm(std::max<std::uint64_t>(c.N, 2), 0.0)}};
    j["finite_complexity"] = sys.t() >= 2 ? finite_complexity(sys) : true;
    json exc = json::array();
    for (std::uint64_t p : exceptional_primes(sys)) exc.push_back(p);
    j["exceptional"] = exc;
    j["admissible"] = is_admissible(sys, [](const AffineSystem& s, std::uint64_t p) {
        return beta_p(s, p);
    });
    emit(c, std::move(j), out);
    return 0;
}

int cmd_beta(const RunConfig& c, std::ostream& out, std::ostream&) {
    const AffineSystem sys = load_system(c.system_path);
    const mpq_class b = beta_p(sys, c.p);
    json j{{"digest", sys.digest()}, {"p", c.p}, {"beta", rational_to_json(b)},
           {"value", b.get_d()}};
    emit(c, std::move(j), out);
    return 0;
}

int cmd_series(const RunConfig& c, std::ostream& out, std::ostream&) {
    const AffineSystem sys = load_system(c.system_path);
    const LocalFactorReport rep = singular_series(sys, c.P_limit, c.workers);
    json factors = json::object();
    for (const auto& [p, b] : rep.factors) factors[std::to_string(p)] = rational_to_json(b);
    json exc = json::array();
    for (std::uint64_t p : rep.exceptional) exc.push_back(p);
    json j{{"digest", rep.system_digest},
           {"P_limit", rep.P_limit},
           {"exceptional", exc},
           {"product", rational_to_json(rep.truncated_product)},
           {"value", rep.value()},
           {"tail_bound_log", rep.tail_bound_log},
           {"tail_constant", "4^t"},
           {"factors", factors}};
    emit(c, std::move(j), out);
    return 0;
}

int cmd_count(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const AffineSystem sys = load_system(c.system_path);
    const ConvexBody body = load_body(c.body_path);
    const bool f_weight = c.weight == "F" || c.weight == "sqfree-shift";
    const std::uint64_t limit = required_sieve_limit(sys, body, f_weight);
    const PrimeTable table = acquire_table(c, limit, err);
    const ComparisonReport rep = compare(table, sys, body, c.P_limit, parse_mode(c.mode),
                                         parse_weight(c.weight), c.resolution, c.workers);
    emit(c, comparison_json(rep, c.timings), out, &rep);
    return 0;
}

int cmd_wtrick(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const AffineSystem sys = load_system(c.system_path);
    const std::uint64_t M = c.M > 0 ? c.M : std::max<std::uint64_t>(c.N / 64, 1);
    // sieve limit for the box [1, M]^d
    std::vector<Halfspace> hs;
    for (std::size_t j = 0; j < sys.d(); ++j) {
        Halfspace lo{std::vector<mpq_class>(sys.d(), 0), mpq_class(-1)};
        lo.normal[j] = -1;
        hs.push_back(std::move(lo));
    }
    const ConvexBody box(sys.d(), static_cast<long long>(M), std::move(hs));
    const PrimeTable table = acquire_table(c, required_sieve_limit(sys, box, false), err);
    const WTrickCheckReport rep = wtrick_identity_check(table, sys, c.w, M, c.workers);
    json j{{"digest", sys.digest()},
           {"w", rep.w},
           {"M", rep.M},
           {"W_tilde", rep.W_tilde.get_str()},
           {"lhs", rep.lhs},
           {"partition_total", rep.partition_total},
           {"coprime_mass", rep.coprime_mass},
           {"dropped_mass", rep.dropped_mass},
           {"dropped_expected", rep.dropped_expected},
           {"classes", rep.classes},
           {"coprime_classes", rep.coprime_classes},
           {"partition_exact", rep.partition_exact},
           {"dropped_matches", rep.dropped_matches},
           {"reduced_identity_ok", rep.reduced_identity_ok},
           {"ok", rep.ok()}};
    emit(c, std::move(j), out);
    return rep.ok() ? 0 : 1;
}

int cmd_crt_check(const RunConfig& c, std::ostream& out, std::ostream&) {
    const AffineSystem sys = load_system(c.system_path);
    const CrtCheckReport rep = crt_local_product_check(sys, c.W_tilde);
    json j{{"digest", sys.digest()},
           {"W_tilde", rep.W_tilde},
           {"lhs", rational_to_string(rep.lhs)},
           {"rhs", rational_to_string(rep.rhs)},
           {"equal", rep.equal}};
    emit(c, std::move(j), out);
    return rep.equal ? 0 : 1;
}

int cmd_example_ap(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const double logN = std::log(static_cast<double>(c.N));
    const auto qk = static_cast<std::uint64_t>(
        std::floor(std::pow(logN, static_cast<double>(c.k))));
    const PrimeTable table = acquire_table(c, c.N * (1 + qk), err);
    const ExampleReport rep =
        example_ap_positions(table, c.k, c.N, c.P_limit, c.resolution, c.workers);
    json j = comparison_json(rep.comparison, c.timings);
    j["q"] = rep.q;
    j["closed_form_mismatches"] = rep.closed_form_mismatches;
    emit(c, std::move(j), out, &rep.comparison);
    return rep.closed_form_mismatches.empty() ? 0 : 1;
}

int cmd_example_prime_step(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const PrimeTable table = acquire_table(c, c.N, err);
    const ExampleReport rep =
        example_prime_step(table, c.k, c.q, c.N, c.P_limit, c.resolution, c.workers);
    json j = comparison_json(rep.comparison, c.timings);
    j["q"] = rep.q;
    j["closed_form_mismatches"] = rep.closed_form_mismatches;
    emit(c, std::move(j), out, &rep.comparison);
    return rep.closed_form_mismatches.empty() ? 0 : 1;
}

int cmd_majorant(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const PrimeTable table = acquire_table(c, c.N, err);
    const Cutoff chi = cosine_squared_cutoff();
    const DominationReport rep = domination_check(table, chi, c.N, c.gamma);
    json j{{"N", rep.N},
           {"gamma", rep.gamma},
           {"R", rep.R},
           {"primes_checked", rep.primes_checked},
           {"violations", rep.violations},
           {"c_chi", chi.c_chi}};
    emit(c, std::move(j), out);
    return rep.violations.empty() ? 0 : 1;
}

int cmd_lfc(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const AffineSystem sys = load_system(c.system_path);
    std::vector<Halfspace> hs;
    for (std::size_t j = 0; j < sys.d(); ++j) {
        Halfspace lo{std::vector<mpq_class>(sys.d(), 0), mpq_class(-1)};
        lo.normal[j] = -1;
        hs.push_back(std::move(lo));
    }
    const ConvexBody box(sys.d(), static_cast<long long>(c.Z), std::move(hs));
    const PrimeTable table = acquire_table(c, required_sieve_limit(sys, box, false), err);
    const Cutoff chi = cosine_squared_cutoff();
    const double R = std::pow(static_cast<double>(c.Z), c.gamma);
    const LfcReport rep = linear_forms_average(table, chi, sys, c.Z, R, c.P_limit, c.workers);
    json j{{"digest", sys.digest()}, {"Z", rep.Z},
           {"R", rep.R},             {"average", rep.average},
           {"predicted", rep.predicted}, {"ratio", rep.ratio},
           {"P_limit", rep.P_limit}, {"exceptional_x", rep.exceptional_x},
           {"c_chi", chi.c_chi}};
    emit(c, std::move(j), out);
    return 0;
}

int cmd_sqfree(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const AffineSystem sys = load_system(c.system_path);
    const ConvexBody body = load_body(c.body_path);
    const PrimeTable table = acquire_table(c, required_sieve_limit(sys, body, true), err);
    const ComparisonReport rep =
        sqfree_compare(table, sys, body, c.A_limit, c.P_limit, c.resolution, c.workers);
    if (!c.terms_csv.empty()) {
        const CpsiResult cpsi = c_psi_truncated(sys, c.A_limit, c.P_limit, c.workers, true);
        std::ofstream f(c.terms_csv, std::ios::trunc);
        if (!f) throw ArgumentError("cannot open terms csv: " + c.terms_csv);
        for (std::size_t i = 0; i < sys.t(); ++i) f << 'a' << i + 1 << ',';
        f << "alpha,beta_product,term\n";
        for (const auto& term : cpsi.terms) {
            for (std::uint64_t ai : term.a) f << ai << ',';
            f << fmt_double(term.alpha) << ',' << fmt_double(term.beta_product) << ','
              << fmt_double(term.term) << "\n";
        }
        err << "# per-a terms written: " << c.terms_csv << "\n";
    }
    json j = comparison_json(rep, c.timings);
    j["A_limit"] = c.A_limit;
    emit(c, std::move(j), out, &rep);
    return 0;
}

int cmd_mirsky(const RunConfig& c, std::ostream& out, std::ostream&) {
    const MirskyResult rep = mirsky_density(c.P_limit);
    json j{{"P_limit", rep.P_limit}, {"value", rep.value}, {"tail_bound", rep.tail_bound}};
    emit(c, std::move(j), out);
    return 0;
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.command == "analyze") return cmd_analyze(c, out, err);
    if (c.command == "beta") return cmd_beta(c, out, err);
    if (c.command == "series") return cmd_series(c, out, err);
    if (c.command == "count") return cmd_count(c, out, err);
    if (c.command == "wtrick") return cmd_wtrick(c, out, err);
    if (c.command == "crt-check") return cmd_crt_check(c, out, err);
    if (c.command == "example-ap") return cmd_example_ap(c, out, err);
    if (c.command == "example-prime-step") return cmd_example_prime_step(c, out, err);
    if (c.command == "majorant") return cmd_majorant(c, out, err);
    if (c.command == "lfc") return cmd_lfc(c, out, err);
    if (c.command == "sqfree") return cmd_sqfree(c, out, err);
    if (c.command == "mirsky") return cmd_mirsky(c, out, err);
    throw ArgumentError("unknown command: " + c.command);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"local factors, singular series, and prime-tuple counts for "
                 "systems of affine-linear forms"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--N", cfg.N, "scale parameter")->envname("LPP_N");
        sub->add_option("--M", cfg.M, "box side (0: floor(N/64))")->envname("LPP_M");
        sub->add_option("--w", cfg.w, "W-trick prime cutoff")->envname("LPP_W");
        sub->add_option("--plimit", cfg.P_limit, "singular series truncation")
            ->envname("LPP_PLIMIT");
        sub->add_option("--alimit", cfg.A_limit, "C(Psi) tuple truncation")
            ->envname("LPP_ALIMIT");
        sub->add_option("--gamma", cfg.gamma, "R = scale^gamma exponent")->envname("LPP_GAMMA");
        sub->add_option("--resolution", cfg.resolution, "volume grid refinement")
            ->envname("LPP_RESOLUTION");
        sub->add_option("--workers", cfg.workers, "worker threads")->envname("LPP_WORKERS");
        sub->add_option("--format", cfg.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->envname("LPP_FORMAT");
        sub->add_option("--spf-cache", cfg.spf_cache, "smallest-prime-factor cache path")
            ->envname("LPP_SPF_CACHE");
        sub->add_flag("--timings", cfg.timings, "include wall time in reports")
            ->envname("LPP_TIMINGS");
    };
    auto add_system = [&](CLI::App* sub, bool required = true) {
        auto* opt = sub->add_option("--system", cfg.system_path, "system description JSON")
                        ->envname("LPP_SYSTEM");
        if (required) opt->required();
    };
    auto add_body = [&](CLI::App* sub) {
        sub->add_option("--body", cfg.body_path, "body description JSON")
            ->envname("LPP_BODY")
            ->required();
    };

    auto* analyze = app.add_subcommand("analyze", "complexity, Q, exceptional primes, admissibility");
    add_common(analyze);
    add_system(analyze);

    auto* beta = app.add_subcommand("beta", "one exact local factor beta_p");
    add_common(beta);
    add_system(beta);
    beta->add_option("--p", cfg.p, "prime")->required();

    auto* series = app.add_subcommand("series", "truncated singular series with tail bound");
    add_common(series);
    add_system(series);

    auto* count = app.add_subcommand("count", "empirical weighted count vs predicted main term");
    add_common(count);
    add_system(count);
    add_body(count);
    count->add_option("--mode", cfg.mode, "volume or beta-infinity")
        ->check(CLI::IsMember({"volume", "beta-infinity", "beta_infinity"}));
    count->add_option("--weight", cfg.weight, "lambda, lambda-prime, or F")
        ->check(CLI::IsMember({"lambda", "lambda-prime", "F", "sqfree-shift"}));

    auto* wtrick = app.add_subcommand("wtrick", "exact W-trick partition check");
    add_common(wtrick);
    add_system(wtrick);

    auto* crt = app.add_subcommand("crt-check", "CRT local product identity");
    add_common(crt);
    add_system(crt);
    crt->add_option("--wtilde", cfg.W_tilde, "modulus W~")->required();

    auto* exap = app.add_subcommand("example-ap", "progressions with q_i = floor(log^i N)");
    add_common(exap);
    exap->add_option("--k", cfg.k, "number of forms");

    auto* exps = app.add_subcommand("example-prime-step",
                                    "progressions with prime multiples of q as step");
    add_common(exps);
    exps->add_option("--k", cfg.k, "progression length");
    exps->add_option("--q", cfg.q, "step multiplier (primorial of k divides q)");

    auto* majorant = app.add_subcommand("majorant", "Lambda_{chi,R} domination scan");
    add_common(majorant);

    auto* lfc = app.add_subcommand("lfc", "linear forms condition average");
    add_common(lfc);
    add_system(lfc);
    lfc->add_option("--Z", cfg.Z, "box side")->envname("LPP_Z");

    auto* sqfree = app.add_subcommand("sqfree", "squarefree-shifted-primes comparison");
    add_common(sqfree);
    add_system(sqfree);
    add_body(sqfree);
    sqfree->add_option("--terms-csv", cfg.terms_csv, "per-a term dump path");

    auto* mirsky = app.add_subcommand("mirsky", "Mirsky density with tail bound");
    add_common(mirsky);

    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            std::ostringstream msg;
            const int rc = app.exit(e, msg, msg);
            err << msg.str();
            return rc == 0 ? 0 : 2;
        }
        cfg.command = app.get_subcommands().front()->get_name();
        code = dispatch(cfg, out, err);
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << "\n";
        code = 3;
    } catch (const ArgumentError& e) {
        err << "input error: " << e.what() << "\n";
        code = 2;
    } catch (const RangeError& e) {
        err << "input error: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = 2;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    err << "# wall_ms=" << ms << "\n";
    return code;
}

}  // namespace lpp::cli
