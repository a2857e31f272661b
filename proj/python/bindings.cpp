#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "lpp/arithmetic.hpp"
#include "lpp/counting.hpp"
#include "lpp/errors.hpp"
#include "lpp/exact_linalg.hpp"
#include "lpp/forms.hpp"
#include "lpp/geometry.hpp"
#include "lpp/json_io.hpp"
#include "lpp/local_factors.hpp"
#include "lpp/majorant.hpp"
#include "lpp/sqfree.hpp"

namespace py = pybind11;
using namespace lpp;

namespace {

// bytes round-trip; int(str) would hit python's digit-count guard on the
// exact truncated products
py::int_ py_int(const mpz_class& z) {
    const int sign = mpz_sgn(z.get_mpz_t());
    if (sign == 0) return py::int_(0);
    const std::size_t nbytes = (mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8;
    std::string buf(nbytes, '\0');
    std::size_t written = 0;
    mpz_export(buf.data(), &written, 1, 1, 1, 0, z.get_mpz_t());
    buf.resize(written);
    py::object v = py::module_::import("builtins")
                       .attr("int")
                       .attr("from_bytes")(py::bytes(buf), "big");
    if (sign < 0) v = v.attr("__neg__")();
    return py::cast<py::int_>(v);
}

py::object py_fraction(const mpq_class& q) {
    return py::module_::import("fractions").attr("Fraction")(py_int(q.get_num()),
                                                             py_int(q.get_den()));
}

mpz_class to_mpz(const py::int_& v) {
    return mpz_class(py::module_::import("builtins").attr("str")(v).cast<std::string>());
}

IntMatrix matrix_from_rows(const std::vector<std::vector<py::int_>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows[0].size();
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw ArgumentError("ragged linear matrix");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = to_mpz(rows[i][j]);
    }
    return m;
}

std::vector<mpz_class> column_from(const std::vector<py::int_>& v) {
    std::vector<mpz_class> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_mpz(v[i]);
    return out;
}

std::vector<std::vector<py::int_>> matrix_to_rows(const IntMatrix& m) {
    std::vector<std::vector<py::int_>> rows(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) rows[i].push_back(py_int(m(i, j)));
    return rows;
}

AffineSystem system_from_parts(const std::vector<std::vector<py::int_>>& linear,
                               const std::vector<py::int_>& constant,
                               const std::vector<std::string>& labels) {
    return AffineSystem(matrix_from_rows(linear), column_from(constant), labels);
}

ConvexBody body_from_parts(std::size_t d, long long bound,
                           const std::vector<std::pair<std::vector<std::string>, std::string>>&
                               halfspaces) {
    std::vector<Halfspace> hs;
    for (const auto& [normal, offset] : halfspaces) {
        Halfspace h;
        for (const auto& a : normal) {
            mpq_class q;
            if (q.set_str(a, 10) != 0) throw ArgumentError("bad rational: " + a);
            q.canonicalize();
            h.normal.push_back(q);
        }
        mpq_class off;
        if (off.set_str(offset, 10) != 0) throw ArgumentError("bad rational: " + offset);
        off.canonicalize();
        h.offset = off;
        hs.push_back(std::move(h));
    }
    return ConvexBody(d, bound, std::move(hs));
}

py::dict comparison_dict(const ComparisonReport& r) {
    py::dict d;
    d["digest"] = r.system_digest;
    d["mode"] = r.mode;
    d["empirical"] = r.empirical;
    d["predicted"] = r.predicted;
    d["ratio"] = r.ratio_defined ? py::object(py::float_(r.ratio)) : py::object(py::none());
    d["P_limit"] = r.P_limit;
    d["tail_bound_log"] = r.tail_bound_log;
    d["lattice_count"] = r.lattice_count;
    d["negative_skips"] = r.negative_skips;
    d["volume"] = r.volume_value;
    d["volume_error"] = r.volume_error;
    d["workers"] = r.workers;
    return d;
}

}  // namespace

PYBIND11_MODULE(_lpp, m) {
    m.doc() = "exact local factors, singular series, and prime-tuple counts "
              "for systems of affine-linear forms";

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);

    py::class_<PrimeTable>(m, "PrimeTable")
        .def_static("sieve", &PrimeTable::sieve, py::arg("limit"),
                    py::arg("segment") = PrimeTable::kDefaultSegment,
                    py::arg("memory_budget_bytes") = PrimeTable::kDefaultMemoryBudget)
        .def_property_readonly("limit", &PrimeTable::limit)
        .def("primes", [](const PrimeTable& t) { return t.primes(); })
        .def("smallest_prime_factor", &PrimeTable::smallest_prime_factor)
        .def("is_prime", &PrimeTable::is_prime)
        .def("von_mangoldt", &PrimeTable::von_mangoldt)
        .def("lambda_prime", &PrimeTable::lambda_prime)
        .def("moebius", &PrimeTable::moebius)
        .def("euler_phi", &PrimeTable::euler_phi)
        .def("is_squarefree", &PrimeTable::is_squarefree)
        .def("save_spf_cache", &PrimeTable::save_spf_cache)
        .def_static("load_spf_cache", &PrimeTable::load_spf_cache);

    m.def("lambda_q", [](std::uint64_t q, const py::int_& n) {
        return py_fraction(lambda_q(q, to_mpz(n)));
    });

    py::class_<AffineSystem>(m, "AffineSystem")
        .def(py::init(&system_from_parts), py::arg("linear"), py::arg("constant"),
             py::arg("labels") = std::vector<std::string>{})
        .def_property_readonly("d", &AffineSystem::d)
        .def_property_readonly("t", &AffineSystem::t)
        .def_property_readonly("linear",
                               [](const AffineSystem& s) { return matrix_to_rows(s.linear()); })
        .def_property_readonly("constant",
                               [](const AffineSystem& s) {
                                   std::vector<py::int_> out;
                                   for (const auto& c : s.constant()) out.push_back(py_int(c));
                                   return out;
                               })
        .def_property_readonly("labels", &AffineSystem::labels)
        .def("evaluate",
             [](const AffineSystem& s, const std::vector<py::int_>& n) {
                 std::vector<py::int_> out;
                 for (const auto& v : s.evaluate(column_from(n))) out.push_back(py_int(v));
                 return out;
             })
        .def("size_norm", &AffineSystem::size_norm, py::arg("N"), py::arg("B") = 0.0)
        .def("digest", &AffineSystem::digest)
        .def("to_json", [](const AffineSystem& s) { return system_to_json(s).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return system_from_json(nlohmann::json::parse(text));
        });

    m.def("finite_complexity", &finite_complexity);
    m.def("minors_product",
          [](const AffineSystem& s) { return py_int(minors_product(s)); });
    m.def("exceptional_primes", &exceptional_primes);
    m.def("is_admissible", [](const AffineSystem& s) {
        return is_admissible(
            s, [](const AffineSystem& sys, std::uint64_t p) { return beta_p(sys, p); });
    });
    m.def("subsystem", &subsystem);
    m.def("translate", [](const AffineSystem& s, const std::vector<py::int_>& shift) {
        return translate(s, column_from(shift));
    });

    m.def("beta_p",
          [](const AffineSystem& s, std::uint64_t p) { return py_fraction(beta_p(s, p)); });
    m.def("beta_p_bruteforce",
          [](const AffineSystem& s, std::uint64_t p, std::uint64_t budget) {
              return py_fraction(beta_p_bruteforce(s, p, budget));
          },
          py::arg("system"), py::arg("p"), py::arg("budget") = 10'000'000);
    m.def("beta_p_example1", [](const std::vector<long long>& q, std::uint64_t p) {
        return py_fraction(beta_p_example1(q, p));
    });
    m.def("beta_p_example2", [](int k, std::uint64_t q, std::uint64_t p) {
        return py_fraction(beta_p_example2(k, q, p));
    });
    m.def(
        "singular_series",
        [](const AffineSystem& s, std::uint64_t P_limit, int workers) {
            const LocalFactorReport rep = singular_series(s, P_limit, workers);
            py::dict d;
            d["digest"] = rep.system_digest;
            d["P_limit"] = rep.P_limit;
            d["exceptional"] = rep.exceptional;
            d["product"] = py_fraction(rep.truncated_product);
            d["value"] = rep.value();
            d["tail_bound_log"] = rep.tail_bound_log;
            py::dict factors;
            for (const auto& [p, b] : rep.factors)
                factors[py::int_(p)] = py_fraction(b);
            d["factors"] = factors;
            return d;
        },
        py::arg("system"), py::arg("P_limit"), py::arg("workers") = 1);
    m.def("alpha_density", [](const AffineSystem& s, const std::vector<py::int_>& k) {
        return py_fraction(alpha_density(s, column_from(k)));
    });

    m.def("rank_mod_p", [](const std::vector<std::vector<py::int_>>& rows, std::uint64_t p) {
        return rank_mod_p(matrix_from_rows(rows), p);
    });
    m.def("congruence_solution_count",
          [](const std::vector<std::vector<py::int_>>& rows, const std::vector<py::int_>& c,
             const std::vector<py::int_>& k, const py::int_& mm) {
              return py_int(congruence_solution_count(matrix_from_rows(rows), column_from(c),
                                                      column_from(k), to_mpz(mm)));
          });
    m.def("hermite_normal_form", [](const std::vector<std::vector<py::int_>>& rows) {
        const auto r = hermite_normal_form(matrix_from_rows(rows));
        return py::make_tuple(matrix_to_rows(r.h), matrix_to_rows(r.u));
    });
    m.def("kernel_lattice",
          [](const std::vector<std::vector<py::int_>>& rows, const std::vector<py::int_>& c,
             const std::vector<py::int_>& k) -> py::object {
              const auto lat =
                  kernel_lattice(matrix_from_rows(rows), column_from(c), column_from(k));
              if (!lat.feasible) return py::none();
              py::dict d;
              std::vector<py::int_> origin;
              for (const auto& x : lat.origin) origin.push_back(py_int(x));
              d["origin"] = origin;
              d["basis"] = matrix_to_rows(lat.basis);
              d["covolume"] = py_int(lat.covolume);
              return d;
          });

    py::class_<ConvexBody>(m, "ConvexBody")
        .def(py::init(&body_from_parts), py::arg("d"), py::arg("N"),
             py::arg("halfspaces") =
                 std::vector<std::pair<std::vector<std::string>, std::string>>{})
        .def_property_readonly("d", &ConvexBody::d)
        .def_property_readonly("N", &ConvexBody::bound)
        .def("to_json", [](const ConvexBody& b) { return body_to_json(b).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return body_from_json(nlohmann::json::parse(text));
        });

    m.def("lattice_points", [](const ConvexBody& b) {
        std::vector<std::vector<long long>> out;
        for_each_lattice_point(b, [&](const std::vector<std::int64_t>& x) {
            out.emplace_back(x.begin(), x.end());
        });
        return out;
    });
    m.def("lattice_point_count", &lattice_point_count);
    m.def("volume", [](const ConvexBody& b, std::uint64_t resolution) {
        const auto v = volume(b, resolution);
        return py::make_tuple(v.value, v.error_bound);
    });
    m.def("beta_infinity",
          [](const ConvexBody& b, const AffineSystem& s, std::uint64_t resolution) {
              const auto v = beta_infinity(b, s, resolution);
              return py::make_tuple(v.value, v.error_bound);
          },
          py::arg("body"), py::arg("system"), py::arg("resolution") = 128);

    m.def(
        "empirical_sum",
        [](const PrimeTable& t, const AffineSystem& s, const ConvexBody& b,
           const std::string& weight, int workers) {
            WeightKind kind;
            if (weight == "lambda")
                kind = WeightKind::VonMangoldt;
            else if (weight == "lambda-prime")
                kind = WeightKind::PrimeLog;
            else if (weight == "F")
                kind = WeightKind::SqfreeShift;
            else
                throw ArgumentError("unknown weight: " + weight);
            const auto r = empirical_sum(t, s, b, {{kind, {}}}, workers);
            py::dict d;
            d["sum"] = r.sum;
            d["lattice_count"] = r.lattice_count;
            d["negative_skips"] = r.negative_skips;
            d["required_limit"] = r.required_limit;
            return d;
        },
        py::arg("table"), py::arg("system"), py::arg("body"),
        py::arg("weight") = "lambda-prime", py::arg("workers") = 1);
    m.def(
        "compare",
        [](const PrimeTable& t, const AffineSystem& s, const ConvexBody& b,
           std::uint64_t P_limit, const std::string& mode, std::uint64_t resolution,
           int workers) {
            const auto rep =
                compare(t, s, b, P_limit,
                        mode == "beta-infinity" ? PredictionMode::BetaInfinity
                                                : PredictionMode::Volume,
                        {{WeightKind::PrimeLog, {}}}, resolution, workers);
            return comparison_dict(rep);
        },
        py::arg("table"), py::arg("system"), py::arg("body"), py::arg("P_limit"),
        py::arg("mode") = "volume", py::arg("resolution") = 64, py::arg("workers") = 1);
    m.def("wtrick_identity_check",
          [](const PrimeTable& t, const AffineSystem& s, std::uint64_t w, std::uint64_t M) {
              const auto rep = wtrick_identity_check(t, s, w, M);
              py::dict d;
              d["W_tilde"] = py_int(rep.W_tilde);
              d["lhs"] = rep.lhs;
              d["partition_total"] = rep.partition_total;
              d["coprime_mass"] = rep.coprime_mass;
              d["dropped_mass"] = rep.dropped_mass;
              d["dropped_expected"] = rep.dropped_expected;
              d["classes"] = rep.classes;
              d["coprime_classes"] = rep.coprime_classes;
              d["ok"] = rep.ok();
              return d;
          });
    m.def("crt_local_product_check", [](const AffineSystem& s, std::uint64_t wt) {
        const auto rep = crt_local_product_check(s, wt);
        py::dict d;
        d["W_tilde"] = rep.W_tilde;
        d["lhs"] = py_fraction(rep.lhs);
        d["rhs"] = py_fraction(rep.rhs);
        d["equal"] = rep.equal;
        return d;
    });

    m.def("lambda_chi_r", [](const PrimeTable& t, double R, std::uint64_t n) {
        return lambda_chi_r(t, cosine_squared_cutoff(), R, n);
    });
    m.def("domination_check", [](const PrimeTable& t, std::uint64_t N, double gamma) {
        const auto rep = domination_check(t, cosine_squared_cutoff(), N, gamma);
        py::dict d;
        d["N"] = rep.N;
        d["gamma"] = rep.gamma;
        d["R"] = rep.R;
        d["primes_checked"] = rep.primes_checked;
        d["violations"] = rep.violations;
        return d;
    });
    m.def(
        "linear_forms_average",
        [](const PrimeTable& t, const AffineSystem& s, std::uint64_t Z, double R,
           std::uint64_t P_limit, int workers) {
            const auto rep =
                linear_forms_average(t, cosine_squared_cutoff(), s, Z, R, P_limit, workers);
            py::dict d;
            d["average"] = rep.average;
            d["predicted"] = rep.predicted;
            d["ratio"] = rep.ratio;
            d["exceptional_x"] = rep.exceptional_x;
            return d;
        },
        py::arg("table"), py::arg("system"), py::arg("Z"), py::arg("R"), py::arg("P_limit"),
        py::arg("workers") = 1);

    m.def("weight_f", &weight_f);
    m.def("mirsky_density", [](std::uint64_t P_limit) {
        const auto r = mirsky_density(P_limit);
        return py::make_tuple(r.value, r.tail_bound);
    });
    m.def(
        "c_psi_truncated",
        [](const AffineSystem& s, std::uint64_t A_limit, std::uint64_t P_limit, int workers) {
            const auto r = c_psi_truncated(s, A_limit, P_limit, workers);
            py::dict d;
            d["value"] = r.value;
            d["A_limit"] = r.A_limit;
            d["P_limit"] = r.P_limit;
            d["tuples_scanned"] = r.tuples_scanned;
            d["tuples_feasible"] = r.tuples_feasible;
            d["dyadic_block_abs"] = r.dyadic_block_abs;
            return d;
        },
        py::arg("system"), py::arg("A_limit"), py::arg("P_limit"), py::arg("workers") = 1);
    m.def(
        "sqfree_compare",
        [](const PrimeTable& t, const AffineSystem& s, const ConvexBody& b,
           std::uint64_t A_limit, std::uint64_t P_limit, std::uint64_t resolution,
           int workers) {
            return comparison_dict(sqfree_compare(t, s, b, A_limit, P_limit, resolution, workers));
        },
        py::arg("table"), py::arg("system"), py::arg("body"), py::arg("A_limit"),
        py::arg("P_limit"), py::arg("resolution") = 64, py::arg("workers") = 1);
}
