#include "lpp/json_io.hpp"

#include <fstream>

#include "lpp/errors.hpp"

namespace lpp {

using nlohmann::json;

mpq_class rational_from_json(const json& j) {
    mpq_class q;
    if (j.is_number_integer()) {
        q = mpq_class(static_cast<long>(j.get<long long>()));
    } else if (j.is_string()) {
        if (q.set_str(j.get<std::string>(), 10) != 0)
            throw ArgumentError("rational: cannot parse '" + j.get<std::string>() + "'");
    } else if (j.is_object() && j.contains("num") && j.contains("den")) {
        mpz_class num(j.at("num").get<std::string>()), den(j.at("den").get<std::string>());
        q = mpq_class(num, den);
    } else {
        throw ArgumentError("rational: expected integer, \"a/b\" string, or {num, den}");
    }
    q.canonicalize();
    return q;
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

json rational_to_json(const mpq_class& q) {
    return json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

AffineSystem system_from_json(const json& j) {
    if (!j.is_object()) throw ArgumentError("system: expected a JSON object");
    const auto d = j.at("d").get<std::size_t>();
    const auto t = j.at("t").get<std::size_t>();
    const auto& lin = j.at("linear");
    const auto& cst = j.at("constant");
    if (!lin.is_array() || lin.size() != t)
        throw ArgumentError("system: 'linear' must be a t-row array");
    if (!cst.is_array() || cst.size() != t)
        throw ArgumentError("system: 'constant' must have t entries");
    IntMatrix linear(t, d);
    for (std::size_t i = 0; i < t; ++i) {
        if (!lin[i].is_array() || lin[i].size() != d)
            throw ArgumentError("system: 'linear' row " + std::to_string(i) + " must have d entries");
        for (std::size_t jx = 0; jx < d; ++jx) {
            if (lin[i][jx].is_string())
                linear(i, jx) = mpz_class(lin[i][jx].get<std::string>());
            else
                linear(i, jx) = static_cast<long>(lin[i][jx].get<long long>());
        }
    }
    std::vector<mpz_class> constant(t);
    for (std::size_t i = 0; i < t; ++i) {
        if (cst[i].is_string())
            constant[i] = mpz_class(cst[i].get<std::string>());
        else
            constant[i] = static_cast<long>(cst[i].get<long long>());
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return AffineSystem(std::move(linear), std::move(constant), std::move(labels));
}

json system_to_json(const AffineSystem& sys) {
    json lin = json::array();
    for (std::size_t i = 0; i < sys.t(); ++i) {
        json row = json::array();
        for (std::size_t jx = 0; jx < sys.d(); ++jx) {
            const mpz_class& v = sys.linear()(i, jx);
            if (v.fits_slong_p())
                row.push_back(v.get_si());
            else
                row.push_back(v.get_str());
        }
        lin.push_back(std::move(row));
    }
    json cst = json::array();
    for (const auto& c : sys.constant()) {
        if (c.fits_slong_p())
            cst.push_back(c.get_si());
        else
            cst.push_back(c.get_str());
    }
    json out{{"d", sys.d()}, {"t", sys.t()}, {"linear", lin}, {"constant", cst}};
    if (!sys.labels().empty()) out["labels"] = sys.labels();
    return out;
}

AffineSystem load_system(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open system file: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ArgumentError("system file " + path + ": " + e.what());
    }
    return system_from_json(j);
}

ConvexBody body_from_json(const json& j) {
    if (!j.is_object()) throw ArgumentError("body: expected a JSON object");
    const auto d = j.at("d").get<std::size_t>();
    const auto N = j.at("N").get<long long>();
    std::vector<Halfspace> hs;
    if (j.contains("halfspaces")) {
        for (const auto& h : j.at("halfspaces")) {
            Halfspace half;
            const auto& normal = h.at("normal");
            if (!normal.is_array() || normal.size() != d)
                throw ArgumentError("body: halfspace normal must have d entries");
            for (const auto& a : normal) half.normal.push_back(rational_from_json(a));
            half.offset = rational_from_json(h.at("offset"));
            hs.push_back(std::move(half));
        }
    }
    return ConvexBody(d, N, std::move(hs));
}

json body_to_json(const ConvexBody& body) {
    json hs = json::array();
    for (const auto& h : body.halfspaces()) {
        json normal = json::array();
        for (const auto& a : h.normal) normal.push_back(rational_to_string(a));
        hs.push_back(json{{"normal", normal}, {"offset", rational_to_string(h.offset)}});
    }
    return json{{"d", body.d()}, {"N", body.bound()}, {"halfspaces", hs}};
}

ConvexBody load_body(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open body file: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ArgumentError("body file " + path + ": " + e.what());
    }
    return body_from_json(j);
}

}  // namespace lpp
