#pragma once

#include <string>

#include <gmpxx.h>
#include <json.hpp>

#include "lpp/forms.hpp"
#include "lpp/geometry.hpp"

namespace lpp {

// Rationals travel as decimal strings: "7/2" inline, {"num","den"} in reports.
mpq_class rational_from_json(const nlohmann::json& j);
std::string rational_to_string(const mpq_class& q);
nlohmann::json rational_to_json(const mpq_class& q);

// {"d": int, "t": int, "linear": [[int]], "constant": [int], "labels": [str]?}
AffineSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const AffineSystem& sys);
AffineSystem load_system(const std::string& path);

// {"d": int, "N": int, "halfspaces": [{"normal": [...], "offset": ...}]}
ConvexBody body_from_json(const nlohmann::json& j);
nlohmann::json body_to_json(const ConvexBody& body);
ConvexBody load_body(const std::string& path);

}  // namespace lpp
