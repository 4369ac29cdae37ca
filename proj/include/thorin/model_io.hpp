#pragma once

#include "thorin/catalog.hpp"
#include "thorin/subordinate.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace thorin::model_io {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

// Canonical function given directly, for screening candidates that may not be Thorin at all.
//   indicator   k(x) = theta 1{0 < x < upper}
//   power_exp   k(x) = lambda x^-alpha e^(-rate x)
struct CanonicalSpec {
  std::string kind;
  std::map<std::string, double> params;
  std::function<double(double)> k;
};

// Exactly one of `model`, `canonical`, `lgnbc` is set.
struct Document {
  std::string note;
  std::optional<catalog::Model> model;  // family document or explicit triplet (name "triplet")
  std::optional<CanonicalSpec> canonical;
  std::optional<subordinate::LgnbcQuadruplet> lgnbc;
};

// Every schema problem is collected into one SchemaError. A triplet that breaks the Thorin
// conditions (e.g. mass at 0) raises PreconditionError naming the condition.
Document from_json(const json& j);
// Parses text; malformed JSON raises json::parse_error carrying the byte position.
Document parse(const std::string& text);
Document load(const std::string& path);

json to_json(const Document& d);
json to_json(const catalog::Model& m);
json to_json(const measure::RadialMeasure& m);
json to_json(const exponent::ThorinTriplet& t);

// Triplet documents for transform outputs.
Document triplet_document(const exponent::ThorinTriplet& t, const std::string& note = {});

// The GGC subordinator a document describes: one-sided, no Gaussian part, drift a >= 0 once
// written without compensation.
subordinate::GgcSubordinator as_subordinator(const catalog::Model& m);

}  // namespace thorin::model_io
