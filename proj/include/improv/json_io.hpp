#pragma once

#include "improv/approx.hpp"
#include "improv/core.hpp"
#include "improv/exact_scheme.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace improv {

using Json = nlohmann::ordered_json;

Json dfa_to_json(const Dfa& dfa);
Dfa dfa_from_json(const Json& j);

Json rational_to_json(const Rational& r);  // {"num","den","approx"}

Json bundle_to_json(const DfaInstanceBundle& bundle);
DfaInstanceBundle bundle_from_json(const Json& j);

Json distribution_to_json(const ImprovisingDistributionSpec& spec);

// A Boolean-encoded instance: the DIMACS lives in its own file next to the
// instance JSON.
struct CnfInstance {
  CnfSpec spec;
  CnfInstanceBounds bounds;
};

using LoadedInstance = std::variant<DfaInstanceBundle, CnfInstance>;
LoadedInstance load_instance_file(const std::string& path);

std::string canonical_dump(const Json& j);
Json parse_json_file(const std::string& path);

}  // namespace improv
