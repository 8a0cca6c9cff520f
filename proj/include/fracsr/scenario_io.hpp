#pragma once

#include <string>

#include <json.hpp>

#include "fracsr/model.hpp"

namespace fracsr {

// Scenario JSON schema:
//   {alpha, beta, domain, T, phi0, f, g, phi_past, mc, spectral}
// Fields are tagged unions {"kind": ..., params...}. Serialization round-trips bit-exactly.

nlohmann::json field_to_json(const Field& f);
Field field_from_json(const nlohmann::json& j);

nlohmann::json domain_to_json(const DomainShape& d);
DomainShape domain_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& s);
// Throws ParameterError on malformed documents. Range tags are set from each field's role.
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::string& path);

// Stable 64-bit FNV-1a hash of the canonical JSON dump, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

}  // namespace fracsr
