#pragma once

// Byte-stable JSON output (sorted keys, %.17g numbers) and conversions of the
// engine's value types.

#include <string>

#include <json.hpp>

#include "cm/field.hpp"
#include "cm/spectrum.hpp"

namespace cm {

using json = nlohmann::json;

std::string dump_stable(const json& j);

json to_json(cplx z);           // [re, im]
json to_json(const VecC& v);    // [[re, im], ...]
json to_json(const QuasiPolynomial& q);
json to_json(const JetIndex& m);
json to_json(const PolyField& f, const std::vector<std::string>& coords, const std::vector<std::string>& params);
json to_json(const Spectrum& sp);

// number or [re, im]
cplx complex_from_json(const json& j);
QuasiPolynomial qp_from_json(const json& j);

}  // namespace cm
