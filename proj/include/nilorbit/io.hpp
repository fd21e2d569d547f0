#ifndef NILORBIT_IO_HPP
#define NILORBIT_IO_HPP

#include <string>

#include <json.hpp>

#include "nilorbit/polyseq.hpp"

namespace nilorbit {

using Json = nlohmann::ordered_json;

// "a/b" or integer strings, JSON integers, {"sqrt": n}, or floats (tagged
// approximate).
Scalar scalar_from_json(const Json& j);
Json scalar_to_json(const Scalar& s);

// {dimension, structure_constants: [[i,j,k,num,den]...], filtration: [m_0..m_d],
//  basis: optional matrix of rationals (weak basis to adapt)}
GroupPtr group_from_json(const Json& j);
// Preset name ("torus:m" | "heisenberg" | "ut:n") or path to a JSON file.
GroupPtr load_group(const std::string& spec);

// {t, coefficients: [{j: [j1..jt], vector: [scalars]}...]}
PolySeq seq_from_json(const Json& j, const GroupPtr& g);
Json seq_to_json(const PolySeq& s);

Json certificate_to_json(const struct Certificate& c);

}  // namespace nilorbit

#endif
