#pragma once

// JSON encodings of states, spectrum distributions and modal problems.
// Rationals travel as "p/q" strings.

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "prodstate/fp1.hpp"
#include "prodstate/modal.hpp"
#include "prodstate/states.hpp"

namespace prodstate {

using json = nlohmann::json;

// Malformed or inconsistent document contents.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j);  // accepts "p/q" strings and integers
json value_to_json(const Value& v);

// {"type":"dirac","point":[...]}, {"type":"mixture","points":[...],"weights":[...]},
// {"type":"sampler","law":...,"n":N,"seed":K}. A sampler's arity comes from
// "arity", then from its law, then from default_arity.
StatePtr state_from_json(const json& j, std::optional<std::size_t> default_arity = std::nullopt);
json state_to_json(const State& s);

SpectrumDist dist_from_json(const json& j);
json dist_to_json(const SpectrumDist& d);

// {"arity":1,"gamma":[...],"target":"...","budget":{...}}
SatProblem problem_from_json(const json& j);

// Throws std::runtime_error when the file cannot be read or parsed.
json read_json_file(const std::string& path);

}  // namespace prodstate
