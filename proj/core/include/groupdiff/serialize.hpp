#ifndef GROUPDIFF_SERIALIZE_HPP
#define GROUPDIFF_SERIALIZE_HPP

#include <string>
#include <string_view>

#include "groupdiff/types.hpp"

namespace groupdiff {

struct StepFunction;
struct LCurve;

// JSON with doubles in shortest round-trip decimal form; serialize ->
// deserialize -> serialize is the identity. Parsers reject unknown keys.

std::string to_json(const UniformGrid& grid, int indent = -1);
std::string to_json(const NoisySampleSet& samples, int indent = -1);
std::string to_json(const GroupedObservations& grouped, int indent = -1);
std::string to_json(const PiecewiseQuartic& fit, int indent = -1);
std::string to_json(const FitConfig& config, int indent = -1);
std::string to_json(const BoundInputs& inputs, int indent = -1);
std::string to_json(const StepFunction& step, int indent = -1);
std::string to_json(const LCurve& curve, int indent = -1);

template <typename T>
T from_json(std::string_view text);

template <>
UniformGrid from_json<UniformGrid>(std::string_view text);
template <>
NoisySampleSet from_json<NoisySampleSet>(std::string_view text);
template <>
GroupedObservations from_json<GroupedObservations>(std::string_view text);
template <>
PiecewiseQuartic from_json<PiecewiseQuartic>(std::string_view text);
template <>
FitConfig from_json<FitConfig>(std::string_view text);
template <>
BoundInputs from_json<BoundInputs>(std::string_view text);
template <>
StepFunction from_json<StepFunction>(std::string_view text);
template <>
LCurve from_json<LCurve>(std::string_view text);

}  // namespace groupdiff

#endif
