#include "groupdiff/serialize.hpp"

#include <json.hpp>

#include "groupdiff/errors.hpp"
#include "groupdiff/param_select.hpp"
#include "groupdiff/preprocess.hpp"

namespace groupdiff {

namespace {

using nlohmann::json;

json parse(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("malformed JSON");
    }
    return j;
}

void expect_keys(const json& j, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) {
        throw ParseError("expected a JSON object");
    }
    for (const char* key : required) {
        if (!j.contains(key)) {
            throw ParseError(std::string("missing key '") + key + "'");
        }
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : required) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        for (const char* key : optional) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError("unknown key '" + item.key() + "'");
        }
    }
}

json grid_to_json(const UniformGrid& grid) {
    return json{{"node_count", grid.node_count}, {"meshsize", grid.meshsize()}};
}

UniformGrid grid_from(const json& j) {
    expect_keys(j, {"node_count", "meshsize"});
    UniformGrid grid{j.at("node_count").get<std::int64_t>()};
    if (grid.node_count < 1) {
        throw ParseError("node_count must be positive");
    }
    if (j.at("meshsize").get<double>() != grid.meshsize()) {
        throw ParseError("meshsize must equal 1/node_count");
    }
    return grid;
}

std::string dump(const json& j, int indent) {
    return j.dump(indent);
}

json alpha_mode_to_json(const AlphaMode& mode) {
    if (const auto* fixed = std::get_if<ExplicitAlpha>(&mode)) {
        return json{{"alpha", fixed->alpha}};
    }
    const auto& rule = std::get<CbarRule>(mode);
    return json{{"c_bar", rule.c_bar}, {"sigma2", rule.sigma2}, {"N", rule.N}};
}

AlphaMode alpha_mode_from(const json& j) {
    if (!j.is_object()) {
        throw ParseError("alpha_mode must be an object");
    }
    if (j.contains("alpha")) {
        expect_keys(j, {"alpha"});
        return ExplicitAlpha{j.at("alpha").get<double>()};
    }
    expect_keys(j, {"c_bar", "sigma2", "N"});
    return CbarRule{j.at("c_bar").get<double>(), j.at("sigma2").get<double>(),
                    j.at("N").get<std::int64_t>()};
}

}  // namespace

std::string to_json(const UniformGrid& grid, int indent) {
    return dump(grid_to_json(grid), indent);
}

template <>
UniformGrid from_json<UniformGrid>(std::string_view text) {
    return grid_from(parse(text));
}

std::string to_json(const NoisySampleSet& samples, int indent) {
    json j{{"grid", grid_to_json(samples.grid)},
           {"values", samples.values},
           {"left_endpoint_value", samples.left_endpoint_value},
           {"right_endpoint_value", samples.right_endpoint_value}};
    if (samples.noise_variance) {
        j["noise_variance"] = *samples.noise_variance;
    }
    return dump(j, indent);
}

template <>
NoisySampleSet from_json<NoisySampleSet>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j, {"grid", "values", "left_endpoint_value", "right_endpoint_value"},
                {"noise_variance"});
    NoisySampleSet samples;
    samples.grid = grid_from(j.at("grid"));
    samples.values = j.at("values").get<std::vector<double>>();
    samples.left_endpoint_value = j.at("left_endpoint_value").get<double>();
    samples.right_endpoint_value = j.at("right_endpoint_value").get<double>();
    if (j.contains("noise_variance")) {
        samples.noise_variance = j.at("noise_variance").get<double>();
    }
    return checked(samples);
}

std::string to_json(const GroupedObservations& grouped, int indent) {
    json j{{"coarse_grid", grid_to_json(grouped.coarse_grid)},
           {"group_size", grouped.group_size},
           {"group_means", grouped.group_means},
           {"left_endpoint_value", grouped.left_endpoint_value},
           {"right_endpoint_value", grouped.right_endpoint_value}};
    if (grouped.noise_variance_original) {
        j["noise_variance_original"] = *grouped.noise_variance_original;
    }
    return dump(j, indent);
}

template <>
GroupedObservations from_json<GroupedObservations>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j,
                {"coarse_grid", "group_size", "group_means", "left_endpoint_value",
                 "right_endpoint_value"},
                {"noise_variance_original"});
    GroupedObservations grouped;
    grouped.coarse_grid = grid_from(j.at("coarse_grid"));
    grouped.group_size = j.at("group_size").get<std::int64_t>();
    grouped.group_means = j.at("group_means").get<std::vector<double>>();
    grouped.left_endpoint_value = j.at("left_endpoint_value").get<double>();
    grouped.right_endpoint_value = j.at("right_endpoint_value").get<double>();
    if (j.contains("noise_variance_original")) {
        grouped.noise_variance_original = j.at("noise_variance_original").get<double>();
    }
    return checked(grouped);
}

std::string to_json(const PiecewiseQuartic& fit, int indent) {
    json coeffs = json::array();
    for (const QuarticCoeffs& q : fit.coefficients) {
        coeffs.push_back(json::array({q.a, q.b, q.c, q.d, q.e}));
    }
    json j{{"coarse_grid", grid_to_json(fit.coarse_grid)},
           {"coefficients", coeffs},
           {"alpha_used", fit.alpha_used}};
    return dump(j, indent);
}

template <>
PiecewiseQuartic from_json<PiecewiseQuartic>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j, {"coarse_grid", "coefficients", "alpha_used"});
    PiecewiseQuartic fit;
    fit.coarse_grid = grid_from(j.at("coarse_grid"));
    fit.alpha_used = j.at("alpha_used").get<double>();
    const json& coeffs = j.at("coefficients");
    if (!coeffs.is_array()) {
        throw ParseError("coefficients must be an array of 5-element arrays");
    }
    fit.coefficients.reserve(coeffs.size());
    for (const json& tuple : coeffs) {
        if (!tuple.is_array() || tuple.size() != 5) {
            throw ParseError("coefficients must be an array of 5-element arrays");
        }
        fit.coefficients.push_back(QuarticCoeffs{tuple[0].get<double>(), tuple[1].get<double>(),
                                                 tuple[2].get<double>(), tuple[3].get<double>(),
                                                 tuple[4].get<double>()});
    }
    return checked(fit);
}

std::string to_json(const FitConfig& config, int indent) {
    json j{{"k", config.k},
           {"alpha_mode", alpha_mode_to_json(config.alpha_mode)},
           {"quantile_level", config.quantile_level},
           {"solver", config.solver == SolverPath::reduced ? "reduced" : "full_kkt"},
           {"tau_cont", config.tau_cont},
           {"tau_el", config.tau_el},
           {"tau_solve", config.tau_solve}};
    return dump(j, indent);
}

template <>
FitConfig from_json<FitConfig>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j, {},
                {"k", "alpha_mode", "quantile_level", "solver", "tau_cont", "tau_el",
                 "tau_solve"});
    FitConfig config;
    if (j.contains("k")) {
        config.k = j.at("k").get<int>();
    }
    if (j.contains("alpha_mode")) {
        config.alpha_mode = alpha_mode_from(j.at("alpha_mode"));
    }
    if (j.contains("quantile_level")) {
        config.quantile_level = j.at("quantile_level").get<double>();
    }
    if (j.contains("solver")) {
        const std::string solver = j.at("solver").get<std::string>();
        if (solver == "reduced") {
            config.solver = SolverPath::reduced;
        } else if (solver == "full_kkt") {
            config.solver = SolverPath::full_kkt;
        } else {
            throw ParseError("solver must be 'reduced' or 'full_kkt'");
        }
    }
    if (j.contains("tau_cont")) {
        config.tau_cont = j.at("tau_cont").get<double>();
    }
    if (j.contains("tau_el")) {
        config.tau_el = j.at("tau_el").get<double>();
    }
    if (j.contains("tau_solve")) {
        config.tau_solve = j.at("tau_solve").get<double>();
    }
    return checked(config);
}

std::string to_json(const BoundInputs& inputs, int indent) {
    json j{{"Q", inputs.Q},         {"y_k_norm", inputs.y_k_norm}, {"C1", inputs.C1},
           {"C2", inputs.C2},       {"sigma2", inputs.sigma2},     {"M", inputs.M},
           {"N", inputs.N},         {"p", inputs.p}};
    return dump(j, indent);
}

template <>
BoundInputs from_json<BoundInputs>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j, {"Q", "y_k_norm", "C1", "C2", "sigma2", "M", "N", "p"});
    BoundInputs inputs;
    inputs.Q = j.at("Q").get<double>();
    inputs.y_k_norm = j.at("y_k_norm").get<double>();
    inputs.C1 = j.at("C1").get<double>();
    inputs.C2 = j.at("C2").get<double>();
    inputs.sigma2 = j.at("sigma2").get<double>();
    inputs.M = j.at("M").get<std::int64_t>();
    inputs.N = j.at("N").get<std::int64_t>();
    inputs.p = j.at("p").get<double>();
    return inputs;
}

std::string to_json(const StepFunction& step, int indent) {
    json j{{"coarse_grid", grid_to_json(step.coarse_grid)},
           {"interval_values", step.interval_values}};
    return dump(j, indent);
}

template <>
StepFunction from_json<StepFunction>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j, {"coarse_grid", "interval_values"});
    StepFunction step;
    step.coarse_grid = grid_from(j.at("coarse_grid"));
    step.interval_values = j.at("interval_values").get<std::vector<double>>();
    if (static_cast<std::int64_t>(step.interval_values.size()) !=
        step.coarse_grid.node_count) {
        throw ParseError("interval_values length must equal node_count");
    }
    return step;
}

std::string to_json(const LCurve& curve, int indent) {
    json points = json::array();
    for (const LCurvePoint& point : curve.points) {
        points.push_back(json{{"c_bar", point.c_bar},
                              {"alpha", point.alpha},
                              {"log_penalty", point.log_penalty},
                              {"log_residual", point.log_residual}});
    }
    json j{{"points", points}, {"penalty_order", curve.penalty_order}};
    if (curve.chosen_index) {
        j["chosen_index"] = *curve.chosen_index;
    }
    return dump(j, indent);
}

template <>
LCurve from_json<LCurve>(std::string_view text) {
    const json j = parse(text);
    expect_keys(j, {"points", "penalty_order"}, {"chosen_index"});
    LCurve curve;
    curve.penalty_order = j.at("penalty_order").get<int>();
    for (const json& pj : j.at("points")) {
        expect_keys(pj, {"c_bar", "alpha", "log_penalty", "log_residual"});
        LCurvePoint point;
        point.c_bar = pj.at("c_bar").get<double>();
        point.alpha = pj.at("alpha").get<double>();
        point.log_penalty = pj.at("log_penalty").get<double>();
        point.log_residual = pj.at("log_residual").get<double>();
        curve.points.push_back(point);
    }
    if (j.contains("chosen_index")) {
        curve.chosen_index = j.at("chosen_index").get<std::size_t>();
        if (*curve.chosen_index >= curve.points.size()) {
            throw ParseError("chosen_index out of range");
        }
    }
    return curve;
}

}  // namespace groupdiff
