#include "groupdiff/types.hpp"

#include <cmath>

#include "groupdiff/errors.hpp"

namespace groupdiff {

namespace {

bool finite(double v) {
    return std::isfinite(v);
}

void require(std::vector<std::string>& report, bool ok, const char* message) {
    if (!ok) {
        report.emplace_back(message);
    }
}

}  // namespace

double resolved_alpha(const FitConfig& config) {
    if (const auto* fixed = std::get_if<ExplicitAlpha>(&config.alpha_mode)) {
        if (!(fixed->alpha > 0.0) || !finite(fixed->alpha)) {
            throw ConfigError("alpha must be a positive finite number");
        }
        return fixed->alpha;
    }
    const auto& rule = std::get<CbarRule>(config.alpha_mode);
    if (!(rule.c_bar > 0.0) || !finite(rule.c_bar)) {
        throw ConfigError("c_bar must be a positive finite number");
    }
    if (!(rule.sigma2 > 0.0) || !finite(rule.sigma2)) {
        throw ConfigError("sigma2 must be a positive finite number in the c_bar rule");
    }
    if (rule.N <= 0) {
        throw ConfigError("N must be positive in the c_bar rule");
    }
    return rule.c_bar * rule.sigma2 / static_cast<double>(rule.N);
}

std::vector<std::string> validate(const UniformGrid& grid) {
    std::vector<std::string> report;
    require(report, grid.node_count >= 2, "node_count >= 2");
    return report;
}

std::vector<std::string> validate(const NoisySampleSet& samples) {
    std::vector<std::string> report = validate(samples.grid);
    require(report,
            static_cast<std::int64_t>(samples.values.size()) == samples.grid.node_count,
            "values length equals grid.node_count");
    require(report, finite(samples.left_endpoint_value), "left_endpoint_value is finite");
    require(report, finite(samples.right_endpoint_value), "right_endpoint_value is finite");
    for (double v : samples.values) {
        if (!finite(v)) {
            report.emplace_back("values are finite");
            break;
        }
    }
    if (!samples.values.empty()) {
        require(report, samples.values.back() == samples.right_endpoint_value,
                "last sample equals right_endpoint_value");
    }
    if (samples.noise_variance) {
        require(report, finite(*samples.noise_variance) && *samples.noise_variance >= 0.0,
                "noise_variance >= 0");
    }
    return report;
}

std::vector<std::string> validate(const GroupedObservations& grouped) {
    std::vector<std::string> report;
    require(report, grouped.coarse_grid.node_count > 2, "group count M > 2");
    require(report, grouped.group_size >= 1, "group_size >= 1");
    require(report,
            static_cast<std::int64_t>(grouped.group_means.size()) ==
                grouped.coarse_grid.node_count,
            "group_means length equals M");
    require(report, finite(grouped.left_endpoint_value), "left_endpoint_value is finite");
    require(report, finite(grouped.right_endpoint_value), "right_endpoint_value is finite");
    for (double v : grouped.group_means) {
        if (!finite(v)) {
            report.emplace_back("group_means are finite");
            break;
        }
    }
    if (grouped.noise_variance_original) {
        require(report,
                finite(*grouped.noise_variance_original) &&
                    *grouped.noise_variance_original >= 0.0,
                "noise_variance_original >= 0");
    }
    return report;
}

std::vector<std::string> validate(const PiecewiseQuartic& fit) {
    std::vector<std::string> report;
    require(report, fit.coarse_grid.node_count >= 1, "coarse grid has at least one interval");
    require(report,
            static_cast<std::int64_t>(fit.coefficients.size()) == fit.coarse_grid.node_count,
            "one coefficient tuple per interval");
    require(report, finite(fit.alpha_used) && fit.alpha_used > 0.0, "alpha_used > 0");
    for (const QuarticCoeffs& q : fit.coefficients) {
        if (!finite(q.a) || !finite(q.b) || !finite(q.c) || !finite(q.d) || !finite(q.e)) {
            report.emplace_back("coefficients are finite");
            break;
        }
    }
    return report;
}

std::vector<std::string> validate(const FitConfig& config) {
    std::vector<std::string> report;
    require(report, config.k == 2, "k == 2 (only the second-derivative penalty is implemented)");
    require(report, config.quantile_level > 0.0 && config.quantile_level < 0.37,
            "quantile_level in (0, 0.37)");
    require(report, config.tau_cont > 0.0, "tau_cont > 0");
    require(report, config.tau_el > 0.0, "tau_el > 0");
    require(report, config.tau_solve > 0.0, "tau_solve > 0");
    if (const auto* fixed = std::get_if<ExplicitAlpha>(&config.alpha_mode)) {
        require(report, finite(fixed->alpha) && fixed->alpha > 0.0, "alpha > 0");
    } else {
        const auto& rule = std::get<CbarRule>(config.alpha_mode);
        require(report, finite(rule.c_bar) && rule.c_bar > 0.0, "c_bar > 0");
        require(report, finite(rule.sigma2) && rule.sigma2 > 0.0, "sigma2 > 0");
        require(report, rule.N >= 1, "N >= 1");
    }
    return report;
}

std::vector<std::string> validate(const BoundInputs& inputs) {
    std::vector<std::string> report;
    require(report, finite(inputs.Q) && inputs.Q > 0.0, "Q > 0");
    require(report, finite(inputs.y_k_norm) && inputs.y_k_norm >= 0.0, "y_k_norm >= 0");
    require(report, finite(inputs.C1) && inputs.C1 > 0.0, "C1 > 0");
    require(report, finite(inputs.C2) && inputs.C2 > 0.0, "C2 > 0");
    require(report, finite(inputs.sigma2) && inputs.sigma2 > 0.0, "sigma2 > 0");
    require(report, inputs.M > 0, "M > 0");
    require(report, inputs.N > 0, "N > 0");
    require(report, finite(inputs.p) && inputs.p > 0.0 && inputs.p < 0.37, "p in (0, 0.37)");
    return report;
}

void throw_validation(const std::vector<std::string>& report) {
    std::string msg = "validation failed";
    for (const std::string& line : report) {
        msg += ": ";
        msg += line;
    }
    throw ValidationError(msg);
}

}  // namespace groupdiff
