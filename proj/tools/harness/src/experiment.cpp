#include "harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "groupdiff/errors.hpp"
#include "groupdiff/param_select.hpp"
#include "groupdiff/preprocess.hpp"
#include "groupdiff/quadrature.hpp"
#include "groupdiff/quartic_fit.hpp"
#include "groupdiff/rng.hpp"

namespace harness {

namespace {

using groupdiff::ConfigError;
using groupdiff::GroupedObservations;
using groupdiff::NoisySampleSet;
using groupdiff::ParseError;
using groupdiff::PiecewiseQuartic;
using groupdiff::QuarticFitter;
using nlohmann::json;

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double, std::milli>(now - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// Slot-indexed parallel loop: scheduling never affects results because each
// task writes only its own index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) {
        hw = 4;
    }
    const std::size_t workers = std::min<std::size_t>(hw, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known) {
    for (const auto& item : j.items()) {
        bool found = false;
        for (const char* key : known) {
            if (item.key() == key) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw ParseError("unknown config key '" + item.key() + "'");
        }
    }
}

ErrorReport column_medians(const std::vector<SeedOutcome>& outcomes) {
    std::vector<double> l2v;
    std::vector<double> liv;
    std::vector<double> l2d;
    std::vector<double> lid;
    std::vector<double> rt;
    for (const SeedOutcome& o : outcomes) {
        l2v.push_back(o.errors.l2_value);
        liv.push_back(o.errors.linf_value);
        l2d.push_back(o.errors.l2_deriv);
        lid.push_back(o.errors.linf_deriv);
        rt.push_back(o.errors.runtime_ms);
    }
    ErrorReport m;
    m.l2_value = median(std::move(l2v));
    m.linf_value = median(std::move(liv));
    m.l2_deriv = median(std::move(l2d));
    m.linf_deriv = median(std::move(lid));
    m.runtime_ms = median(std::move(rt));
    return m;
}

double regression_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        throw groupdiff::NumericalError("degenerate regression abscissae");
    }
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

FunctionSpec ExperimentConfig::function() const {
    if (function_id == "custom") {
        return FunctionSpec::polynomial(coefficients);
    }
    return FunctionSpec::builtin(function_id);
}

double ExperimentConfig::resolve_alpha(std::int64_t N) const {
    if (alpha) {
        if (!(*alpha > 0.0) || !std::isfinite(*alpha)) {
            throw ConfigError("alpha must be positive and finite");
        }
        return *alpha;
    }
    return groupdiff::alpha_from_cbar(resolved_c_bar(), sigma2, N);
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("malformed config JSON");
    }
    if (!j.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    reject_unknown_keys(j, {"function_id", "coefficients", "L", "sigma2", "M", "seed",
                            "alpha_mode", "allow_truncation", "out_dir"});
    ExperimentConfig config;
    if (j.contains("function_id")) {
        config.function_id = j.at("function_id").get<std::string>();
    }
    if (j.contains("coefficients")) {
        config.coefficients = j.at("coefficients").get<std::vector<double>>();
    }
    if (config.function_id == "custom" && config.coefficients.empty()) {
        throw ParseError("function_id 'custom' requires a coefficients array");
    }
    if (config.function_id != "custom" && !config.coefficients.empty()) {
        throw ParseError("coefficients are only valid with function_id 'custom'");
    }
    if (j.contains("L")) {
        config.L = j.at("L").get<std::int64_t>();
    }
    if (j.contains("sigma2")) {
        config.sigma2 = j.at("sigma2").get<double>();
    }
    if (j.contains("M")) {
        const json& m = j.at("M");
        config.M_values.clear();
        if (m.is_array()) {
            config.M_values = m.get<std::vector<std::int64_t>>();
        } else {
            config.M_values.push_back(m.get<std::int64_t>());
        }
    }
    if (j.contains("seed")) {
        config.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("allow_truncation")) {
        config.allow_truncation = j.at("allow_truncation").get<bool>();
    }
    if (j.contains("out_dir")) {
        config.out_dir = j.at("out_dir").get<std::string>();
    }
    if (j.contains("alpha_mode")) {
        const json& mode = j.at("alpha_mode");
        if (!mode.is_object()) {
            throw ParseError("alpha_mode must be an object");
        }
        reject_unknown_keys(mode, {"alpha", "c_bar"});
        if (mode.contains("alpha") == mode.contains("c_bar")) {
            throw ParseError("alpha_mode needs exactly one of 'alpha' or 'c_bar'");
        }
        if (mode.contains("alpha")) {
            config.alpha = mode.at("alpha").get<double>();
        } else {
            config.c_bar = mode.at("c_bar").get<double>();
        }
    }

    std::vector<std::string> problems;
    if (config.L < 4) {
        problems.push_back("L must be at least 4");
    }
    if (!(config.sigma2 >= 0.0) || !std::isfinite(config.sigma2)) {
        problems.push_back("sigma2 must be finite and nonnegative");
    }
    if (config.M_values.empty()) {
        problems.push_back("M list must be nonempty");
    }
    for (std::int64_t M : config.M_values) {
        if (M < 3 || M > config.L) {
            problems.push_back("each M must satisfy 3 <= M <= L");
            break;
        }
        if (!config.allow_truncation && config.L % M != 0) {
            problems.push_back("M = " + std::to_string(M) +
                               " does not divide L (set allow_truncation to accept)");
        }
    }
    if (config.alpha && (!(*config.alpha > 0.0) || !std::isfinite(*config.alpha))) {
        problems.push_back("alpha must be positive and finite");
    }
    if (config.c_bar && (!(*config.c_bar > 0.0) || !std::isfinite(*config.c_bar))) {
        problems.push_back("c_bar must be positive and finite");
    }
    if (!problems.empty()) {
        groupdiff::throw_validation(problems);
    }
    return config;
}

std::string experiment_config_to_json(const ExperimentConfig& config, int indent) {
    json j;
    j["function_id"] = config.function_id;
    if (!config.coefficients.empty()) {
        j["coefficients"] = config.coefficients;
    }
    j["L"] = config.L;
    j["sigma2"] = config.sigma2;
    j["M"] = config.M_values;
    j["seed"] = config.seed;
    if (config.alpha) {
        j["alpha_mode"] = json{{"alpha", *config.alpha}};
    } else if (config.c_bar) {
        j["alpha_mode"] = json{{"c_bar", *config.c_bar}};
    }
    j["allow_truncation"] = config.allow_truncation;
    j["out_dir"] = config.out_dir;
    return j.dump(indent);
}

NoisySampleSet generate_samples(const ExperimentConfig& config) {
    return generate_samples(config, config.seed);
}

NoisySampleSet generate_samples(const ExperimentConfig& config, std::uint64_t seed) {
    const FunctionSpec y = config.function();
    const auto L = config.L;
    NoisySampleSet samples;
    samples.grid = groupdiff::UniformGrid{L};
    samples.values.resize(static_cast<std::size_t>(L));
    const std::vector<double> noise =
        groupdiff::gaussian_vector(seed, static_cast<std::size_t>(L), std::sqrt(config.sigma2));
    for (std::int64_t jx = 1; jx <= L; ++jx) {
        samples.values[static_cast<std::size_t>(jx - 1)] =
            y(samples.grid.node(jx)) + noise[static_cast<std::size_t>(jx - 1)];
    }
    samples.left_endpoint_value = y(0.0);
    samples.right_endpoint_value = y(1.0);
    samples.values.back() = samples.right_endpoint_value;  // endpoint observation is exact
    samples.noise_variance = config.sigma2;
    return groupdiff::checked(samples);
}

double l2_error(const PiecewiseQuartic& f, const FunctionSpec& y, int order) {
    if (order != 0 && order != 1) {
        throw groupdiff::OrderError("l2_error supports orders 0 and 1");
    }
    const auto M = f.interval_count();
    const double h = f.coarse_grid.meshsize();
    const auto squared_gap = [&](double x) {
        const double d = y(x, order) - groupdiff::evaluate(f, x, order);
        return d * d;
    };
    double total = 0.0;
    for (std::int64_t i = 0; i < M; ++i) {
        total += groupdiff::simpson(squared_gap, static_cast<double>(i) * h,
                                    static_cast<double>(i + 1) * h, 20);
    }
    return std::sqrt(std::max(0.0, total));
}

double linf_error(const PiecewiseQuartic& f, const FunctionSpec& y, int order, std::int64_t L) {
    if (L < 1) {
        throw ConfigError("linf_error needs at least one node");
    }
    double worst = 0.0;
    for (std::int64_t jx = 1; jx <= L; ++jx) {
        const double x = static_cast<double>(jx) / static_cast<double>(L);
        worst = std::max(worst, std::abs(y(x, order) - groupdiff::evaluate(f, x, order)));
    }
    return worst;
}

ErrorReport measure_errors(const PiecewiseQuartic& f, const FunctionSpec& y, std::int64_t L) {
    ErrorReport report;
    report.l2_value = l2_error(f, y, 0);
    report.linf_value = linf_error(f, y, 0, L);
    report.l2_deriv = l2_error(f, y, 1);
    report.linf_deriv = linf_error(f, y, 1, L);
    return report;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw ConfigError("median of empty list");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<Table1Row> run_table1(const ExperimentConfig& config, int seed_count) {
    if (seed_count < 1) {
        throw ConfigError("seed_count must be positive");
    }
    const FunctionSpec y = config.function();
    std::vector<NoisySampleSet> samples(static_cast<std::size_t>(seed_count));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(seed_count));
    parallel_for(samples.size(), [&](std::size_t s) {
        seeds[s] = groupdiff::shard_seed(config.seed, s);
        samples[s] = generate_samples(config, seeds[s]);
    });

    std::vector<Table1Row> rows;
    rows.reserve(config.M_values.size());
    for (std::int64_t M : config.M_values) {
        const std::int64_t N = config.L / M;
        const double alpha = config.resolve_alpha(N);
        const QuarticFitter fitter(M, alpha);
        Table1Row row;
        row.M = M;
        row.per_seed.resize(samples.size());
        // Prime the factorization before fanning out; fit() caches it lazily.
        {
            const GroupedObservations g0 =
                groupdiff::group_samples(samples[0], M, config.allow_truncation);
            Stopwatch watch;
            const PiecewiseQuartic f0 = fitter.fit(g0);
            row.per_seed[0].seed = seeds[0];
            row.per_seed[0].errors = measure_errors(f0, y, config.L);
            row.per_seed[0].errors.runtime_ms = watch.ms();
        }
        parallel_for(samples.size(), [&](std::size_t s) {
            if (s == 0) {
                return;
            }
            Stopwatch watch;
            const GroupedObservations grouped =
                groupdiff::group_samples(samples[s], M, config.allow_truncation);
            const PiecewiseQuartic f = fitter.fit(grouped);
            row.per_seed[s].seed = seeds[s];
            row.per_seed[s].errors = measure_errors(f, y, config.L);
            row.per_seed[s].errors.runtime_ms = watch.ms();
        });
        row.median_errors = column_medians(row.per_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::int64_t convergence_group_size(std::int64_t L) {
    if (L < 9) {
        throw ConfigError("convergence run needs L >= 9");
    }
    const auto target = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(L), 0.8)));
    std::int64_t d = std::min(target, L / 3);  // keep at least 3 groups
    while (d > 1 && L % d != 0) {
        --d;
    }
    return std::max<std::int64_t>(d, 1);
}

ConvergenceResult run_convergence(const ExperimentConfig& config,
                                  const std::vector<std::int64_t>& L_list, int seed_count) {
    if (L_list.size() < 2) {
        throw ConfigError("convergence run needs at least two L values");
    }
    const FunctionSpec y = config.function();
    ConvergenceResult result;
    result.sigma_zero = config.sigma2 == 0.0;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::int64_t L : L_list) {
        const std::int64_t N = convergence_group_size(L);
        const std::int64_t M = L / N;
        double alpha = 0.0;
        if (result.sigma_zero) {
            alpha = config.alpha.value_or(1e-12);
        } else {
            alpha = config.alpha ? *config.alpha
                                 : groupdiff::alpha_from_cbar(config.resolved_c_bar(),
                                                              config.sigma2, N);
        }
        const QuarticFitter fitter(M, alpha);
        ExperimentConfig local = config;
        local.L = L;
        local.M_values = {M};
        std::vector<double> errs(static_cast<std::size_t>(seed_count));
        // Prime the shared factorization, then fan out.
        {
            const NoisySampleSet s0 = generate_samples(local, groupdiff::shard_seed(config.seed, 0));
            const GroupedObservations g0 = groupdiff::group_samples(s0, M);
            errs[0] = l2_error(fitter.fit(g0), y, 1);
        }
        parallel_for(errs.size(), [&](std::size_t s) {
            if (s == 0) {
                return;
            }
            const NoisySampleSet samples =
                generate_samples(local, groupdiff::shard_seed(config.seed, s));
            const GroupedObservations grouped = groupdiff::group_samples(samples, M);
            errs[s] = l2_error(fitter.fit(grouped), y, 1);
        });
        ConvergenceRecord record;
        record.L = L;
        record.M = M;
        record.N = N;
        record.median_l2_deriv = median(errs);
        result.records.push_back(record);
        xs.push_back(result.sigma_zero ? std::log(1.0 / static_cast<double>(M))
                                       : std::log(config.sigma2 / static_cast<double>(N)));
        ys.push_back(std::log(record.median_l2_deriv));
    }
    result.slope = regression_slope(xs, ys);
    return result;
}

BaselineResult run_baseline(const ExperimentConfig& config, int seed_count,
                            std::int64_t grouped_M, std::optional<double> alpha_override) {
    if (config.L > 5000) {
        throw groupdiff::ResourceGuardError(
            "ungrouped baseline refused for L = " + std::to_string(config.L) +
            ": the dense M = L system exceeds the resource budget (limit 5000); group first");
    }
    if (!(config.sigma2 > 0.0)) {
        throw ConfigError("baseline rule alpha = sigma2 requires sigma2 > 0");
    }
    if (grouped_M < 3 || config.L % grouped_M != 0) {
        throw ConfigError("grouped_M must divide L and be at least 3");
    }
    const FunctionSpec y = config.function();
    std::vector<NoisySampleSet> samples(static_cast<std::size_t>(seed_count));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(seed_count));
    parallel_for(samples.size(), [&](std::size_t s) {
        seeds[s] = groupdiff::shard_seed(config.seed, s);
        samples[s] = generate_samples(config, seeds[s]);
    });

    BaselineResult result;
    result.grouped_M = grouped_M;
    result.baseline_per_seed.resize(samples.size());
    result.grouped_per_seed.resize(samples.size());

    // The ungrouped reference rule is alpha = delta^2 with delta an a-priori
    // uniform noise bound, weighted against an unnormalized misfit sum.  For
    // Gaussian noise the conventional envelope is delta = 2*sigma, and our
    // misfit averages over the M = L terms, so the equivalent weight here is
    // (2 sigma)^2 / L.
    const double baseline_alpha =
        alpha_override.value_or(4.0 * config.sigma2 / static_cast<double>(config.L));
    const QuarticFitter baseline_fitter(config.L, baseline_alpha);
    const std::int64_t N = config.L / grouped_M;
    const double grouped_alpha = config.resolve_alpha(N);
    const QuarticFitter grouped_fitter(grouped_M, grouped_alpha);

    std::size_t wins = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        GroupedObservations ungrouped;
        ungrouped.coarse_grid = groupdiff::UniformGrid{config.L};
        ungrouped.group_size = 1;
        ungrouped.group_means = samples[s].values;
        ungrouped.left_endpoint_value = samples[s].left_endpoint_value;
        ungrouped.right_endpoint_value = samples[s].right_endpoint_value;
        ungrouped.noise_variance_original = config.sigma2;

        Stopwatch base_watch;
        const PiecewiseQuartic f_base = baseline_fitter.fit(groupdiff::checked(ungrouped));
        ErrorReport base_errors = measure_errors(f_base, y, config.L);
        base_errors.runtime_ms = base_watch.ms();
        result.baseline_per_seed[s] = SeedOutcome{seeds[s], base_errors};

        Stopwatch grouped_watch;
        const GroupedObservations grouped = groupdiff::group_samples(samples[s], grouped_M);
        const PiecewiseQuartic f_grouped = grouped_fitter.fit(grouped);
        ErrorReport grouped_errors = measure_errors(f_grouped, y, config.L);
        grouped_errors.runtime_ms = grouped_watch.ms();
        result.grouped_per_seed[s] = SeedOutcome{seeds[s], grouped_errors};

        if (grouped_errors.l2_value <= base_errors.l2_value) {
            ++wins;
        }
    }
    result.baseline_median = column_medians(result.baseline_per_seed);
    result.grouped_median = column_medians(result.grouped_per_seed);
    result.grouped_win_fraction =
        static_cast<double>(wins) / static_cast<double>(samples.size());
    return result;
}

BigdataResult run_bigdata(const ExperimentConfig& config, int seed_count) {
    if (seed_count < 1) {
        throw ConfigError("seed_count must be positive");
    }
    if (config.M_values.size() != 1) {
        throw ConfigError("bigdata run expects a single M");
    }
    const std::int64_t M = config.M_values.front();
    const std::int64_t N = config.L / M;
    const FunctionSpec y = config.function();
    double alpha = 0.0;
    if (config.alpha) {
        alpha = *config.alpha;
    } else if (config.sigma2 > 0.0) {
        // Big-data default: c_bar = 1, so alpha is the post-grouping variance.
        alpha = groupdiff::alpha_from_cbar(config.c_bar.value_or(1.0), config.sigma2, N);
    } else {
        alpha = 1e-12;
    }
    const QuarticFitter fitter(M, alpha);

    BigdataResult result;
    result.per_seed.resize(static_cast<std::size_t>(seed_count));
    std::vector<GroupedObservations> grouped(static_cast<std::size_t>(seed_count));
    std::vector<double> group_ms(static_cast<std::size_t>(seed_count));
    parallel_for(grouped.size(), [&](std::size_t s) {
        const std::uint64_t seed = groupdiff::shard_seed(config.seed, s);
        result.per_seed[s].seed = seed;
        const NoisySampleSet samples = generate_samples(config, seed);
        Stopwatch watch;
        grouped[s] = groupdiff::group_samples(samples, M, config.allow_truncation);
        group_ms[s] = watch.ms();
    });

    const double y_norm = y.derivative_l2_norm(0);
    std::vector<double> relative(grouped.size());
    for (std::size_t s = 0; s < grouped.size(); ++s) {
        Stopwatch watch;
        const PiecewiseQuartic f = fitter.fit(grouped[s]);
        const double fit_ms = watch.ms();
        ErrorReport errors = measure_errors(f, y, config.L);
        errors.runtime_ms = group_ms[s] + fit_ms;
        result.per_seed[s].errors = errors;
        relative[s] = errors.l2_value / y_norm;
        result.max_runtime_ms = std::max(result.max_runtime_ms, errors.runtime_ms);
    }
    result.median_errors = column_medians(result.per_seed);
    result.median_relative_l2 = median(std::move(relative));
    return result;
}

}  // namespace harness
