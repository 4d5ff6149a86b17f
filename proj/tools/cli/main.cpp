#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "groupdiff/errors.hpp"
#include "groupdiff/param_select.hpp"
#include "groupdiff/preprocess.hpp"
#include "groupdiff/quartic_fit.hpp"
#include "groupdiff/serialize.hpp"
#include "groupdiff/stat_bounds.hpp"
#include "harness/csvio.hpp"
#include "harness/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using harness::ExperimentConfig;
using harness::format_double;
using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw groupdiff::ParseError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int seed_count = 0;  // 0 means subcommand default
    std::string input_csv;
};

void add_common(CLI::App* sub, CommonFlags& flags, bool with_input = false) {
    sub->add_option("--config", flags.config_path, "experiment config JSON file");
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--out-dir", flags.out_dir, "output directory (default from config)");
    sub->add_option("--seeds", flags.seed_count, "number of replicate seeds");
    if (with_input) {
        sub->add_option("--input", flags.input_csv, "ingest samples from this CSV instead of generating");
    }
}

ExperimentConfig load_config(const ExperimentConfig& preset, const CommonFlags& flags) {
    ExperimentConfig config = preset;
    if (!flags.config_path.empty()) {
        config = harness::parse_experiment_config(slurp(flags.config_path));
    }
    if (flags.seed) {
        config.seed = *flags.seed;
    }
    if (flags.out_dir) {
        config.out_dir = *flags.out_dir;
    }
    fs::create_directories(config.out_dir);
    return config;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

json errors_to_json(const harness::ErrorReport& errors) {
    // runtime_ms stays out: artifact files must be identical across reruns.
    return json{{"l2_value", errors.l2_value},
                {"linf_value", errors.linf_value},
                {"l2_deriv", errors.l2_deriv},
                {"linf_deriv", errors.linf_deriv}};
}

int cmd_generate(const CommonFlags& flags) {
    const ExperimentConfig config = load_config({}, flags);
    const groupdiff::NoisySampleSet samples = harness::generate_samples(config);
    harness::write_samples_csv(samples, join(config.out_dir, "samples.csv"));
    std::cout << "wrote samples.csv: L=" << samples.grid.node_count << " function="
              << config.function_id << " sigma2=" << format_double(config.sigma2) << "\n";
    return 0;
}

int cmd_fit(const CommonFlags& flags) {
    const ExperimentConfig config = load_config({}, flags);
    const std::int64_t M = config.M_values.front();

    groupdiff::NoisySampleSet samples;
    bool synthetic = flags.input_csv.empty();
    if (synthetic) {
        samples = harness::generate_samples(config);
    } else {
        samples = harness::ingest_csv(flags.input_csv);
    }
    const std::int64_t N = samples.grid.node_count / M;
    const double alpha = config.resolve_alpha(N);

    const auto t0 = std::chrono::steady_clock::now();
    const groupdiff::GroupedObservations grouped =
        groupdiff::group_samples(samples, M, config.allow_truncation);
    groupdiff::FitConfig fit_config;
    fit_config.alpha_mode = groupdiff::ExplicitAlpha{alpha};
    const groupdiff::PiecewiseQuartic fit = groupdiff::fit(grouped, fit_config);
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "runtime_ms "
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";

    harness::write_curve_csv(fit, join(config.out_dir, "curve.csv"));
    harness::write_grouped_csv(grouped, join(config.out_dir, "grouped.csv"));
    harness::write_text_file(join(config.out_dir, "fit.json"), groupdiff::to_json(fit, 2) + "\n");
    if (synthetic) {
        const harness::ErrorReport errors =
            harness::measure_errors(fit, config.function(), samples.grid.node_count);
        harness::write_text_file(join(config.out_dir, "errors.json"),
                                 errors_to_json(errors).dump(2) + "\n");
    }
    std::cout << "fit: M=" << M << " alpha=" << format_double(alpha) << "\n";
    return 0;
}

int cmd_lcurve(const CommonFlags& flags) {
    const ExperimentConfig config = load_config({}, flags);
    const std::int64_t M = config.M_values.front();
    groupdiff::NoisySampleSet samples;
    if (flags.input_csv.empty()) {
        samples = harness::generate_samples(config);
    } else {
        samples = harness::ingest_csv(flags.input_csv);
    }
    const groupdiff::GroupedObservations grouped =
        groupdiff::group_samples(samples, M, config.allow_truncation);
    groupdiff::LCurve curve = groupdiff::lcurve_scan(grouped, config.sigma2);
    const groupdiff::CornerResult corner = groupdiff::lcurve_corner(curve);

    std::ostringstream csv;
    csv << "c_bar,alpha,log_penalty,log_residual,chosen\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& point = curve.points[i];
        csv << format_double(point.c_bar) << ',' << format_double(point.alpha) << ','
            << format_double(point.log_penalty) << ',' << format_double(point.log_residual)
            << ',' << (i == corner.index ? '1' : '0') << '\n';
    }
    harness::write_text_file(join(config.out_dir, "lcurve.csv"), csv.str());
    const json summary{{"chosen_index", corner.index},
                       {"c_bar", corner.c_bar},
                       {"alpha", corner.alpha},
                       {"fallback_used", corner.fallback_used}};
    harness::write_text_file(join(config.out_dir, "lcurve.json"), summary.dump(2) + "\n");
    std::cout << "lcurve corner: c_bar=" << format_double(corner.c_bar)
              << " alpha=" << format_double(corner.alpha)
              << (corner.fallback_used ? " (fallback)" : "") << "\n";
    return 0;
}

int cmd_bound(const std::string& inputs_path, double c_bar, const std::string& out_dir,
              std::optional<double> h, std::optional<double> e1_norm) {
    fs::create_directories(out_dir);
    const groupdiff::BoundInputs inputs =
        groupdiff::from_json<groupdiff::BoundInputs>(slurp(inputs_path));
    const double h_M = 1.0 / static_cast<double>(inputs.M);
    json out;
    out["z_bar"] = groupdiff::chi_upper_quantile_bound(inputs.M, inputs.p);
    out["bound_ek"] = groupdiff::bound_ek(inputs, c_bar, h_M);
    out["bound_rate"] = json{{"j0", groupdiff::bound_rate(inputs, 0, h_M)},
                             {"j1", groupdiff::bound_rate(inputs, 1, h_M)}};
    if (h && e1_norm) {
        out["bound_e"] = groupdiff::bound_e(inputs, c_bar, h_M, *h, *e1_norm);
    }
    const std::string text = out.dump(2) + "\n";
    harness::write_text_file(join(out_dir, "bounds.json"), text);
    std::cout << text;
    return 0;
}

int cmd_coverage(std::int64_t M, std::int64_t N, double sigma2, double p, std::int64_t trials,
                 std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const groupdiff::CoverageReport report =
        groupdiff::coverage_probability(M, N, sigma2, p, trials, seed);
    const json out{{"M", report.M},           {"N", report.N},
                   {"sigma2", report.sigma2}, {"p", report.p},
                   {"z_bar", report.z_bar},   {"trials", report.trials},
                   {"coverage", report.coverage}, {"seed", report.seed}};
    harness::write_text_file(join(out_dir, "coverage.json"), out.dump(2) + "\n");
    std::cout << "coverage=" << format_double(report.coverage)
              << " target>=" << format_double(1.0 - report.p) << "\n";
    return 0;
}

int cmd_table1(const CommonFlags& flags) {
    ExperimentConfig preset;
    preset.M_values = {5, 10, 50, 100, 200};
    const ExperimentConfig config = load_config(preset, flags);
    const int seeds = flags.seed_count > 0 ? flags.seed_count : 20;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<harness::Table1Row> rows = harness::run_table1(config, seeds);
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "runtime_ms "
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";

    std::ostringstream medians;
    medians << "M,l2_value,linf_value,l2_deriv,linf_deriv\n";
    std::ostringstream raw;
    raw << "M,seed_index,seed,l2_value,linf_value,l2_deriv,linf_deriv\n";
    for (const auto& row : rows) {
        medians << row.M << ',' << format_double(row.median_errors.l2_value) << ','
                << format_double(row.median_errors.linf_value) << ','
                << format_double(row.median_errors.l2_deriv) << ','
                << format_double(row.median_errors.linf_deriv) << '\n';
        for (std::size_t s = 0; s < row.per_seed.size(); ++s) {
            const auto& outcome = row.per_seed[s];
            raw << row.M << ',' << s << ',' << outcome.seed << ','
                << format_double(outcome.errors.l2_value) << ','
                << format_double(outcome.errors.linf_value) << ','
                << format_double(outcome.errors.l2_deriv) << ','
                << format_double(outcome.errors.linf_deriv) << '\n';
        }
    }
    harness::write_text_file(join(config.out_dir, "table1_median.csv"), medians.str());
    harness::write_text_file(join(config.out_dir, "table1_raw.csv"), raw.str());
    std::cout << medians.str();
    return 0;
}

int cmd_convergence(const CommonFlags& flags, std::vector<std::int64_t> L_list) {
    ExperimentConfig preset;
    const ExperimentConfig config = load_config(preset, flags);
    const int seeds = flags.seed_count > 0 ? flags.seed_count : 20;
    if (L_list.empty()) {
        L_list = {1000, 10000, 100000};
    }
    const auto t0 = std::chrono::steady_clock::now();
    const harness::ConvergenceResult result = harness::run_convergence(config, L_list, seeds);
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "runtime_ms "
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";

    std::ostringstream csv;
    csv << "L,M,N,l2_deriv_median\n";
    json records = json::array();
    for (const auto& record : result.records) {
        csv << record.L << ',' << record.M << ',' << record.N << ','
            << format_double(record.median_l2_deriv) << '\n';
        records.push_back(json{{"L", record.L},
                               {"M", record.M},
                               {"N", record.N},
                               {"l2_deriv_median", record.median_l2_deriv}});
    }
    harness::write_text_file(join(config.out_dir, "convergence.csv"), csv.str());
    const json out{{"records", records},
                   {"slope", result.slope},
                   {"sigma_zero", result.sigma_zero}};
    harness::write_text_file(join(config.out_dir, "convergence.json"), out.dump(2) + "\n");
    std::cout << csv.str() << "slope=" << format_double(result.slope) << "\n";
    return 0;
}

int cmd_baseline(const CommonFlags& flags, std::int64_t grouped_M,
                 std::optional<double> alpha_override) {
    ExperimentConfig preset;
    const ExperimentConfig config = load_config(preset, flags);
    const int seeds = flags.seed_count > 0 ? flags.seed_count : 20;
    const auto t0 = std::chrono::steady_clock::now();
    const harness::BaselineResult result =
        harness::run_baseline(config, seeds, grouped_M, alpha_override);
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "runtime_ms "
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";

    std::ostringstream raw;
    raw << "method,seed_index,seed,l2_value,linf_value,l2_deriv,linf_deriv\n";
    const auto dump_rows = [&raw](const char* method,
                                  const std::vector<harness::SeedOutcome>& outcomes) {
        for (std::size_t s = 0; s < outcomes.size(); ++s) {
            raw << method << ',' << s << ',' << outcomes[s].seed << ','
                << format_double(outcomes[s].errors.l2_value) << ','
                << format_double(outcomes[s].errors.linf_value) << ','
                << format_double(outcomes[s].errors.l2_deriv) << ','
                << format_double(outcomes[s].errors.linf_deriv) << '\n';
        }
    };
    dump_rows("baseline", result.baseline_per_seed);
    dump_rows("grouped", result.grouped_per_seed);
    harness::write_text_file(join(config.out_dir, "baseline_raw.csv"), raw.str());
    const json out{{"baseline_median", errors_to_json(result.baseline_median)},
                   {"grouped_median", errors_to_json(result.grouped_median)},
                   {"grouped_M", result.grouped_M},
                   {"grouped_win_fraction", result.grouped_win_fraction}};
    harness::write_text_file(join(config.out_dir, "baseline.json"), out.dump(2) + "\n");
    std::cout << "baseline l2_value_median=" << format_double(result.baseline_median.l2_value)
              << " grouped_win_fraction=" << format_double(result.grouped_win_fraction) << "\n";
    return 0;
}

int cmd_bigdata(const CommonFlags& flags) {
    ExperimentConfig preset;
    preset.function_id = "bump";
    preset.L = 1000000;
    preset.sigma2 = 0.25;
    preset.M_values = {10};
    preset.c_bar = 1.0;
    const ExperimentConfig config = load_config(preset, flags);
    const int seeds = flags.seed_count > 0 ? flags.seed_count : 10;
    const auto t0 = std::chrono::steady_clock::now();
    const harness::BigdataResult result = harness::run_bigdata(config, seeds);
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "runtime_ms "
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << " max_per_seed_ms "
              << result.max_runtime_ms << "\n";

    json per_seed = json::array();
    for (const auto& outcome : result.per_seed) {
        per_seed.push_back(json{{"seed", outcome.seed}, {"errors", errors_to_json(outcome.errors)}});
    }
    const json out{{"median_errors", errors_to_json(result.median_errors)},
                   {"median_relative_l2", result.median_relative_l2},
                   {"per_seed", per_seed}};
    harness::write_text_file(join(config.out_dir, "bigdata.json"), out.dump(2) + "\n");
    std::cout << "bigdata median_relative_l2=" << format_double(result.median_relative_l2)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grouped Tikhonov differentiation toolkit"};
    app.require_subcommand(1);

    CommonFlags generate_flags;
    CLI::App* generate = app.add_subcommand("generate", "synthesize a noisy sample CSV");
    add_common(generate, generate_flags);

    CommonFlags fit_flags;
    CLI::App* fit = app.add_subcommand("fit", "group samples and fit the quartic minimizer");
    add_common(fit, fit_flags, true);

    CommonFlags lcurve_flags;
    CLI::App* lcurve = app.add_subcommand("lcurve", "scan c_bar values and pick the corner");
    add_common(lcurve, lcurve_flags, true);

    std::string bound_inputs;
    double bound_c_bar = 0.0239;
    std::string bound_out = ".";
    std::optional<double> bound_h;
    std::optional<double> bound_e1;
    CLI::App* bound = app.add_subcommand("bound", "evaluate the error bounds");
    bound->add_option("--inputs", bound_inputs, "bound inputs JSON file")->required();
    bound->add_option("--c-bar", bound_c_bar, "regularization constant");
    bound->add_option("--out-dir", bound_out, "output directory");
    bound->add_option("--fine-h", bound_h, "fine meshsize for the value bound");
    bound->add_option("--e1-norm", bound_e1, "L2 norm of the derivative error");

    std::int64_t cov_M = 10;
    std::int64_t cov_N = 100;
    double cov_sigma2 = 1.0;
    double cov_p = 0.05;
    std::int64_t cov_trials = 10000;
    std::uint64_t cov_seed = 1;
    std::string cov_out = ".";
    CLI::App* coverage = app.add_subcommand("coverage", "Monte-Carlo coverage of the chi bound");
    coverage->add_option("--M", cov_M, "group count");
    coverage->add_option("--N", cov_N, "group size");
    coverage->add_option("--sigma2", cov_sigma2, "noise variance");
    coverage->add_option("--p", cov_p, "tail probability in (0, 0.37)");
    coverage->add_option("--trials", cov_trials, "Monte-Carlo trials");
    coverage->add_option("--seed", cov_seed, "RNG seed");
    coverage->add_option("--out-dir", cov_out, "output directory");

    CommonFlags table1_flags;
    CLI::App* table1 = app.add_subcommand("table1", "error table across group counts");
    add_common(table1, table1_flags);

    CommonFlags conv_flags;
    std::vector<std::int64_t> conv_L;
    CLI::App* convergence = app.add_subcommand("convergence", "error scaling across sample sizes");
    add_common(convergence, conv_flags);
    convergence->add_option("--L", conv_L, "sample sizes (repeatable)");

    CommonFlags baseline_flags;
    std::int64_t baseline_grouped_M = 10;
    std::optional<double> baseline_alpha;
    CLI::App* baseline = app.add_subcommand("baseline", "ungrouped reference fit (M = L)");
    add_common(baseline, baseline_flags);
    baseline->add_option("--grouped-M", baseline_grouped_M, "group count for the comparison run");
    baseline->add_option("--alpha", baseline_alpha, "override the reference regularization weight");

    CommonFlags bigdata_flags;
    CLI::App* bigdata = app.add_subcommand("bigdata", "million-sample pipeline run");
    add_common(bigdata, bigdata_flags);

    try {
        app.parse(argc, argv);
        if (generate->parsed()) {
            return cmd_generate(generate_flags);
        }
        if (fit->parsed()) {
            return cmd_fit(fit_flags);
        }
        if (lcurve->parsed()) {
            return cmd_lcurve(lcurve_flags);
        }
        if (bound->parsed()) {
            return cmd_bound(bound_inputs, bound_c_bar, bound_out, bound_h, bound_e1);
        }
        if (coverage->parsed()) {
            return cmd_coverage(cov_M, cov_N, cov_sigma2, cov_p, cov_trials, cov_seed, cov_out);
        }
        if (table1->parsed()) {
            return cmd_table1(table1_flags);
        }
        if (convergence->parsed()) {
            return cmd_convergence(conv_flags, conv_L);
        }
        if (baseline->parsed()) {
            return cmd_baseline(baseline_flags, baseline_grouped_M, baseline_alpha);
        }
        if (bigdata->parsed()) {
            return cmd_bigdata(bigdata_flags);
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const groupdiff::ResourceGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const groupdiff::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const groupdiff::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
