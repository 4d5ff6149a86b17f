#include "harness/csvio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "groupdiff/errors.hpp"
#include "groupdiff/quartic_fit.hpp"

namespace harness {

namespace {

using groupdiff::NonUniformGridError;
using groupdiff::ParseError;

bool parse_double(std::string_view token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) {
        ++begin;
    }
    while (end != begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) {
        --end;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && begin != end;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw groupdiff::NumericalError("double formatting failed");
    }
    return std::string(buf, ptr);
}

groupdiff::NoisySampleSet ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("line " + std::to_string(line_number) + ": expected 'x,y'");
        }
        double x = 0.0;
        double y = 0.0;
        const bool ok = parse_double(std::string_view(line).substr(0, comma), x) &&
                        parse_double(std::string_view(line).substr(comma + 1), y);
        if (!ok) {
            if (line_number == 1 && xs.empty()) {
                continue;  // optional header
            }
            throw ParseError("line " + std::to_string(line_number) + ": not numeric");
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.size() < 2) {
        throw ParseError("need at least 2 data rows, got " + std::to_string(xs.size()));
    }
    const auto L = static_cast<std::int64_t>(xs.size()) - 1;
    const double step = 1.0 / static_cast<double>(L);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double expected = static_cast<double>(j) * step;
        if (std::abs(xs[j] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw NonUniformGridError("x column is not uniform on [0,1] at row " +
                                      std::to_string(j + 1) + ": got " + format_double(xs[j]) +
                                      ", expected " + format_double(expected));
        }
    }
    groupdiff::NoisySampleSet samples;
    samples.grid = groupdiff::UniformGrid{L};
    samples.values.assign(ys.begin() + 1, ys.end());
    samples.left_endpoint_value = ys.front();
    samples.right_endpoint_value = ys.back();
    return groupdiff::checked(samples);
}

void write_samples_csv(const groupdiff::NoisySampleSet& samples, const std::string& path) {
    std::ostringstream out;
    out << "x,y\n";
    const auto L = samples.grid.node_count;
    out << format_double(0.0) << ',' << format_double(samples.left_endpoint_value) << '\n';
    for (std::int64_t j = 1; j <= L; ++j) {
        out << format_double(samples.grid.node(j)) << ','
            << format_double(samples.values[static_cast<std::size_t>(j - 1)]) << '\n';
    }
    write_text_file(path, out.str());
}

void write_curve_csv(const groupdiff::PiecewiseQuartic& fit, const std::string& path,
                     int points_per_interval) {
    if (points_per_interval < 1) {
        throw groupdiff::ConfigError("points_per_interval must be positive");
    }
    std::ostringstream out;
    out << "x,f,f1\n";
    const auto M = fit.interval_count();
    const auto total = M * points_per_interval;
    for (std::int64_t s = 0; s <= total; ++s) {
        const double x = static_cast<double>(s) / static_cast<double>(total);
        out << format_double(x) << ',' << format_double(groupdiff::evaluate(fit, x, 0)) << ','
            << format_double(groupdiff::evaluate(fit, x, 1)) << '\n';
    }
    write_text_file(path, out.str());
}

void write_grouped_csv(const groupdiff::GroupedObservations& grouped, const std::string& path) {
    std::ostringstream out;
    out << "x,ybar\n";
    const auto M = grouped.group_count();
    const double h = grouped.coarse_grid.meshsize();
    for (std::int64_t i = 1; i <= M; ++i) {
        const double mid = (static_cast<double>(i) - 0.5) * h;
        out << format_double(mid) << ','
            << format_double(grouped.group_means[static_cast<std::size_t>(i - 1)]) << '\n';
    }
    write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw ParseError("write failed for '" + path + "'");
    }
}

}  // namespace harness
