#pragma once

#include <string>

#include "groupdiff/types.hpp"

namespace harness {

// Shortest decimal that round-trips to the exact double (via std::to_chars).
std::string format_double(double value);

// Reads `x,y` rows (optional single header line) into a sample set.  The x
// column must be uniform on [0,1] to relative 1e-9; the first row supplies
// y(0).  Throws ParseError with the offending line number, or
// NonUniformGridError.
groupdiff::NoisySampleSet ingest_csv(const std::string& path);

// `x,y` rows for nodes 0..L, ingestible by ingest_csv.
void write_samples_csv(const groupdiff::NoisySampleSet& samples, const std::string& path);

// `x,f,f1` rows sampled points_per_interval times per coarse interval.
void write_curve_csv(const groupdiff::PiecewiseQuartic& fit, const std::string& path,
                     int points_per_interval = 20);

// `x,ybar` rows, one per group, at interval midpoints.
void write_grouped_csv(const groupdiff::GroupedObservations& grouped, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace harness
