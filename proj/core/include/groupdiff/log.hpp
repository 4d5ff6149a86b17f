#ifndef GROUPDIFF_LOG_HPP
#define GROUPDIFF_LOG_HPP

#include <string>

namespace groupdiff {

// Non-fatal diagnostics (truncation, dropped L-curve points, corner
// fallback) go through a swappable handler so library code never writes
// to files and tests can capture messages. Default prints to stderr.

using WarnHandler = void (*)(const std::string&);

WarnHandler set_warn_handler(WarnHandler handler);
void warn(const std::string& message);

}  // namespace groupdiff

#endif
