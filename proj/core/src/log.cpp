#include "groupdiff/log.hpp"

#include <cstdio>

namespace groupdiff {

namespace {

void default_warn(const std::string& message) {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
}

WarnHandler g_handler = &default_warn;

}  // namespace

WarnHandler set_warn_handler(WarnHandler handler) {
    WarnHandler previous = g_handler;
    g_handler = handler ? handler : &default_warn;
    return previous;
}

void warn(const std::string& message) {
    g_handler(message);
}

}  // namespace groupdiff
