#pragma once

#include <cstdio>
#include <string>

namespace sazig {

// %.17g: enough significant digits for a double to round-trip through
// decimal text exactly.
inline std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Shorter form for human-facing exports where exact round-trip is not
// needed.
inline std::string format_brief(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

}  // namespace sazig
