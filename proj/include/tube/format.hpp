#pragma once

#include <charconv>
#include <string>

namespace tube {

/// Locale-independent text with 17 significant digits ('.' decimal).
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Shortest text that reads back to the same double, for labels and file names.
inline std::string format_shortest(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace tube
