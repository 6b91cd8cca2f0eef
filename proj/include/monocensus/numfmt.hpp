#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace monocensus {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v, std::string_view missing) {
    return v ? format_double(*v) : std::string(missing);
}

}  // namespace monocensus
