#pragma once

#include <charconv>
#include <string>

namespace divdraw {

/// 17 significant digits via to_chars: round-trips every double and is
/// locale-independent, which the CSV stability contract needs.
inline std::string fmt_double(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

} // namespace divdraw
