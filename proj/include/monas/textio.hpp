#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

#include "monas/errors.hpp"

namespace monas {

// Shortest decimal form that round-trips to the same double; locale
// independent, so emitted files are platform-stable.
inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw Error("bad numeric field '" + s + "'");
    }
    return v;
}

inline std::int64_t parse_int(const std::string& s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw Error("bad integer field '" + s + "'");
    }
    return v;
}

}  // namespace monas
