#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace imkg {

// Shortest text is not enough for the CSV contract, so always 17 significant digits.
inline std::string fmt17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string join17(const std::vector<double>& v, const char* sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt17(v[i]);
    }
    return out;
}

}  // namespace imkg
