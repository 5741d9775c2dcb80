#ifndef ONEBIT_IO_HPP
#define ONEBIT_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quantize.hpp"

namespace onebit {

/// Malformed or out-of-range configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output (CLI exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest text that round-trips the double exactly.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Whitespace-separated reals; '#' starts a comment running to end of line.
inline std::vector<double> parse_vector(const std::string& text, const std::string& origin) {
    std::vector<double> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
                throw ConfigError("'" + origin + "': bad number '" + tok + "'");
            out.push_back(v);
        }
    }
    return out;
}

inline std::vector<double> read_vector_file(const std::string& path) {
    return parse_vector(read_text_file(path), path);
}

/// One value per line.
inline std::string format_vector(std::span<const double> v) {
    std::string out;
    for (double x : v) {
        out += format_double(x);
        out += '\n';
    }
    return out;
}

/// Signs file: one of +1 / -1 (or 1 / -1) per entry.
inline SignVector read_signs_file(const std::string& path) {
    const auto values = read_vector_file(path);
    SignVector q;
    q.reserve(values.size());
    for (double v : values) {
        if (v != 1.0 && v != -1.0) throw ConfigError("'" + path + "': sign entries must be +1 or -1");
        q.push_back(static_cast<Sign>(v));
    }
    return q;
}

inline std::string format_signs(const SignVector& q) {
    std::string out;
    for (Sign s : q) out += s > 0 ? "1\n" : "-1\n";
    return out;
}

}  // namespace onebit

#endif  // ONEBIT_IO_HPP
