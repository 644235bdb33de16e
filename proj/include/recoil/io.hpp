#pragma once

// File formats: shortest round-trip numbers, a strict CSV dialect (comma,
// header row, LF endings) and SHA-256 input hashes.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <openssl/evp.h>

#include "recoil/errors.hpp"

namespace recoil::io {

/// I/O failures are runtime failures, not input errors.
class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io_error"; }
};

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("not a number: '" + std::string(s) + "'");
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw IoError("missing CSV column '" + std::string(name) + "'");
    }
};

namespace detail {

inline void check_field(const std::string& f) {
    if (f.find_first_of(",\n\r\"") != std::string::npos) throw IoError("CSV field needs quoting: '" + f + "'");
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const CsvTable& t) {
    auto line = [&](const std::vector<std::string>& fields) {
        if (fields.size() != t.header.size()) throw IoError("CSV row width differs from header");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            detail::check_field(fields[i]);
            if (i) os << ',';
            os << fields[i];
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty CSV");
    if (!line.empty() && line.back() == '\r') throw IoError("CSV must use LF line endings");
    t.header = detail::split_line(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = detail::split_line(line);
        if (fields.size() != t.header.size()) throw IoError("CSV row width differs from header");
        t.rows.push_back(std::move(fields));
    }
    return t;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw IoError("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_csv_file(const std::string& path, const CsvTable& t) {
    std::ostringstream ss;
    write_csv(ss, t);
    write_text_file(path, ss.str());
}

inline CsvTable read_csv_file(const std::string& path) {
    std::istringstream ss(read_text_file(path));
    return read_csv(ss);
}

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("SHA-256 computation failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

}  // namespace recoil::io
