#ifndef SICA_SRC_TEXT_IO_HPP
#define SICA_SRC_TEXT_IO_HPP

// Internal locale-independent number formatting and snapshot CSV helpers.

#include <charconv>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sica/grid.hpp"

namespace sica::detail {

/// `digits` significant digits, general format (what "%.Ng" would print in
/// the C locale, but locale-proof).
inline std::string format_double(double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                             digits);
    return std::string(buf, res.ptr);
}

/// Shortest representation that parses back to exactly `v`.
inline std::string format_double_exact(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    long long v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

/// Snapshot grid format: ny lines, line j holding f(0,j)..f(nx-1,j)
/// comma-separated.
Field read_field_csv(const std::filesystem::path& path, int nx, int ny);
void write_field_csv(const std::filesystem::path& path, const Field& f, int digits);

}  // namespace sica::detail

#endif  // SICA_SRC_TEXT_IO_HPP
