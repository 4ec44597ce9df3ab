#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace paflow {

// Fixed-format float printing so reports are byte-stable across runs.
// %.12g is enough to round-trip doubles we care about without trailing noise.
inline std::string fmt_real(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string fmt_real(double x, int digits) {
    if (x == 0.0) x = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

// Ordered key/value report; renders as "key: value" lines.
class Report {
public:
    void put(const std::string& key, const std::string& value) {
        lines_.emplace_back(key, value);
    }
    // keep string literals away from the bool overload
    void put(const std::string& key, const char* value) { put(key, std::string(value)); }
    void put(const std::string& key, double value) { put(key, fmt_real(value)); }
    void put(const std::string& key, long long value) { put(key, std::to_string(value)); }
    void put(const std::string& key, int value) { put(key, std::to_string(value)); }
    void put(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
    void put(const std::string& key, bool value) { put(key, std::string(value ? "yes" : "no")); }

    std::string str() const {
        std::string out;
        for (const auto& [k, v] : lines_) {
            out += k;
            out += ": ";
            out += v;
            out += '\n';
        }
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

// FNV-1a 64-bit digest used for input fingerprints in reports.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& data) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

}  // namespace paflow
