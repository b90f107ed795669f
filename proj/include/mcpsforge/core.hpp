#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mcpsforge {

inline constexpr const char* kVersion = "0.1.0";

// ── errors ──────────────────────────────────────────────────────────

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IngestError : Error { using Error::Error; };     // CSV / schema parsing
struct SplitError : Error { using Error::Error; };      // holdout / fold planning
struct ContractError : Error { using Error::Error; };   // component pre/post violations
struct ExecError : Error { using Error::Error; };       // net execution
struct AnalysisError : Error { using Error::Error; };   // similarity / clustering
struct ArchiveError : Error { using Error::Error; };    // run persistence
struct UsageError : Error { using Error::Error; };      // CLI misuse

// Control-flow signals raised inside an evaluation; callers convert them
// into a record status instead of propagating.
struct TimeoutSignal {};
struct ResourceSignal { std::size_t bytes; };

// ── parameter values ────────────────────────────────────────────────

using Value = std::variant<long long, double, std::string>;
using ParamMap = std::map<std::string, Value>;

inline double as_double(const Value& v) {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<long long>(v)) return static_cast<double>(std::get<long long>(v));
    throw Error("value is not numeric: " + std::get<std::string>(v));
}

inline long long as_int(const Value& v) {
    if (std::holds_alternative<long long>(v)) return std::get<long long>(v);
    if (std::holds_alternative<double>(v)) return static_cast<long long>(std::llround(std::get<double>(v)));
    throw Error("value is not numeric: " + std::get<std::string>(v));
}

inline const std::string& as_str(const Value& v) {
    if (!std::holds_alternative<std::string>(v)) throw Error("value is not categorical");
    return std::get<std::string>(v);
}

inline std::string value_to_text(const Value& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
    return buf;
}

template <class T>
T param_or(const ParamMap& m, const std::string& key, T fallback) {
    auto it = m.find(key);
    if (it == m.end()) return fallback;
    if constexpr (std::is_same_v<T, double>) return as_double(it->second);
    else if constexpr (std::is_same_v<T, long long>) return as_int(it->second);
    else if constexpr (std::is_same_v<T, bool>) return as_str(it->second) == "true";
    else return std::get<std::string>(it->second);
}

// ── seeded randomness ───────────────────────────────────────────────
//
// Every stochastic operation takes an explicit 64-bit seed; substreams
// are derived by mixing, never by sharing engine state.

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_text(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    return mix_seed(seed, hash_text(tag));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }
inline Rng make_rng(std::uint64_t seed, std::string_view stream) { return Rng(mix_seed(seed, stream)); }

// ── small statistics helpers ────────────────────────────────────────

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean_of(xs), s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double sample_variance(const std::vector<double>& xs) {
    double s = sample_std(xs);
    return s * s;
}

// Type-7 quantile (linear interpolation between order statistics).
// `sorted` must be ascending and non-empty.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw Error("quantile of empty vector");
    if (sorted.size() == 1) return sorted[0];
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile_of(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, p);
}

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double std_normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

}  // namespace mcpsforge
