#pragma once

// CSV and manifest output shared by the sgd2d subcommands.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <sgd2d/sgcore.hpp>

namespace sgd2d::cli {

inline constexpr const char* tool_version = "1.0.0";
inline constexpr const char* seed_env_var = "SGD2D_SEED";

/// Thrown for bad flag values; the CLI exits with status 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;
    bool log_scale = false;

    std::vector<double> points() const
    {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            if (log_scale) {
                out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
            } else {
                out.push_back(lo + t * (hi - lo));
            }
        }
        if (n > 1) {
            out.back() = hi;
        }
        return out;
    }
};

/// Parses "lo:hi:n" (n inclusive points).
inline Grid parse_grid(const std::string& text, bool log_scale = false)
{
    Grid g;
    g.log_scale = log_scale;
    std::istringstream is(text);
    char c1 = 0;
    char c2 = 0;
    if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || !is.eof()) {
        throw UsageError("grid must look like lo:hi:n, got '" + text + "'");
    }
    if (g.n < 1 || g.hi < g.lo || (g.n > 1 && g.hi == g.lo)) {
        throw UsageError("grid needs n >= 1 and lo < hi (lo == hi only with n = 1)");
    }
    if (log_scale && !(g.lo > 0.0)) {
        throw UsageError("log grid needs lo > 0");
    }
    return g;
}

/// Header plus rows of numbers, written with 12 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row)
    {
        if (row.size() != header_.size()) {
            throw std::logic_error("csv row width does not match header");
        }
        rows_.push_back(row);
    }

    std::size_t size() const { return rows_.size(); }

    std::string str() const
    {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            out += (i ? "," : "") + header_[i];
        }
        out += '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                out += (i ? "," : "") + format_number(r[i]);
            }
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

/// Record written next to every CSV: how it was produced.
struct RunManifest {
    std::string command_line;
    std::string parameter_digest;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::string> notes;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const
    {
        return {{"command_line", command_line},   {"parameter_digest", parameter_digest},
                {"seed", seed},                   {"tool_version", tool_version},
                {"wall_time_s", wall_time_s},     {"parameters", parameters},
                {"notes", notes},                 {"outputs", outputs}};
    }
};

inline nlohmann::json params_json(const SystemParams& p)
{
    return {{"mode", to_string(p.mode)}, {"mu", p.mu},       {"k", p.k_mean},       {"beta", p.beta},
            {"a", p.a},                  {"eta_c", p.eta_c}, {"eta_d", p.eta_d},    {"a_ex", p.a_ex}};
}

inline std::uint64_t default_seed()
{
    if (const char* s = std::getenv(seed_env_var)) {
        char* end = nullptr;
        const auto v = std::strtoull(s, &end, 10);
        if (end != s && *end == '\0') {
            return v;
        }
        throw UsageError(std::string(seed_env_var) + " must be an unsigned integer");
    }
    return 1;
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace sgd2d::cli
