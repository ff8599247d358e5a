#pragma once

// Paired mining-on / mining-off seed sweeps: config parsing, parallel
// execution, CSV output and summary statistics.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "corrdisc/config.hpp"
#include "corrdisc/metrics.hpp"
#include "corrdisc/netsim.hpp"

namespace corrdisc {

enum class Variant { mining_on, mining_off };

inline std::string_view to_string(Variant v) { return v == Variant::mining_on ? "mining_on" : "mining_off"; }

inline std::optional<Variant> parse_variant(std::string_view s) {
    if (s == "mining_on") return Variant::mining_on;
    if (s == "mining_off") return Variant::mining_off;
    return std::nullopt;
}

struct ExperimentSpec {
    SimConfig base;
    std::vector<std::uint64_t> seeds;
    std::vector<Variant> variants;  // ascending, unique
    std::string output_path;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view s) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("cannot parse '" + std::string(s) + "' as a number");
    }
    return value;
}

inline bool parse_bool(std::string_view s) {
    if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "off" || s == "no") return false;
    throw std::invalid_argument("cannot parse '" + std::string(s) + "' as a boolean");
}

inline SimTime parse_seconds(std::string_view s) {
    const double v = parse_number<double>(s);
    if (!std::isfinite(v)) throw std::invalid_argument("duration must be finite");
    return seconds(v);
}

using Setter = std::function<void(ExperimentSpec&, std::string_view)>;

inline const std::map<std::string, Setter, std::less<>>& config_setters() {
    static const std::map<std::string, Setter, std::less<>> setters = [] {
        std::map<std::string, Setter, std::less<>> m;
        auto size = [](std::size_t SimConfig::*f) {
            return [f](ExperimentSpec& e, std::string_view v) { e.base.*f = parse_number<std::size_t>(v); };
        };
        auto real = [](double SimConfig::*f) {
            return [f](ExperimentSpec& e, std::string_view v) { e.base.*f = parse_number<double>(v); };
        };
        auto duration = [](SimTime SimConfig::*f) {
            return [f](ExperimentSpec& e, std::string_view v) { e.base.*f = parse_seconds(v); };
        };
        auto flag = [](bool SimConfig::*f) {
            return [f](ExperimentSpec& e, std::string_view v) { e.base.*f = parse_bool(v); };
        };
        m["field_size"] = [](ExperimentSpec& e, std::string_view v) {
            const auto x = v.find('x');
            if (x == std::string_view::npos) throw std::invalid_argument("field_size must look like 500x500");
            e.base.field_width = parse_number<double>(trim(v.substr(0, x)));
            e.base.field_height = parse_number<double>(trim(v.substr(x + 1)));
        };
        m["node_count"] = size(&SimConfig::node_count);
        m["service_count"] = size(&SimConfig::service_count);
        m["radio_range"] = real(&SimConfig::radio_range);
        m["seed"] = [](ExperimentSpec& e, std::string_view v) { e.base.seed = parse_number<std::uint64_t>(v); };
        m["eta"] = real(&SimConfig::eta);
        m["support"] = real(&SimConfig::support);
        m["cache_capacity"] = size(&SimConfig::cache_capacity);
        m["log_capacity"] = size(&SimConfig::log_capacity);
        m["min_log_records"] = size(&SimConfig::min_log_records);
        m["session_window"] = duration(&SimConfig::session_window);
        m["mining_interval"] = duration(&SimConfig::mining_interval);
        m["initial_ttl"] = size(&SimConfig::initial_ttl);
        m["max_related"] = size(&SimConfig::max_related);
        m["sim_duration"] = duration(&SimConfig::sim_duration);
        m["sessions_per_consumer"] = size(&SimConfig::sessions_per_consumer);
        m["consumer_fraction"] = real(&SimConfig::consumer_fraction);
        m["inter_request_gap"] = duration(&SimConfig::inter_request_gap);
        m["inter_session_gap"] = duration(&SimConfig::inter_session_gap);
        m["hop_latency"] = duration(&SimConfig::hop_latency);
        m["request_timeout"] = duration(&SimConfig::request_timeout);
        m["mining_enabled"] = flag(&SimConfig::mining_enabled);
        m["log_overheard"] = flag(&SimConfig::log_overheard);
        m["seeds"] = [](ExperimentSpec& e, std::string_view v) {
            e.seeds.clear();
            for (auto part : split(v, ',')) {
                // "a-b" is an inclusive range
                if (auto dash = part.find('-'); dash != std::string_view::npos && dash > 0) {
                    const auto lo = parse_number<std::uint64_t>(trim(part.substr(0, dash)));
                    const auto hi = parse_number<std::uint64_t>(trim(part.substr(dash + 1)));
                    if (hi < lo) throw std::invalid_argument("empty seed range '" + std::string(part) + "'");
                    for (auto s = lo; s <= hi; ++s) e.seeds.push_back(s);
                } else {
                    e.seeds.push_back(parse_number<std::uint64_t>(part));
                }
            }
        };
        m["variants"] = [](ExperimentSpec& e, std::string_view v) {
            e.variants.clear();
            for (auto part : split(v, ',')) {
                auto variant = parse_variant(part);
                if (!variant) throw std::invalid_argument("unknown variant '" + std::string(part) + "'");
                e.variants.push_back(*variant);
            }
            std::sort(e.variants.begin(), e.variants.end());
            e.variants.erase(std::unique(e.variants.begin(), e.variants.end()), e.variants.end());
        };
        return m;
    }();
    return setters;
}

} // namespace detail

/// Parses `key = value` lines. `#` starts a comment. Durations are seconds.
/// node_count and service_count are required; everything else defaults.
/// Without a `seeds` line the single `seed` is used; without `variants`
/// both variants run.
inline ExperimentSpec parse_config(std::string_view text) {
    ExperimentSpec spec;
    spec.variants = {Variant::mining_on, Variant::mining_off};
    bool have_nodes = false, have_services = false, have_seeds = false;

    std::size_t line_no = 0;
    for (auto raw : detail::split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value', got '" + std::string(line) + "'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        const auto& setters = detail::config_setters();
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
        try {
            it->second(spec, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + std::string(key) + ": " + e.what());
        }
        have_nodes |= key == "node_count";
        have_services |= key == "service_count";
        have_seeds |= key == "seeds";
    }
    if (!have_nodes) throw ConfigError("missing required key node_count");
    if (!have_services) throw ConfigError("missing required key service_count");
    if (!have_seeds) spec.seeds = {spec.base.seed};
    if (spec.seeds.empty()) throw ConfigError("seeds must list at least one seed");
    if (spec.variants.empty()) throw ConfigError("variants must list at least one variant");
    try {
        spec.base.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

struct RunRow {
    std::uint64_t seed = 0;
    Variant variant = Variant::mining_on;
    Metrics metrics;

    double ratio() const { return metrics.satisfaction_ratio(); }
    friend bool operator==(const RunRow&, const RunRow&) = default;
};

inline SimConfig config_for(const SimConfig& base, std::uint64_t seed, Variant variant) {
    SimConfig c = base;
    c.seed = seed;
    c.mining_enabled = variant == Variant::mining_on;
    return c;
}

/// One row per (seed, variant) in that order, whatever the number of jobs.
/// When `trace_dir` is set each run writes `<dir>/seed<seed>_<variant>.trace`.
inline std::vector<RunRow> run_experiment(const ExperimentSpec& spec, unsigned jobs = 1,
                                          const std::optional<std::filesystem::path>& trace_dir = std::nullopt) {
    std::vector<RunRow> rows;
    for (auto seed : spec.seeds) {
        for (auto variant : spec.variants) rows.push_back(RunRow{seed, variant, {}});
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            try {
                const auto config = config_for(spec.base, rows[i].seed, rows[i].variant);
                if (trace_dir) {
                    const auto path = *trace_dir / ("seed" + std::to_string(rows[i].seed) + "_" +
                                                    std::string(to_string(rows[i].variant)) + ".trace");
                    std::ofstream trace(path);
                    if (!trace) throw std::runtime_error("cannot write trace file " + path.string());
                    rows[i].metrics = run(config, &trace);
                } else {
                    rows[i].metrics = run(config);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

inline std::string format_ratio(double r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << r;
    return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<RunRow>& rows) {
    os << "seed,variant";
    Metrics::for_each_field([&](std::string_view name, auto) { os << ',' << name; });
    os << ",satisfaction_ratio\n";
    for (const auto& row : rows) {
        os << row.seed << ',' << to_string(row.variant);
        Metrics::for_each_field([&](std::string_view, auto field) { os << ',' << row.metrics.*field; });
        os << ',' << format_ratio(row.ratio()) << '\n';
    }
}

inline void write_csv(const std::vector<RunRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(out, rows);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

/// Reads what write_csv produced. The ratio column is derived and ignored.
inline std::vector<RunRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
    std::vector<RunRow> rows;
    while (std::getline(is, line)) {
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line, ',');
        std::size_t col = 0;
        auto cell = [&]() -> std::string_view {
            if (col >= cells.size()) throw std::runtime_error("short CSV row: " + line);
            return cells[col++];
        };
        RunRow row;
        row.seed = detail::parse_number<std::uint64_t>(cell());
        const auto variant = parse_variant(cell());
        if (!variant) throw std::runtime_error("bad variant in CSV row: " + line);
        row.variant = *variant;
        Metrics::for_each_field([&](std::string_view, auto field) {
            row.metrics.*field = detail::parse_number<std::uint64_t>(cell());
        });
        rows.push_back(row);
    }
    return rows;
}

struct VariantSummary {
    Variant variant;
    std::size_t runs = 0;
    double mean = 0;
    double stddev = 0;  // sample standard deviation
};

struct Summary {
    std::vector<VariantSummary> variants;
    std::size_t paired_seeds = 0;  // seeds with both variants present
    std::size_t wins = 0;          // seeds where mining_on strictly beats mining_off
};

inline Summary summarize(const std::vector<RunRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("cannot summarize zero runs");
    Summary s;
    for (auto variant : {Variant::mining_on, Variant::mining_off}) {
        std::vector<double> ratios;
        for (const auto& r : rows) {
            if (r.variant == variant) ratios.push_back(r.ratio());
        }
        if (ratios.empty()) continue;
        VariantSummary v{variant, ratios.size(), 0, 0};
        for (double x : ratios) v.mean += x;
        v.mean /= static_cast<double>(ratios.size());
        if (ratios.size() > 1) {
            double ss = 0;
            for (double x : ratios) ss += (x - v.mean) * (x - v.mean);
            v.stddev = std::sqrt(ss / static_cast<double>(ratios.size() - 1));
        }
        s.variants.push_back(v);
    }
    std::map<std::uint64_t, std::pair<std::optional<double>, std::optional<double>>> by_seed;
    for (const auto& r : rows) {
        auto& slot = by_seed[r.seed];
        (r.variant == Variant::mining_on ? slot.first : slot.second) = r.ratio();
    }
    for (const auto& [seed, pair] : by_seed) {
        if (!pair.first || !pair.second) continue;
        ++s.paired_seeds;
        if (*pair.first > *pair.second) ++s.wins;
    }
    return s;
}

inline void write_summary(std::ostream& os, const Summary& s) {
    for (const auto& v : s.variants) {
        os << to_string(v.variant) << ": mean ratio " << format_ratio(v.mean) << " +/- " << format_ratio(v.stddev)
           << " over " << v.runs << " runs\n";
    }
    os << "mining_on wins: " << s.wins << " of " << s.paired_seeds << " paired seeds\n";
}

} // namespace corrdisc
