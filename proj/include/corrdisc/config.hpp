#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "corrdisc/types.hpp"

namespace corrdisc {

/// Full parameterization of one simulation run.
struct SimConfig {
    double field_width = 500.0;  // meters
    double field_height = 500.0;
    std::size_t node_count = 20;
    std::size_t service_count = 10;
    double radio_range = 150.0;
    std::uint64_t seed = 1;
    double eta = 0.8;
    double support = 0.8;
    std::size_t cache_capacity = 5;
    std::size_t log_capacity = 64;
    std::size_t min_log_records = 3;
    SimTime session_window = seconds(30);
    SimTime mining_interval = seconds(10);
    std::size_t initial_ttl = 8;
    std::size_t max_related = 8;
    SimTime sim_duration = seconds(1300);
    std::size_t sessions_per_consumer = 20;
    double consumer_fraction = 1.0;
    SimTime inter_request_gap = seconds(1);
    SimTime inter_session_gap = seconds(60);
    SimTime hop_latency = seconds(0.002);
    SimTime request_timeout = seconds(5);
    bool mining_enabled = true;
    bool log_overheard = true;

    /// Throws std::invalid_argument naming the first bad field.
    void validate() const {
        auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
        if (!(field_width > 0) || !(field_height > 0)) fail("field_size must be positive");
        if (node_count == 0 || node_count > 0xffff) fail("node_count must be in [1, 65535]");
        if (service_count == 0 || service_count > 0xffff) fail("service_count must be in [1, 65535]");
        if (!(radio_range > 0)) fail("radio_range must be positive");
        if (!(eta > 0 && eta <= 1)) fail("eta must lie in (0, 1]");
        if (!(support > 0 && support <= 1)) fail("support must lie in (0, 1]");
        if (cache_capacity == 0) fail("cache_capacity must be positive");
        if (log_capacity == 0) fail("log_capacity must be positive");
        if (session_window <= SimTime::zero()) fail("session_window must be positive");
        if (mining_interval <= SimTime::zero()) fail("mining_interval must be positive");
        if (initial_ttl > 255) fail("initial_ttl must fit in one byte");
        if (max_related > 32) fail("max_related must be at most 32");
        if (sim_duration < SimTime::zero()) fail("sim_duration must be non-negative");
        if (sessions_per_consumer == 0) fail("sessions_per_consumer must be positive");
        if (!(consumer_fraction >= 0 && consumer_fraction <= 1)) fail("consumer_fraction must lie in [0, 1]");
        if (inter_request_gap <= SimTime::zero()) fail("inter_request_gap must be positive");
        if (inter_session_gap <= SimTime::zero()) fail("inter_session_gap must be positive");
        if (hop_latency <= SimTime::zero()) fail("hop_latency must be positive");
        if (request_timeout <= SimTime::zero()) fail("request_timeout must be positive");
    }
};

} // namespace corrdisc
