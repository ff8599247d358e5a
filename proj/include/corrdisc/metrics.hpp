#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace corrdisc {

struct Metrics {
    std::uint64_t requests_issued = 0;
    std::uint64_t locally_satisfied = 0;
    std::uint64_t prediction_hits = 0;
    std::uint64_t piggybacked_records_sent = 0;
    std::uint64_t piggybacked_records_evicted_unused = 0;
    std::uint64_t sreq_transmissions = 0;
    std::uint64_t srep_transmissions = 0;
    std::uint64_t requests_failed = 0;
    std::uint64_t packets_dropped = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;

    Metrics& operator+=(const Metrics& o) {
        for_each_field([&](std::string_view, std::uint64_t Metrics::*f) { this->*f += o.*f; });
        return *this;
    }

    double satisfaction_ratio() const {
        return requests_issued == 0
                   ? 0.0
                   : static_cast<double>(locally_satisfied) / static_cast<double>(requests_issued);
    }

    /// Visits (name, member pointer) for every counter in CSV column order.
    template <typename F>
    static void for_each_field(F&& f) {
        f("requests_issued", &Metrics::requests_issued);
        f("locally_satisfied", &Metrics::locally_satisfied);
        f("prediction_hits", &Metrics::prediction_hits);
        f("piggybacked_records_sent", &Metrics::piggybacked_records_sent);
        f("piggybacked_records_evicted_unused", &Metrics::piggybacked_records_evicted_unused);
        f("sreq_transmissions", &Metrics::sreq_transmissions);
        f("srep_transmissions", &Metrics::srep_transmissions);
        f("requests_failed", &Metrics::requests_failed);
        f("packets_dropped", &Metrics::packets_dropped);
    }
};

} // namespace corrdisc
