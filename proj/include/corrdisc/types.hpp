#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace corrdisc {

/// Integer identifier tagged with a phantom type so node and service ids
/// cannot be mixed up.
template <typename Tag, typename Rep = std::uint16_t>
struct StrongId {
    using rep_type = Rep;
    Rep value{};

    constexpr StrongId() = default;
    constexpr explicit StrongId(Rep v) : value(v) {}

    friend constexpr auto operator<=>(StrongId, StrongId) = default;
    friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << +id.value; }
};

struct ServiceTag {};
struct NodeTag {};

/// Index of a service in the sorted list of all services in the network.
using ServiceId = StrongId<ServiceTag>;
using NodeId = StrongId<NodeTag>;

/// Simulation clock, integral microseconds.
using SimTime = std::chrono::microseconds;

inline constexpr SimTime seconds(double s) {
    return SimTime{static_cast<SimTime::rep>(s * 1e6 + (s >= 0 ? 0.5 : -0.5))};
}

inline double to_seconds(SimTime t) { return static_cast<double>(t.count()) / 1e6; }

} // namespace corrdisc

template <typename Tag, typename Rep>
struct std::hash<corrdisc::StrongId<Tag, Rep>> {
    std::size_t operator()(corrdisc::StrongId<Tag, Rep> id) const noexcept {
        return std::hash<Rep>{}(id.value);
    }
};
