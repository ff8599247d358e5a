#pragma once

// Deterministic discrete-event simulation of the discovery protocol over a
// static unit-disk graph. Events are ordered by (time, insertion sequence);
// every random draw comes from a named substream of the run seed so the
// workload is identical whether mining is on or off.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "corrdisc/config.hpp"
#include "corrdisc/metrics.hpp"
#include "corrdisc/node.hpp"
#include "corrdisc/packet.hpp"
#include "corrdisc/random.hpp"
#include "corrdisc/types.hpp"
#include "corrdisc/workload.hpp"

namespace corrdisc {

struct Position {
    double x = 0;
    double y = 0;
};

struct Topology {
    std::vector<Position> positions;
    std::vector<std::vector<NodeId>> adjacency;  // ascending ids

    std::size_t size() const { return positions.size(); }
    std::span<const NodeId> neighbors(NodeId n) const { return adjacency.at(n.value); }
    bool adjacent(NodeId a, NodeId b) const {
        const auto& adj = adjacency.at(a.value);
        return std::binary_search(adj.begin(), adj.end(), b);
    }
};

/// Unit-disk graph: an edge joins two distinct nodes within `range` meters.
inline Topology make_topology(std::vector<Position> positions, double range) {
    Topology t;
    t.positions = std::move(positions);
    t.adjacency.resize(t.positions.size());
    for (std::size_t i = 0; i < t.positions.size(); ++i) {
        for (std::size_t j = i + 1; j < t.positions.size(); ++j) {
            const double dx = t.positions[i].x - t.positions[j].x;
            const double dy = t.positions[i].y - t.positions[j].y;
            if (std::hypot(dx, dy) <= range) {
                t.adjacency[i].push_back(NodeId{static_cast<std::uint16_t>(j)});
                t.adjacency[j].push_back(NodeId{static_cast<std::uint16_t>(i)});
            }
        }
    }
    for (auto& adj : t.adjacency) std::sort(adj.begin(), adj.end());
    return t;
}

inline Topology place_nodes(const SimConfig& config, Rng& rng) {
    std::vector<Position> positions(config.node_count);
    for (auto& p : positions) {
        p.x = rng.uniform() * config.field_width;
        p.y = rng.uniform() * config.field_height;
    }
    return make_topology(std::move(positions), config.radio_range);
}

/// Provider node of each service, indexed by ServiceId.
inline std::vector<NodeId> assign_services(const SimConfig& config, Rng& rng) {
    std::vector<NodeId> providers(config.service_count);
    for (auto& p : providers) p = NodeId{static_cast<std::uint16_t>(rng.below(config.node_count))};
    return providers;
}

/// Number of connected components, for topology statistics.
inline std::size_t component_count(const Topology& t) {
    std::vector<bool> visited(t.size(), false);
    std::size_t components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < t.size(); ++start) {
        if (visited[start]) continue;
        ++components;
        visited[start] = true;
        stack.push_back(start);
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto v : t.adjacency[u]) {
                if (!visited[v.value]) {
                    visited[v.value] = true;
                    stack.push_back(v.value);
                }
            }
        }
    }
    return components;
}

/// Everything a run needs besides the protocol itself.
struct Scenario {
    Topology topology;
    std::vector<NodeId> providers;
    CorrelationMatrix correlation{1};
    std::vector<SessionSpec> schedule;
};

/// Draws topology, service placement, correlation matrix and workload from
/// separate substreams of config.seed.
inline Scenario make_scenario(const SimConfig& config) {
    Scenario s;
    auto placement = Rng::substream(config.seed, "placement");
    auto services = Rng::substream(config.seed, "services");
    auto workload = Rng::substream(config.seed, "workload");
    s.topology = place_nodes(config, placement);
    s.providers = assign_services(config, services);
    s.correlation = build_correlation_matrix(config.service_count, workload);
    const auto consumers = pick_consumers(config, workload);
    s.schedule = build_schedule(config, consumers, s.correlation, workload);
    return s;
}

inline NodeConfig node_config_for(const SimConfig& c) {
    NodeConfig n;
    n.cache_capacity = c.cache_capacity;
    n.log_capacity = c.log_capacity;
    n.initial_ttl = static_cast<std::uint8_t>(c.initial_ttl);
    n.max_related = c.max_related;
    n.min_log_records = c.min_log_records;
    n.mining_enabled = c.mining_enabled;
    n.log_overheard = c.log_overheard;
    n.support = c.support;
    return n;
}

class Simulator {
public:
    struct Deliver {
        NodeId to;
        NodeId from;
        std::vector<std::uint8_t> bytes;
    };
    struct IssueRequest {
        NodeId consumer;
        ServiceId service;
        std::uint32_t session_seq;
    };
    struct MiningTick {
        NodeId node;
    };
    struct SessionCloseScan {};
    struct RequestTimeout {
        NodeId node;
        MessageId id;
    };
    using EventKind = std::variant<Deliver, IssueRequest, MiningTick, SessionCloseScan, RequestTimeout>;

    struct Event {
        SimTime time;
        std::uint64_t seq;
        EventKind kind;
    };

    static constexpr SimTime kCloseScanInterval = std::chrono::seconds(1);

    Simulator(const SimConfig& config, Scenario scenario, std::ostream* trace = nullptr)
        : config_(config), scenario_(std::move(scenario)), trace_(trace) {
        config_.validate();
        if (scenario_.topology.size() != config_.node_count) {
            throw std::invalid_argument("topology size does not match node_count");
        }
        const auto node_cfg = node_config_for(config_);
        nodes_.reserve(config_.node_count);
        for (std::size_t i = 0; i < config_.node_count; ++i) {
            nodes_.emplace_back(NodeId{static_cast<std::uint16_t>(i)}, node_cfg);
        }
        for (std::size_t s = 0; s < scenario_.providers.size(); ++s) {
            nodes_.at(scenario_.providers[s].value).host(ServiceId{static_cast<std::uint16_t>(s)});
        }
    }

    explicit Simulator(const SimConfig& config, std::ostream* trace = nullptr)
        : Simulator(config, make_scenario(config), trace) {}

    const Scenario& scenario() const { return scenario_; }
    const Topology& topology() const { return scenario_.topology; }
    std::span<const Node> nodes() const { return nodes_; }
    Node& node(NodeId id) { return nodes_.at(id.value); }
    SimTime now() const { return now_; }
    std::size_t pending_events() const { return queue_.size(); }

    /// Runs the event loop until sim_duration and returns the summed counters.
    Metrics run() {
        if (!started_) start();
        while (!queue_.empty() && queue_.top().time < config_.sim_duration) {
            Event ev = queue_.top();
            queue_.pop();
            if (ev.time < now_) throw std::logic_error("event scheduled in the past");
            now_ = ev.time;
            std::visit([&](auto& kind) { handle(kind); }, ev.kind);
        }
        return metrics();
    }

    Metrics metrics() const {
        Metrics total = link_metrics_;
        for (const auto& n : nodes_) total += n.metrics();
        return total;
    }

    /// One deliver event per neighbour at now + hop_latency.
    void deliver_broadcast(NodeId from, const Packet& packet) {
        const auto bytes = encode_packet(packet);
        count_transmission(packet);
        trace_send(from, std::nullopt, packet);
        for (auto neighbor : scenario_.topology.neighbors(from)) {
            schedule(now_ + config_.hop_latency, Deliver{neighbor, from, bytes});
        }
    }

    void deliver_unicast(NodeId from, NodeId to, const Packet& packet) {
        if (!scenario_.topology.adjacent(from, to)) {
            ++link_metrics_.packets_dropped;
            return;
        }
        count_transmission(packet);
        trace_send(from, to, packet);
        schedule(now_ + config_.hop_latency, Deliver{to, from, encode_packet(packet)});
    }

    void schedule(SimTime at, EventKind kind) {
        if (at < now_) throw std::logic_error("cannot schedule into the past");
        queue_.push(Event{at, next_seq_++, std::move(kind)});
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void start() {
        started_ = true;
        for (const auto& session : scenario_.schedule) {
            for (std::size_t i = 0; i < session.services.size(); ++i) {
                schedule(session.request_time(i),
                         IssueRequest{session.consumer, session.services[i], session.session_seq});
            }
        }
        schedule(kCloseScanInterval, SessionCloseScan{});
        for (const auto& n : nodes_) schedule(config_.mining_interval, MiningTick{n.id()});
    }

    void emit(NodeId from, std::vector<Outgoing> out) {
        for (auto& o : out) {
            if (o.to) {
                deliver_unicast(from, *o.to, o.packet);
            } else {
                deliver_broadcast(from, o.packet);
            }
        }
    }

    void handle(const Deliver& d) {
        if (trace_) trace_line("deliver", d.to) << "from=" << d.from << " bytes=" << d.bytes.size() << '\n';
        emit(d.to, nodes_.at(d.to.value).receive(d.bytes, d.from, now_));
    }

    void handle(const IssueRequest& r) {
        auto& n = nodes_.at(r.consumer.value);
        auto out = n.issue_request(r.service, r.session_seq, now_);
        if (trace_) {
            trace_line("issue_request", r.consumer)
                << "service=" << r.service << " session=" << r.session_seq << " local=" << (out.empty() ? 1 : 0)
                << '\n';
        }
        for (const auto& o : out) {
            if (const auto* sreq = std::get_if<Sreq>(&o.packet)) {
                schedule(now_ + config_.request_timeout, RequestTimeout{r.consumer, sreq->id});
            }
        }
        emit(r.consumer, std::move(out));
    }

    void handle(const MiningTick& m) {
        auto& n = nodes_.at(m.node.value);
        n.mine();
        if (trace_) trace_line("mining_tick", m.node) << "itemsets=" << n.itemsets().size() << '\n';
        schedule(now_ + config_.mining_interval, MiningTick{m.node});
    }

    void handle(const SessionCloseScan&) {
        for (auto& n : nodes_) n.close_stale_sessions(now_, config_.session_window);
        if (trace_) trace_line("session_close_scan", std::nullopt) << "-\n";
        schedule(now_ + kCloseScanInterval, SessionCloseScan{});
    }

    void handle(const RequestTimeout& t) {
        auto& n = nodes_.at(t.node.value);
        const auto before = n.metrics().requests_failed;
        n.expire_request(t.id);
        if (trace_) {
            trace_line("request_timeout", t.node) << t.id.origin << ':' << t.id.seq
                                                  << " failed=" << (n.metrics().requests_failed - before) << '\n';
        }
    }

    void count_transmission(const Packet& p) {
        if (std::holds_alternative<Sreq>(p)) {
            ++link_metrics_.sreq_transmissions;
        } else {
            ++link_metrics_.srep_transmissions;
        }
    }

    std::ostream& trace_line(const char* kind, std::optional<NodeId> node) {
        char time[32];
        std::snprintf(time, sizeof time, "%.6f", to_seconds(now_));
        *trace_ << time << ' ' << kind << ' ';
        if (node) {
            *trace_ << *node;
        } else {
            *trace_ << '-';
        }
        return *trace_ << ' ';
    }

    void trace_send(NodeId from, std::optional<NodeId> to, const Packet& p) {
        if (!trace_) return;
        if (const auto* sreq = std::get_if<Sreq>(&p)) {
            trace_line("send_sreq", from) << sreq->id.origin << ':' << sreq->id.seq << " service=" << sreq->requested
                                          << " ttl=" << +sreq->ttl << '\n';
            return;
        }
        const auto& srep = std::get<Srep>(p);
        trace_line("send_srep", from) << srep.in_reply_to.origin << ':' << srep.in_reply_to.seq << " to=" << *to
                                      << " answer=" << srep.answer.service << " related=" << srep.related.size()
                                      << '\n';
    }

    SimConfig config_;
    Scenario scenario_;
    std::ostream* trace_;
    std::vector<Node> nodes_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    SimTime now_{};
    bool started_ = false;
    Metrics link_metrics_;
};

/// Runs one simulation from scratch.
inline Metrics run(const SimConfig& config, std::ostream* trace = nullptr) {
    Simulator sim(config, trace);
    return sim.run();
}

} // namespace corrdisc
