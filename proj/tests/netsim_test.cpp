#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "corrdisc/netsim.hpp"

namespace {

using namespace corrdisc;

NodeId node(int n) { return NodeId{static_cast<std::uint16_t>(n)}; }

SimConfig small_config(std::uint64_t seed) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.sessions_per_consumer = 5;
    cfg.sim_duration = seconds(400);
    return cfg;
}

TEST(Topology, SingleNodeHasNoEdges) {
    SimConfig cfg;
    cfg.node_count = 1;
    Rng rng(1);
    const auto t = place_nodes(cfg, rng);
    EXPECT_TRUE(t.adjacency[0].empty());
}

TEST(Topology, UnitDiskEdgeIsSymmetric) {
    const auto t = make_topology({{0, 0}, {150, 0}, {400, 400}}, 150);
    EXPECT_TRUE(t.adjacent(node(0), node(1)));
    EXPECT_TRUE(t.adjacent(node(1), node(0)));
    EXPECT_FALSE(t.adjacent(node(0), node(2)));
    EXPECT_FALSE(t.adjacent(node(0), node(0)));
}

TEST(Topology, EdgesMatchDistanceRule) {
    SimConfig cfg;
    cfg.node_count = 30;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto t = place_nodes(cfg, rng);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto& p = t.positions[i];
            EXPECT_TRUE(p.x >= 0 && p.x < cfg.field_width && p.y >= 0 && p.y < cfg.field_height);
            for (std::size_t j = 0; j < t.size(); ++j) {
                const auto& q = t.positions[j];
                const bool close = i != j && std::hypot(p.x - q.x, p.y - q.y) <= cfg.radio_range;
                EXPECT_EQ(t.adjacent(node(static_cast<int>(i)), node(static_cast<int>(j))), close);
            }
        }
    }
}

TEST(Topology, SeededPlacementIsDeterministic) {
    SimConfig cfg;
    Rng a(42), b(42);
    const auto ta = place_nodes(cfg, a);
    const auto tb = place_nodes(cfg, b);
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        EXPECT_EQ(ta.positions[i].x, tb.positions[i].x);
        EXPECT_EQ(ta.positions[i].y, tb.positions[i].y);
    }
}

// 150 m over 500x500: 20 nodes are mostly connected, 50 nodes almost always.
TEST(Topology, ConnectivityStatistics) {
    for (std::size_t nodes : {20u, 50u}) {
        SimConfig cfg;
        cfg.node_count = nodes;
        double reachable_pairs = 0;
        const int trials = 200;
        for (int seed = 0; seed < trials; ++seed) {
            Rng rng(static_cast<std::uint64_t>(seed));
            const auto t = place_nodes(cfg, rng);
            // fraction of ordered pairs in the same component
            std::vector<int> comp(t.size(), -1);
            int c = 0;
            for (std::size_t s = 0; s < t.size(); ++s) {
                if (comp[s] >= 0) continue;
                std::vector<std::size_t> stack{s};
                comp[s] = c;
                while (!stack.empty()) {
                    auto u = stack.back();
                    stack.pop_back();
                    for (auto v : t.adjacency[u])
                        if (comp[v.value] < 0) comp[v.value] = c, stack.push_back(v.value);
                }
                ++c;
            }
            EXPECT_EQ(static_cast<std::size_t>(c), component_count(t));
            std::map<int, double> sizes;
            for (int x : comp) sizes[x] += 1;
            double pairs = 0;
            for (auto [k, sz] : sizes) pairs += sz * sz;
            reachable_pairs += pairs / (static_cast<double>(nodes) * static_cast<double>(nodes));
        }
        const double mean = reachable_pairs / trials;
        if (nodes == 20) {
            EXPECT_GT(mean, 0.6);
        } else {
            EXPECT_GT(mean, 0.95);
        }
    }
}

TEST(AssignServices, OneProviderPerService) {
    SimConfig cfg;
    cfg.node_count = 20;
    cfg.service_count = 10;
    Rng a(3), b(3);
    const auto providers = assign_services(cfg, a);
    ASSERT_EQ(providers.size(), 10u);
    for (auto p : providers) EXPECT_LT(p.value, 20);
    EXPECT_EQ(providers, assign_services(cfg, b));
    cfg.service_count = 1;
    EXPECT_EQ(assign_services(cfg, a).size(), 1u);
}

TEST(Simulator, ProvidersHostTheirServices) {
    Simulator sim(small_config(4));
    const auto& providers = sim.scenario().providers;
    for (std::size_t s = 0; s < providers.size(); ++s) {
        EXPECT_TRUE(sim.nodes()[providers[s].value].hosts(ServiceId{static_cast<std::uint16_t>(s)}));
        EXPECT_EQ(sim.nodes()[providers[s].value].table().size(), 0u);
    }
}

Scenario star() {
    Scenario s;
    s.topology = make_topology({{0, 0}, {100, 0}, {0, 100}, {-100, 0}, {400, 400}}, 120);
    return s;
}

SimConfig star_config() {
    SimConfig cfg;
    cfg.node_count = 5;
    return cfg;
}

TEST(Simulator, BroadcastReachesEachNeighbour) {
    Simulator sim(star_config(), star());
    sim.deliver_broadcast(node(0), Sreq{});
    EXPECT_EQ(sim.pending_events(), 3u);
    EXPECT_EQ(sim.metrics().sreq_transmissions, 1u);

    Simulator isolated(star_config(), star());
    isolated.deliver_broadcast(node(4), Sreq{});
    EXPECT_EQ(isolated.pending_events(), 0u);
}

TEST(Simulator, UnicastNeedsANeighbour) {
    Simulator sim(star_config(), star());
    Srep reply;
    sim.deliver_unicast(node(0), node(1), reply);
    EXPECT_EQ(sim.pending_events(), 1u);
    EXPECT_EQ(sim.metrics().srep_transmissions, 1u);
    sim.deliver_unicast(node(0), node(4), reply);
    EXPECT_EQ(sim.pending_events(), 1u);
    EXPECT_EQ(sim.metrics().packets_dropped, 1u);
}

TEST(Run, ZeroDurationCountsNothing) {
    auto cfg = small_config(1);
    cfg.sim_duration = SimTime::zero();
    EXPECT_EQ(run(cfg), Metrics{});
}

TEST(Run, BaselineNeverPiggybacks) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cfg = small_config(seed);
        cfg.mining_enabled = false;
        cfg.support = 0.2;
        const auto m = run(cfg);
        EXPECT_EQ(m.piggybacked_records_sent, 0u);
        EXPECT_EQ(m.prediction_hits, 0u);
        EXPECT_GT(m.requests_issued, 0u);
    }
}

TEST(Run, LowSupportPiggybacks) {
    auto cfg = small_config(2);
    cfg.support = 0.2;
    EXPECT_GT(run(cfg).piggybacked_records_sent, 0u);
}

TEST(Run, DeterministicMetricsAndTrace) {
    auto cfg = small_config(9);
    cfg.support = 0.3;
    std::ostringstream t1, t2;
    const auto m1 = run(cfg, &t1);
    const auto m2 = run(cfg, &t2);
    EXPECT_EQ(m1, m2);
    EXPECT_EQ(t1.str(), t2.str());
    EXPECT_FALSE(t1.str().empty());
}

TEST(Run, MiningDoesNotPerturbWorkload) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cfg = small_config(seed);
        cfg.support = 0.3;
        const auto on = run(cfg);
        cfg.mining_enabled = false;
        const auto off = run(cfg);
        EXPECT_EQ(on.requests_issued, off.requests_issued);
    }
}

struct TraceFacts {
    bool clock_monotone = true;
    std::map<std::string, std::size_t> sreq_sends_per_msg;
    std::map<std::pair<std::string, std::string>, std::size_t> sends_per_node_msg;
    std::size_t related_in_sreps = 0;
};

TraceFacts scan(const std::string& trace) {
    TraceFacts f;
    std::istringstream in(trace);
    std::string line;
    double last = -1;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double time;
        std::string kind, who, msg;
        ls >> time >> kind >> who >> msg;
        if (time < last) f.clock_monotone = false;
        last = time;
        if (kind == "send_sreq") {
            ++f.sreq_sends_per_msg[msg];
            ++f.sends_per_node_msg[{who, msg}];
        } else if (kind == "send_srep") {
            const auto pos = line.find("related=");
            f.related_in_sreps += std::stoul(line.substr(pos + 8));
        }
    }
    return f;
}

TEST(Run, InvariantsHoldAcrossSeeds) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        for (bool mining : {true, false}) {
            auto cfg = small_config(seed);
            cfg.support = 0.3;
            cfg.mining_enabled = mining;
            std::ostringstream trace;
            const auto m = run(cfg, &trace);
            EXPECT_LE(m.locally_satisfied, m.requests_issued);
            EXPECT_LE(m.prediction_hits, m.locally_satisfied);
            EXPECT_GE(m.sreq_transmissions, m.requests_issued - m.locally_satisfied);

            const auto facts = scan(trace.str());
            EXPECT_TRUE(facts.clock_monotone);
            for (const auto& [msg, sends] : facts.sreq_sends_per_msg) EXPECT_LE(sends, cfg.node_count) << msg;
            for (const auto& [key, sends] : facts.sends_per_node_msg) EXPECT_EQ(sends, 1u);
            if (!mining) {
                EXPECT_EQ(facts.related_in_sreps, 0u);
            }
        }
    }
}

} // namespace
