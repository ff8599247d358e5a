#pragma once

// Correlated request generator. A random binary correlation matrix CM says
// which services go together; each session picks a seed service s, takes the
// candidates C = { i | i == s or CM(i, s) == 1 } and keeps each candidate
// independently with probability eta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrdisc/config.hpp"
#include "corrdisc/random.hpp"
#include "corrdisc/types.hpp"

namespace corrdisc {

class CorrelationMatrix {
public:
    explicit CorrelationMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {
        if (n == 0) throw std::invalid_argument("correlation matrix needs n >= 1");
    }

    std::size_t size() const { return n_; }
    bool at(std::size_t row, std::size_t col) const { return bits_.at(row * n_ + col) != 0; }
    void set(std::size_t row, std::size_t col, bool bit) { bits_.at(row * n_ + col) = bit ? 1 : 0; }

    friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;

private:
    std::size_t n_;
    std::vector<std::uint8_t> bits_;
};

/// 1 when r >= 0.5, else 0.
inline constexpr bool correlation_bit(double r) { return r >= 0.5; }

/// Thresholds a row-major n x n matrix of uniform values.
inline CorrelationMatrix correlation_matrix_from(std::size_t n, const std::vector<double>& uniform) {
    if (uniform.size() != n * n) throw std::invalid_argument("uniform matrix must hold n*n values");
    CorrelationMatrix cm(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) cm.set(i, j, correlation_bit(uniform[i * n + j]));
    }
    return cm;
}

/// Draws R(i, j) in (0, 1] row by row and thresholds it.
inline CorrelationMatrix build_correlation_matrix(std::size_t n, Rng& rng) {
    std::vector<double> r(n * n);
    for (auto& v : r) v = rng.uniform_open_closed();
    return correlation_matrix_from(n, r);
}

/// Reads column `s`: { i | i == s or CM(i, s) == 1 }, ascending.
inline std::vector<ServiceId> candidate_set(ServiceId s, const CorrelationMatrix& cm) {
    if (s.value >= cm.size()) throw std::out_of_range("seed service outside the matrix");
    std::vector<ServiceId> c;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        if (i == s.value || cm.at(i, s.value)) c.push_back(ServiceId{static_cast<std::uint16_t>(i)});
    }
    return c;
}

inline constexpr int kSessionRedrawLimit = 100;

/// Keeps each candidate whose uniform draw p_i in [0, 1) is below eta. Draws
/// are made in ascending id order. An empty result is redrawn up to 100
/// times, after which the session is just {s}.
inline std::vector<ServiceId> generate_session(ServiceId s, const std::vector<ServiceId>& candidates,
                                               double eta, Rng& rng) {
    if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("eta must lie in (0, 1]");
    std::vector<ServiceId> session;
    for (int attempt = 0; attempt < kSessionRedrawLimit; ++attempt) {
        session.clear();
        for (auto c : candidates) {
            if (rng.uniform() < eta) session.push_back(c);
        }
        if (!session.empty()) return session;
    }
    return {s};
}

struct SessionSpec {
    NodeId consumer;
    std::uint32_t session_seq = 0;
    ServiceId seed;
    std::vector<ServiceId> services;  // issued in this (ascending) order
    SimTime start{};
    SimTime inter_request_gap{};

    SimTime request_time(std::size_t i) const {
        return start + inter_request_gap * static_cast<SimTime::rep>(i);
    }
    friend bool operator==(const SessionSpec&, const SessionSpec&) = default;
};

/// Consumers in ascending id order: every node when consumer_fraction is 1,
/// otherwise round(fraction * node_count) nodes drawn without replacement.
inline std::vector<NodeId> pick_consumers(const SimConfig& config, Rng& rng) {
    std::vector<NodeId> all;
    for (std::size_t i = 0; i < config.node_count; ++i) all.push_back(NodeId{static_cast<std::uint16_t>(i)});
    if (config.consumer_fraction >= 1.0) return all;
    const auto k = static_cast<std::size_t>(std::llround(config.consumer_fraction * static_cast<double>(all.size())));
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(all[i], all[i + rng.below(all.size() - i)]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

/// Each consumer gets a random phase in [0, inter_session_gap) at millisecond
/// resolution, then sessions_per_consumer sessions spaced inter_session_gap
/// apart.
inline std::vector<SessionSpec> build_schedule(const SimConfig& config, const std::vector<NodeId>& consumers,
                                               const CorrelationMatrix& cm, Rng& rng) {
    std::vector<SessionSpec> schedule;
    const auto gap_ms = std::chrono::duration_cast<std::chrono::milliseconds>(config.inter_session_gap).count();
    for (auto consumer : consumers) {
        const SimTime phase = std::chrono::milliseconds(rng.below(static_cast<std::uint64_t>(std::max<long long>(gap_ms, 1))));
        for (std::size_t k = 0; k < config.sessions_per_consumer; ++k) {
            SessionSpec spec;
            spec.consumer = consumer;
            spec.session_seq = static_cast<std::uint32_t>(k);
            spec.seed = ServiceId{static_cast<std::uint16_t>(rng.below(cm.size()))};
            spec.services = generate_session(spec.seed, candidate_set(spec.seed, cm), config.eta, rng);
            spec.start = phase + config.inter_session_gap * static_cast<SimTime::rep>(k);
            spec.inter_request_gap = config.inter_request_gap;
            schedule.push_back(std::move(spec));
        }
    }
    return schedule;
}

/// n lines of n space-separated bits.
inline void write_correlation_matrix(std::ostream& os, const CorrelationMatrix& cm) {
    for (std::size_t i = 0; i < cm.size(); ++i) {
        for (std::size_t j = 0; j < cm.size(); ++j) {
            if (j) os << ' ';
            os << (cm.at(i, j) ? 1 : 0);
        }
        os << '\n';
    }
}

inline CorrelationMatrix read_correlation_matrix(std::istream& is) {
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<int> row;
        std::string tok;
        while (ls >> tok) {
            if (tok != "0" && tok != "1") throw std::invalid_argument("correlation matrix entries must be 0 or 1");
            row.push_back(tok == "1");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("empty correlation matrix");
    CorrelationMatrix cm(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::invalid_argument("correlation matrix must be square");
        for (std::size_t j = 0; j < rows.size(); ++j) cm.set(i, j, rows[i][j] != 0);
    }
    return cm;
}

} // namespace corrdisc
