#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "corrdisc/mining.hpp"
#include "corrdisc/types.hpp"

namespace corrdisc {

struct SessionKey {
    NodeId consumer;
    std::uint32_t session_seq = 0;

    friend auto operator<=>(const SessionKey&, const SessionKey&) = default;
};

struct SessionRecord {
    SessionKey key;
    std::vector<ServiceId> services;  // sorted, unique
    SimTime opened_at{};
    bool closed = false;
};

/// Circular log of session records. When full, the oldest record is dropped
/// to make room for a new session.
class LogDatabase {
public:
    explicit LogDatabase(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("log capacity must be positive");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return records_.size(); }
    const std::deque<SessionRecord>& records() const { return records_; }

    /// Adds `service` to the open record for `key`, creating the record if
    /// needed. Starting a new session of a consumer closes that consumer's
    /// earlier open sessions. Requests for an already-closed session are
    /// ignored since closed records are immutable.
    void record_request(const SessionKey& key, ServiceId service, SimTime now) {
        auto it = std::find_if(records_.begin(), records_.end(),
                               [&](const SessionRecord& r) { return r.key == key; });
        if (it != records_.end()) {
            if (!it->closed) {
                auto pos = std::lower_bound(it->services.begin(), it->services.end(), service);
                if (pos == it->services.end() || *pos != service) it->services.insert(pos, service);
            }
            return;
        }
        for (auto& r : records_) {
            if (r.key.consumer == key.consumer && !r.closed) r.closed = true;
        }
        if (records_.size() == capacity_) records_.pop_front();
        records_.push_back(SessionRecord{key, {service}, now, false});
    }

    /// Closes every open record opened at least `window` ago.
    void close_stale_sessions(SimTime now, SimTime window) {
        if (window <= SimTime::zero()) throw std::invalid_argument("session window must be positive");
        for (auto& r : records_) {
            if (!r.closed && now - r.opened_at >= window) r.closed = true;
        }
    }

    /// Service sets of the closed records, oldest first.
    std::vector<Transaction<ServiceId>> snapshot_transactions() const {
        std::vector<Transaction<ServiceId>> out;
        for (const auto& r : records_) {
            if (r.closed) out.push_back(r.services);
        }
        return out;
    }

    /// `<consumer>:<session_seq> closed=<0|1> services=<sorted ids>`, one line per record.
    void dump(std::ostream& os) const {
        for (const auto& r : records_) {
            os << r.key.consumer << ':' << r.key.session_seq << " closed=" << (r.closed ? 1 : 0)
               << " services=";
            for (std::size_t i = 0; i < r.services.size(); ++i) {
                if (i) os << ',';
                os << r.services[i];
            }
            os << '\n';
        }
    }

private:
    std::size_t capacity_;
    std::deque<SessionRecord> records_;
};

} // namespace corrdisc
