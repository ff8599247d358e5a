#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>

#include "corrdisc/types.hpp"

namespace corrdisc {

struct ServiceRecord {
    ServiceId service;
    NodeId provider;
    SimTime learned_at{};
    bool piggybacked = false;  // learned as a related service, not a direct answer

    friend bool operator==(const ServiceRecord&, const ServiceRecord&) = default;
};

struct TableEntry {
    ServiceRecord record;
    bool hit = false;  // satisfied at least one local request since insertion
};

/// Bounded service cache with pure FIFO replacement: at most one entry per
/// service, and re-inserting a known service updates it without moving it.
class ServiceTable {
public:
    static constexpr std::size_t kDefaultCapacity = 5;

    explicit ServiceTable(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("service table capacity must be positive");
    }

    /// Returns the entry evicted to make room, if any.
    std::optional<TableEntry> insert(const ServiceRecord& record) {
        if (auto* existing = find(record.service)) {
            *existing = TableEntry{record, false};
            return std::nullopt;
        }
        std::optional<TableEntry> evicted;
        if (entries_.size() == capacity_) {
            evicted = entries_.front();
            entries_.pop_front();
        }
        entries_.push_back(TableEntry{record, false});
        return evicted;
    }

    TableEntry* find(ServiceId service) {
        auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const TableEntry& e) { return e.record.service == service; });
        return it == entries_.end() ? nullptr : &*it;
    }
    const TableEntry* find(ServiceId service) const {
        return const_cast<ServiceTable*>(this)->find(service);
    }
    bool contains(ServiceId service) const { return find(service) != nullptr; }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// Oldest first.
    const std::deque<TableEntry>& entries() const { return entries_; }

private:
    std::size_t capacity_;
    std::deque<TableEntry> entries_;
};

} // namespace corrdisc
