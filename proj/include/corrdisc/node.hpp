#pragma once

// Per-node discovery protocol: answers SREQs from the local service table,
// piggybacks mined related services onto SREPs, floods unanswerable SREQs
// and routes SREPs back along the path the SREQ took.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "corrdisc/metrics.hpp"
#include "corrdisc/mining.hpp"
#include "corrdisc/packet.hpp"
#include "corrdisc/service_table.hpp"
#include "corrdisc/sessionlog.hpp"
#include "corrdisc/types.hpp"

namespace corrdisc {

struct NodeConfig {
    std::size_t cache_capacity = ServiceTable::kDefaultCapacity;
    std::size_t log_capacity = 64;
    std::uint8_t initial_ttl = 8;
    std::size_t max_related = 8;
    std::size_t seen_capacity = 1024;
    std::size_t min_log_records = 3;  // below this the log is not mined
    bool mining_enabled = true;
    bool log_overheard = true;
    double support = 0.8;
};

/// A packet to transmit: broadcast to all neighbours, or unicast to `to`.
struct Outgoing {
    Packet packet;
    std::optional<NodeId> to;
};

class Node {
public:
    Node(NodeId id, const NodeConfig& config)
        : id_(id), config_(config), table_(config.cache_capacity), log_(config.log_capacity),
          support_(config.support) {}

    NodeId id() const { return id_; }
    const ServiceTable& table() const { return table_; }
    const LogDatabase& log() const { return log_; }
    const ItemsetCollection<ServiceId>& itemsets() const { return itemsets_; }
    const Metrics& metrics() const { return metrics_; }
    std::span<const ServiceId> hosted() const { return hosted_; }
    std::size_t pending_requests() const { return pending_.size(); }

    /// Services this node provides. They are always known and never take a
    /// cache slot.
    void host(ServiceId service) {
        auto pos = std::lower_bound(hosted_.begin(), hosted_.end(), service);
        if (pos == hosted_.end() || *pos != service) hosted_.insert(pos, service);
    }
    bool hosts(ServiceId service) const { return std::binary_search(hosted_.begin(), hosted_.end(), service); }
    bool knows(ServiceId service) const { return hosts(service) || table_.contains(service); }

    /// Replaces the mined itemsets directly (tests, fixtures).
    void set_itemsets(ItemsetCollection<ServiceId> itemsets) { itemsets_ = std::move(itemsets); }

    /// Stores a record as if learned from the network.
    void learn(const ServiceRecord& record) {
        if (hosts(record.service)) return;
        if (auto evicted = table_.insert(record); evicted && evicted->record.piggybacked && !evicted->hit) {
            ++metrics_.piggybacked_records_evicted_unused;
        }
    }

    /// A local consumer asks for `service`.
    std::vector<Outgoing> issue_request(ServiceId service, std::uint32_t session_seq, SimTime now) {
        ++metrics_.requests_issued;
        log_.record_request(SessionKey{id_, session_seq}, service, now);

        if (hosts(service)) {
            ++metrics_.locally_satisfied;
            return {};
        }
        if (auto* entry = table_.find(service)) {
            ++metrics_.locally_satisfied;
            if (entry->record.piggybacked) ++metrics_.prediction_hits;
            entry->hit = true;
            return {};
        }

        const MessageId id{id_, next_seq_++};
        remember(id, std::nullopt);
        pending_.emplace(id, service);
        return {Outgoing{Sreq{id, session_seq, service, config_.initial_ttl}, std::nullopt}};
    }

    /// Decodes and dispatches raw bytes from neighbour `from`.
    std::vector<Outgoing> receive(std::span<const std::uint8_t> bytes, NodeId from, SimTime now) {
        Packet packet;
        try {
            packet = decode_packet(bytes);
        } catch (const DecodeError&) {
            ++metrics_.packets_dropped;
            return {};
        }
        if (const auto* sreq = std::get_if<Sreq>(&packet)) return handle_sreq(*sreq, from, now);
        return handle_srep(std::get<Srep>(packet), from, now);
    }

    std::vector<Outgoing> handle_sreq(const Sreq& sreq, NodeId from, SimTime now) {
        if (config_.log_overheard) {
            log_.record_request(SessionKey{sreq.origin(), sreq.session_seq}, sreq.requested, now);
        }
        if (seen_from_.contains(sreq.id)) return {};
        remember(sreq.id, from);

        if (knows(sreq.requested)) {
            Srep reply;
            reply.in_reply_to = sreq.id;
            reply.responder = id_;
            reply.destination = sreq.origin();
            reply.ttl = config_.initial_ttl;
            reply.answer = advert_for(sreq.requested);
            reply.related = related_adverts(sreq.requested);
            metrics_.piggybacked_records_sent += reply.related.size();
            return {Outgoing{std::move(reply), from}};
        }
        if (sreq.ttl > 0) {
            Sreq forward = sreq;
            --forward.ttl;
            return {Outgoing{forward, std::nullopt}};
        }
        return {};
    }

    std::vector<Outgoing> handle_srep(const Srep& srep, NodeId /*from*/, SimTime now) {
        if (srep.destination == id_) {
            store_reply(srep, now);
            pending_.erase(srep.in_reply_to);
            return {};
        }
        auto path = seen_from_.find(srep.in_reply_to);
        if (path == seen_from_.end() || !path->second || srep.ttl == 0) {
            ++metrics_.packets_dropped;
            return {};
        }
        store_reply(srep, now);
        Srep forward = srep;
        --forward.ttl;
        return {Outgoing{std::move(forward), *path->second}};
    }

    /// Called when a request's timeout elapses; an unanswered request fails.
    void expire_request(const MessageId& id) {
        if (pending_.erase(id) > 0) ++metrics_.requests_failed;
    }

    void close_stale_sessions(SimTime now, SimTime window) { log_.close_stale_sessions(now, window); }

    /// Re-mines the closed sessions of the log.
    void mine() {
        if (!config_.mining_enabled) return;
        const auto transactions = log_.snapshot_transactions();
        if (transactions.size() < config_.min_log_records) {
            itemsets_.clear();
            return;
        }
        itemsets_ = mine_frequent_itemsets<ServiceId>(transactions, support_);
    }

    /// Piggyback candidates for `service`: mined related services this node
    /// knows, best supported first, at most max_related of them.
    std::vector<ServiceAdvert> related_adverts(ServiceId service) const {
        std::vector<ServiceAdvert> out;
        if (!config_.mining_enabled) return out;
        for (const auto& [other, support] : ranked_related_services<ServiceId>(service, itemsets_)) {
            if (out.size() == config_.max_related) break;
            if (knows(other)) out.push_back(advert_for(other));
        }
        return out;
    }

private:
    ServiceAdvert advert_for(ServiceId service) const {
        if (hosts(service)) return {service, id_};
        return {service, table_.find(service)->record.provider};
    }

    // Answer first, then related in list order. Only capacity - 1 related
    // records are stored so the answer is never evicted by its own reply.
    void store_reply(const Srep& srep, SimTime now) {
        learn(ServiceRecord{srep.answer.service, srep.answer.provider, now, false});
        const std::size_t room = table_.capacity() - 1;
        std::size_t stored = 0;
        for (const auto& r : srep.related) {
            if (stored == room) break;
            if (r.service == srep.answer.service) continue;
            learn(ServiceRecord{r.service, r.provider, now, true});
            ++stored;
        }
    }

    void remember(const MessageId& id, std::optional<NodeId> from) {
        if (seen_order_.size() == config_.seen_capacity) {
            seen_from_.erase(seen_order_.front());
            seen_order_.pop_front();
        }
        seen_order_.push_back(id);
        seen_from_.emplace(id, from);
    }

    NodeId id_;
    NodeConfig config_;
    ServiceTable table_;
    LogDatabase log_;
    SupportThreshold support_;
    ItemsetCollection<ServiceId> itemsets_;
    std::vector<ServiceId> hosted_;

    // msg_id -> neighbour the SREQ first arrived from (nullopt for our own)
    std::map<MessageId, std::optional<NodeId>> seen_from_;
    std::deque<MessageId> seen_order_;
    std::map<MessageId, ServiceId> pending_;
    std::uint32_t next_seq_ = 0;
    Metrics metrics_;
};

} // namespace corrdisc
