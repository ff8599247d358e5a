#pragma once

// Frequent-itemset mining over session transactions.
//
// FP-Growth builds a prefix tree of the frequent items of every transaction
// and mines it recursively through conditional pattern bases, so no candidate
// itemsets are ever generated. A brute-force enumerator with the same
// contract is kept next to it as a reference for testing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace corrdisc {

/// Items of one transaction. Order and duplicates are ignored by mining.
template <typename Item>
using Transaction = std::vector<Item>;

template <typename Item>
struct FrequentItemset {
    std::vector<Item> items;  // sorted ascending, non-empty
    std::uint32_t support_count = 0;

    friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;

    bool contains(const Item& item) const {
        return std::binary_search(items.begin(), items.end(), item);
    }
};

/// Mining output, sorted by (size, items) and free of duplicates.
template <typename Item>
using ItemsetCollection = std::vector<FrequentItemset<Item>>;

class SupportThreshold {
public:
    explicit SupportThreshold(double fraction) : fraction_(fraction) {
        if (!(fraction > 0.0 && fraction <= 1.0)) {
            throw std::invalid_argument("support fraction must lie in (0, 1]");
        }
    }

    double fraction() const { return fraction_; }

    /// ceil(fraction * m), at least 1. The small epsilon absorbs products
    /// such as 0.7 * 10 that land just above an integer in binary.
    std::uint32_t min_count(std::size_t transactions) const {
        const double raw = fraction_ * static_cast<double>(transactions);
        const auto count = static_cast<std::uint32_t>(std::ceil(raw - 1e-9));
        return std::max<std::uint32_t>(count, 1);
    }

private:
    double fraction_;
};

namespace detail {

template <typename Item>
std::vector<Item> normalized(std::vector<Item> items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
}

template <typename Item>
void canonicalize(ItemsetCollection<Item>& sets) {
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
        if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
        return a.items < b.items;
    });
}

} // namespace detail

/// Frequent-pattern tree. Nodes live in a flat arena addressed by index;
/// index 0 is the item-less root.
template <typename Item>
class FPTree {
public:
    using Index = std::uint32_t;
    static constexpr Index npos = std::numeric_limits<Index>::max();

    struct Node {
        Item item{};
        std::uint32_t count = 0;
        Index parent = npos;
        Index next_same = npos;  // header chain link
        std::vector<Index> children;
    };

    struct HeaderEntry {
        Item item{};
        std::uint32_t frequency = 0;
        Index head = npos;
        Index tail = npos;
    };

    /// Paths weighted by a multiplicity; plain transactions have weight 1.
    using WeightedPath = std::pair<std::vector<Item>, std::uint32_t>;

    static FPTree build(std::span<const Transaction<Item>> transactions, std::uint32_t min_count) {
        std::vector<WeightedPath> weighted;
        weighted.reserve(transactions.size());
        for (const auto& t : transactions) {
            weighted.emplace_back(detail::normalized(t), 1);
        }
        return build_weighted(weighted, min_count);
    }

    /// Every path must already be duplicate-free.
    static FPTree build_weighted(std::span<const WeightedPath> paths, std::uint32_t min_count) {
        if (min_count == 0) throw std::invalid_argument("min_count must be >= 1");

        std::map<Item, std::uint32_t> frequency;
        for (const auto& [items, weight] : paths) {
            for (const auto& item : items) frequency[item] += weight;
        }

        FPTree tree;
        for (const auto& [item, freq] : frequency) {
            if (freq >= min_count) tree.header_.push_back({item, 0, npos, npos});
        }
        std::stable_sort(tree.header_.begin(), tree.header_.end(),
                         [&](const HeaderEntry& a, const HeaderEntry& b) {
                             return frequency[a.item] > frequency[b.item];
                         });
        std::map<Item, std::size_t> rank;
        for (std::size_t i = 0; i < tree.header_.size(); ++i) rank[tree.header_[i].item] = i;

        std::vector<std::size_t> ordered;
        for (const auto& [items, weight] : paths) {
            ordered.clear();
            for (const auto& item : items) {
                if (auto it = rank.find(item); it != rank.end()) ordered.push_back(it->second);
            }
            std::sort(ordered.begin(), ordered.end());
            tree.insert_path(ordered, weight);
        }
        return tree;
    }

    const Node& root() const { return nodes_.front(); }
    const Node& node(Index i) const { return nodes_.at(i); }
    std::size_t node_count() const { return nodes_.size(); }

    /// Frequent items in descending (frequency, then ascending item) order.
    const std::vector<HeaderEntry>& header() const { return header_; }

    bool empty() const { return nodes_.size() == 1; }

    /// Child of `parent` carrying `item`, or npos.
    Index child(Index parent, const Item& item) const {
        for (Index c : nodes_.at(parent).children) {
            if (nodes_[c].item == item) return c;
        }
        return npos;
    }

    /// Items from the root down to `i`, excluding `i` itself.
    std::vector<Item> prefix_path(Index i) const {
        std::vector<Item> path;
        for (Index p = nodes_.at(i).parent; p != 0 && p != npos; p = nodes_[p].parent) {
            path.push_back(nodes_[p].item);
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

private:
    FPTree() : nodes_(1) {}

    void insert_path(std::span<const std::size_t> header_ranks, std::uint32_t weight) {
        Index current = 0;
        for (std::size_t r : header_ranks) {
            HeaderEntry& entry = header_[r];
            Index next = child(current, entry.item);
            if (next == npos) {
                next = static_cast<Index>(nodes_.size());
                nodes_.push_back(Node{entry.item, 0, current, npos, {}});
                nodes_[current].children.push_back(next);
                if (entry.head == npos) {
                    entry.head = next;
                } else {
                    nodes_[entry.tail].next_same = next;
                }
                entry.tail = next;
            }
            nodes_[next].count += weight;
            entry.frequency += weight;
            current = next;
        }
    }

    std::vector<Node> nodes_;
    std::vector<HeaderEntry> header_;
};

namespace detail {

template <typename Item>
void fp_growth(const FPTree<Item>& tree, std::vector<Item>& suffix, std::uint32_t min_count,
               ItemsetCollection<Item>& out) {
    using Tree = FPTree<Item>;
    const auto& header = tree.header();
    for (auto entry = header.rbegin(); entry != header.rend(); ++entry) {
        suffix.push_back(entry->item);
        std::vector<Item> pattern = suffix;
        std::sort(pattern.begin(), pattern.end());
        out.push_back({std::move(pattern), entry->frequency});

        std::vector<typename Tree::WeightedPath> base;
        for (auto n = entry->head; n != Tree::npos; n = tree.node(n).next_same) {
            auto path = tree.prefix_path(n);
            if (!path.empty()) base.emplace_back(std::move(path), tree.node(n).count);
        }
        if (!base.empty()) {
            const auto conditional = Tree::build_weighted(base, min_count);
            if (!conditional.empty()) fp_growth(conditional, suffix, min_count, out);
        }
        suffix.pop_back();
    }
}

} // namespace detail

/// All itemsets contained in at least ceil(support * |transactions|)
/// transactions, with exact counts.
template <typename Item>
ItemsetCollection<Item> mine_frequent_itemsets(std::span<const Transaction<Item>> transactions,
                                               SupportThreshold support) {
    ItemsetCollection<Item> out;
    if (transactions.empty()) return out;
    const auto min_count = support.min_count(transactions.size());
    const auto tree = FPTree<Item>::build(transactions, min_count);
    std::vector<Item> suffix;
    detail::fp_growth(tree, suffix, min_count, out);
    detail::canonicalize(out);
    return out;
}

inline constexpr std::size_t kBruteForceMaxUniverse = 20;

/// Reference miner: counts containment of every subset of the item universe.
template <typename Item>
ItemsetCollection<Item> brute_force_frequent_itemsets(std::span<const Transaction<Item>> transactions,
                                                      SupportThreshold support) {
    std::vector<Item> universe;
    for (const auto& t : transactions) universe.insert(universe.end(), t.begin(), t.end());
    universe = detail::normalized(std::move(universe));
    if (universe.size() > kBruteForceMaxUniverse) {
        throw std::invalid_argument("brute-force miner supports at most 20 distinct items");
    }

    ItemsetCollection<Item> out;
    if (transactions.empty()) return out;

    std::vector<std::uint32_t> masks;
    for (const auto& t : transactions) {
        std::uint32_t mask = 0;
        for (const auto& item : t) {
            const auto pos = std::lower_bound(universe.begin(), universe.end(), item) - universe.begin();
            mask |= 1u << pos;
        }
        masks.push_back(mask);
    }

    const auto min_count = support.min_count(transactions.size());
    const std::uint32_t subsets = 1u << universe.size();
    for (std::uint32_t candidate = 1; candidate < subsets; ++candidate) {
        std::uint32_t count = 0;
        for (auto m : masks) {
            if ((m & candidate) == candidate) ++count;
        }
        if (count < min_count) continue;
        FrequentItemset<Item> set{{}, count};
        for (std::size_t b = 0; b < universe.size(); ++b) {
            if (candidate & (1u << b)) set.items.push_back(universe[b]);
        }
        out.push_back(std::move(set));
    }
    detail::canonicalize(out);
    return out;
}

/// Union of every itemset containing `item`, minus `item` itself. Sorted.
template <typename Item>
std::vector<Item> related_services(const Item& item, std::span<const FrequentItemset<Item>> itemsets) {
    std::vector<Item> related;
    for (const auto& set : itemsets) {
        if (!set.contains(item)) continue;
        for (const auto& other : set.items) {
            if (other != item) related.push_back(other);
        }
    }
    return detail::normalized(std::move(related));
}

/// Related items paired with the largest support of any itemset linking them
/// to `item`, ordered by descending support then ascending item.
template <typename Item>
std::vector<std::pair<Item, std::uint32_t>> ranked_related_services(
    const Item& item, std::span<const FrequentItemset<Item>> itemsets) {
    std::map<Item, std::uint32_t> best;
    for (const auto& set : itemsets) {
        if (!set.contains(item)) continue;
        for (const auto& other : set.items) {
            if (other == item) continue;
            auto& b = best[other];
            b = std::max(b, set.support_count);
        }
    }
    std::vector<std::pair<Item, std::uint32_t>> ranked(best.begin(), best.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranked;
}

} // namespace corrdisc
