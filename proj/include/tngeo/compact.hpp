#ifndef TNGEO_COMPACT_HPP
#define TNGEO_COMPACT_HPP

#include <algorithm>
#include <vector>

#include "tngeo/network.hpp"

namespace tngeo {

/// Compact form of a loop-free network: while some leaf (a node with exactly
/// one virtual bond) hangs on a bond of dimension strictly below `chi`, that
/// leaf is contracted into its neighbor. Lossless: the represented state is
/// unchanged. Leaves are processed in ascending node-id order; the final
/// topology does not depend on the order.
inline Network compactify(const Network& input, std::size_t chi) {
    if (!input.is_tree())
        throw NotATree("compactify requires a loop-free network");

    Network net = input;
    for (;;) {
        bool merged = false;
        for (const auto& [id, t] : net.nodes()) {
            std::size_t bond_count = 0;
            std::size_t bond_pos = 0;
            for (std::size_t e = 0; e < net.bonds().size(); ++e) {
                if (net.bonds()[e].a == id || net.bonds()[e].b == id) {
                    ++bond_count;
                    bond_pos = e;
                }
            }
            if (bond_count != 1) continue;
            const Bond bond = net.bonds()[bond_pos];
            if (bond.index.dim >= chi) continue;

            const NodeId leaf = id;
            const NodeId nb = bond.a == leaf ? bond.b : bond.a;
            net.tensor(nb) = contract(net.tensor(leaf), net.tensor(nb));
            for (SitePlacement& s : net.sites())
                if (s.node == leaf) s.node = nb;
            net.bonds().erase(net.bonds().begin() + static_cast<std::ptrdiff_t>(bond_pos));
            net.nodes().erase(leaf);
            merged = true;
            break;
        }
        if (!merged) return net;
    }
}

struct CompactionSummary {
    std::size_t nodes_removed = 0;
    std::size_t total_elems_before = 0;
    std::size_t total_elems_after = 0;
};

inline CompactionSummary compaction_summary(const Network& before, const Network& after) {
    CompactionSummary s;
    s.nodes_removed = before.nodes().size() - after.nodes().size();
    s.total_elems_before = sizes(before).second;
    s.total_elems_after = sizes(after).second;
    return s;
}

} // namespace tngeo

#endif // TNGEO_COMPACT_HPP
