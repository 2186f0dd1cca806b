#ifndef TNGEO_NETWORK_HPP
#define TNGEO_NETWORK_HPP

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "tngeo/tensor.hpp"

namespace tngeo {

using NodeId = std::uint32_t;

struct Bond {
    NodeId a = 0;
    NodeId b = 0;
    Index index;
};

struct SitePlacement {
    NodeId node = 0;
    IndexId index_id = 0;
};

/// A set of node tensors, the bond topology connecting them, and the map
/// from physical sites to nodes. Value type: copying a Network copies the
/// state it represents.
class Network {
public:
    std::map<NodeId, Tensor>& nodes() { return nodes_; }
    const std::map<NodeId, Tensor>& nodes() const { return nodes_; }
    std::vector<Bond>& bonds() { return bonds_; }
    const std::vector<Bond>& bonds() const { return bonds_; }
    std::vector<SitePlacement>& sites() { return sites_; }
    const std::vector<SitePlacement>& sites() const { return sites_; }

    std::size_t n_sites() const { return sites_.size(); }

    const Tensor& tensor(NodeId id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end())
            throw NoSuchNode("no node " + std::to_string(id));
        return it->second;
    }

    Tensor& tensor(NodeId id) {
        auto it = nodes_.find(id);
        if (it == nodes_.end())
            throw NoSuchNode("no node " + std::to_string(id));
        return it->second;
    }

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }

    std::vector<NodeId> node_ids() const {
        std::vector<NodeId> ids;
        ids.reserve(nodes_.size());
        for (const auto& [id, t] : nodes_) ids.push_back(id);
        return ids;
    }

    /// Distinct neighbors of `id` in ascending order.
    std::vector<NodeId> neighbors(NodeId id) const {
        std::set<NodeId> out;
        for (const Bond& b : bonds_) {
            if (b.a == id) out.insert(b.b);
            if (b.b == id) out.insert(b.a);
        }
        return {out.begin(), out.end()};
    }

    bool connected() const {
        if (nodes_.empty()) return true;
        std::set<NodeId> seen;
        std::queue<NodeId> q;
        q.push(nodes_.begin()->first);
        seen.insert(nodes_.begin()->first);
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            for (NodeId v : neighbors(u))
                if (seen.insert(v).second) q.push(v);
        }
        return seen.size() == nodes_.size();
    }

    bool is_tree() const {
        return connected() && bonds_.size() + 1 == nodes_.size();
    }

    /// Physical dimension of site `s` as carried by its node tensor.
    std::size_t phys_dim(std::size_t s) const {
        const SitePlacement& pl = sites_.at(s);
        return tensor(pl.node).index(pl.index_id).dim;
    }

    /// Product of all physical dims (size of the represented dense state).
    std::size_t state_size() const {
        std::size_t n = 1;
        for (std::size_t s = 0; s < sites_.size(); ++s) n *= phys_dim(s);
        return n;
    }

private:
    std::map<NodeId, Tensor> nodes_;
    std::vector<Bond> bonds_;
    std::vector<SitePlacement> sites_;
};

/// Longest shortest-path between any two nodes, in bond hops.
inline int diameter(const Network& net) {
    if (net.nodes().empty()) return 0;
    if (!net.connected())
        throw Disconnected("diameter of a disconnected network");
    int best = 0;
    for (const auto& [start, t] : net.nodes()) {
        std::map<NodeId, int> dist;
        std::queue<NodeId> q;
        dist[start] = 0;
        q.push(start);
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            for (NodeId v : net.neighbors(u)) {
                if (!dist.count(v)) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
            }
        }
        for (const auto& [v, d] : dist) best = std::max(best, d);
    }
    return best;
}

/// (largest tensor element count, total element count over all nodes).
inline std::pair<std::size_t, std::size_t> sizes(const Network& net) {
    std::size_t largest = 0, total = 0;
    for (const auto& [id, t] : net.nodes()) {
        largest = std::max(largest, t.size());
        total += t.size();
    }
    return {largest, total};
}

/// Maximum bond dimension over all virtual bonds (1 if the network has none).
inline std::size_t max_bond_dim(const Network& net) {
    std::size_t chi = 1;
    for (const Bond& b : net.bonds()) chi = std::max(chi, b.index.dim);
    return chi;
}

} // namespace tngeo

#endif // TNGEO_NETWORK_HPP
