#ifndef TNGEO_CONTRACTION_HPP
#define TNGEO_CONTRACTION_HPP

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "tngeo/network.hpp"

namespace tngeo {

/// Default cap on the dense-state entry count (2^24 entries, 128 MiB of f64).
inline constexpr std::size_t kDefaultMemoryCeiling = 1ull << 24;

/// One pairwise contraction: `src` is contracted into `dst`; the result
/// replaces dst and src disappears.
struct ContractionStep {
    NodeId src = 0;
    NodeId dst = 0;
};

struct ContractionPlan {
    std::vector<ContractionStep> steps;
    std::size_t peak_elems = 0; // max element count among step results
};

namespace detail {

using IndexDims = std::map<IndexId, std::size_t>;

inline IndexDims index_dims(const Tensor& t) {
    IndexDims d;
    for (const Index& ix : t.indices()) d[ix.id] = ix.dim;
    return d;
}

inline std::size_t elems(const IndexDims& d) {
    std::size_t n = 1;
    for (const auto& [id, dim] : d) n *= dim;
    return n;
}

/// Index set of contract(a, b): the symmetric difference.
inline IndexDims merge_dims(const IndexDims& a, const IndexDims& b) {
    IndexDims out;
    for (const auto& [id, dim] : a)
        if (!b.count(id)) out[id] = dim;
    for (const auto& [id, dim] : b)
        if (!a.count(id)) out[id] = dim;
    return out;
}

inline bool share_index(const IndexDims& a, const IndexDims& b) {
    for (const auto& [id, dim] : a)
        if (b.count(id)) return true;
    return false;
}

} // namespace detail

/// Leaf-first elimination toward `root`: among current leaves the one with
/// the smallest id is contracted into its unique neighbor. For a chain with
/// the last node as root this is the usual left-to-right sweep.
inline ContractionPlan plan_tree(const Network& net, NodeId root) {
    if (!net.has_node(root)) throw NoSuchNode("plan_tree: unknown root");
    if (!net.is_tree()) throw NotATree("plan_tree on a network with loops");

    std::map<NodeId, detail::IndexDims> dims;
    std::map<NodeId, std::set<NodeId>> adj;
    for (const auto& [id, t] : net.nodes()) dims[id] = detail::index_dims(t);
    for (const Bond& b : net.bonds()) {
        adj[b.a].insert(b.b);
        adj[b.b].insert(b.a);
    }

    ContractionPlan plan;
    plan.peak_elems = net.nodes().empty() ? 0 : sizes(net).first;
    while (dims.size() > 1) {
        NodeId leaf = 0;
        bool found = false;
        for (const auto& [id, d] : dims) {
            if (id != root && adj[id].size() == 1) {
                leaf = id;
                found = true;
                break;
            }
        }
        if (!found) throw NotATree("plan_tree: no leaf found");
        const NodeId nb = *adj[leaf].begin();
        plan.steps.push_back({leaf, nb});
        dims[nb] = detail::merge_dims(dims[leaf], dims[nb]);
        plan.peak_elems = std::max(plan.peak_elems, detail::elems(dims[nb]));
        dims.erase(leaf);
        adj[nb].erase(leaf);
        for (NodeId other : adj[leaf])
            if (other != nb) {
                adj[nb].insert(other);
                adj[other].erase(leaf);
                adj[other].insert(nb);
            }
        adj.erase(leaf);
    }
    return plan;
}

/// Greedy pairwise elimination: at every step contract the adjacent pair
/// whose result has the fewest elements, ties broken by the smallest
/// (min id, max id) pair; the result lives under the smaller id.
inline ContractionPlan plan_greedy(const Network& net) {
    std::map<NodeId, detail::IndexDims> dims;
    for (const auto& [id, t] : net.nodes()) dims[id] = detail::index_dims(t);

    ContractionPlan plan;
    plan.peak_elems = net.nodes().empty() ? 0 : sizes(net).first;
    while (dims.size() > 1) {
        bool found = false;
        std::size_t best_cost = 0;
        NodeId ba = 0, bb = 0;
        for (auto ia = dims.begin(); ia != dims.end(); ++ia) {
            for (auto ib = std::next(ia); ib != dims.end(); ++ib) {
                if (!detail::share_index(ia->second, ib->second)) continue;
                const std::size_t cost = detail::elems(detail::merge_dims(ia->second, ib->second));
                if (!found || cost < best_cost) {
                    found = true;
                    best_cost = cost;
                    ba = ia->first;
                    bb = ib->first;
                }
            }
        }
        if (!found) throw Disconnected("plan_greedy: no adjacent pair left");
        plan.steps.push_back({bb, ba});
        dims[ba] = detail::merge_dims(dims[ba], dims[bb]);
        plan.peak_elems = std::max(plan.peak_elems, best_cost);
        dims.erase(bb);
    }
    return plan;
}

/// Deterministic contraction plan: leaf-first toward the highest node id for
/// trees, greedy size-minimizing elimination otherwise.
inline ContractionPlan plan(const Network& net) {
    if (net.nodes().empty()) return {};
    if (!net.connected()) throw Disconnected("plan of a disconnected network");
    if (net.is_tree()) return plan_tree(net, net.nodes().rbegin()->first);
    return plan_greedy(net);
}

/// Executes `p` on the network's tensors and returns the dense state with
/// its physical indices in ascending site order.
inline Tensor to_dense(const Network& net, const ContractionPlan& p,
                       std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    if (net.nodes().empty()) throw NoSuchNode("to_dense of an empty network");
    if (net.state_size() > memory_ceiling)
        throw TargetTooLarge("dense state exceeds the memory ceiling");

    std::map<NodeId, Tensor> work(net.nodes().begin(), net.nodes().end());
    for (const ContractionStep& s : p.steps) {
        work[s.dst] = contract(work.at(s.src), work.at(s.dst));
        work.erase(s.src);
    }
    if (work.size() != 1) throw Disconnected("plan did not contract to a single tensor");

    Tensor out = std::move(work.begin()->second);
    std::vector<IndexId> order;
    for (const Index& ix : out.indices()) order.push_back(ix.id);
    std::sort(order.begin(), order.end());
    return permute(out, order);
}

inline Tensor to_dense(const Network& net,
                       std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    return to_dense(net, plan(net), memory_ceiling);
}

namespace detail {

/// Fold order for environment computations: starting from the open physical
/// legs, repeatedly absorb the node giving the smallest intermediate, ties
/// by node id. Keeps the accumulated boundary small for trees and grids.
inline std::vector<NodeId> env_fold_order(const Tensor& vec, const Network& net) {
    IndexDims acc = index_dims(vec);
    std::map<NodeId, IndexDims> dims;
    for (const auto& [id, t] : net.nodes()) dims[id] = index_dims(t);

    std::vector<NodeId> order;
    order.reserve(dims.size());
    while (!dims.empty()) {
        bool found = false;
        std::size_t best_cost = 0;
        NodeId best = 0;
        for (const auto& [id, d] : dims) {
            const std::size_t cost = elems(merge_dims(acc, d));
            if (!found || cost < best_cost) {
                found = true;
                best_cost = cost;
                best = id;
            }
        }
        order.push_back(best);
        acc = merge_dims(acc, dims[best]);
        dims.erase(best);
    }
    return order;
}

inline Tensor permute_like(const Tensor& t, const Tensor& ref) {
    std::vector<IndexId> order;
    order.reserve(ref.rank());
    for (const Index& ix : ref.indices()) order.push_back(ix.id);
    return permute(t, order);
}

} // namespace detail

/// Contraction of `vec` (a tensor on the network's physical indices) with
/// every node tensor except `node`. The result has exactly that node's index
/// shape and satisfies inner(environment, T_node) = inner(vec, to_dense(net)).
inline Tensor environment(const Tensor& vec, const Network& net, NodeId node) {
    if (!net.has_node(node)) throw NoSuchNode("environment: unknown node");
    const Tensor& ref = net.tensor(node);
    if (net.nodes().size() == 1) return detail::permute_like(vec, ref);

    detail::IndexDims acc_dims = detail::index_dims(vec);
    std::map<NodeId, detail::IndexDims> dims;
    for (const auto& [id, t] : net.nodes())
        if (id != node) dims[id] = detail::index_dims(t);

    Tensor acc = vec;
    while (!dims.empty()) {
        bool found = false;
        std::size_t best_cost = 0;
        NodeId best = 0;
        for (const auto& [id, d] : dims) {
            const std::size_t cost = detail::elems(detail::merge_dims(acc_dims, d));
            if (!found || cost < best_cost) {
                found = true;
                best_cost = cost;
                best = id;
            }
        }
        acc = contract(acc, net.tensor(best));
        acc_dims = detail::merge_dims(acc_dims, dims[best]);
        dims.erase(best);
    }
    return detail::permute_like(acc, ref);
}

/// Environments of every node against `vec`, sharing partial contractions:
/// along one fold order, prefix_k = vec * T_(0..k-1) and suffix_k =
/// T_(k+1..K-1) contracted among themselves, so env of the k-th node is
/// one extra contraction. ~3K contractions total instead of K^2.
inline std::map<NodeId, Tensor> all_environments(const Tensor& vec, const Network& net) {
    std::map<NodeId, Tensor> envs;
    const std::size_t k_nodes = net.nodes().size();
    if (k_nodes == 0) return envs;
    if (k_nodes == 1) {
        const auto& [id, t] = *net.nodes().begin();
        envs[id] = detail::permute_like(vec, t);
        return envs;
    }

    const std::vector<NodeId> order = detail::env_fold_order(vec, net);
    std::vector<Tensor> prefix(k_nodes);
    prefix[0] = vec;
    for (std::size_t k = 0; k + 1 < k_nodes; ++k)
        prefix[k + 1] = contract(prefix[k], net.tensor(order[k]));

    std::vector<Tensor> suffix(k_nodes); // suffix[k] = product of nodes after k
    suffix[k_nodes - 2] = net.tensor(order[k_nodes - 1]);
    for (std::size_t k = k_nodes - 2; k-- > 0;)
        suffix[k] = contract(net.tensor(order[k + 1]), suffix[k + 1]);

    for (std::size_t k = 0; k < k_nodes; ++k) {
        const NodeId id = order[k];
        Tensor env = (k == k_nodes - 1) ? prefix[k] : contract(prefix[k], suffix[k]);
        envs[id] = detail::permute_like(env, net.tensor(id));
    }
    return envs;
}

} // namespace tngeo

#endif // TNGEO_CONTRACTION_HPP
