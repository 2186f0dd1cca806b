#ifndef TNGEO_GEOMETRY_HPP
#define TNGEO_GEOMETRY_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tngeo/contraction.hpp"
#include "tngeo/network.hpp"

namespace tngeo {

enum class Family : std::uint8_t { MPS, Antenna, Balanced, Star, PEPS, Dense };

inline const char* family_tag(Family f) {
    switch (f) {
        case Family::MPS: return "mps";
        case Family::Antenna: return "antenna";
        case Family::Balanced: return "balanced";
        case Family::Star: return "star";
        case Family::PEPS: return "peps";
        case Family::Dense: return "dense";
    }
    return "?";
}

/// Symbolic description of an ansatz: family, number of sites, requested
/// bond dimension and physical dimension. Star takes a beam length k;
/// PEPS takes a grid shape (0 = pick rows automatically).
struct GeometrySpec {
    Family family = Family::MPS;
    std::uint32_t n = 1;
    std::size_t chi = 1;
    std::size_t p = 2;
    std::uint32_t star_k = 1;
    std::uint32_t peps_rows = 0;
    std::uint32_t peps_cols = 0;

    void validate() const {
        if (n < 1) throw InvalidSpec("n must be >= 1");
        if (chi < 1) throw InvalidSpec("chi must be >= 1");
        if (p < 1) throw InvalidSpec("p must be >= 1");
        if (family == Family::Star && star_k < 1)
            throw InvalidSpec("star beam length k must be >= 1");
        if (family == Family::PEPS) {
            if (peps_rows != 0 && peps_cols != 0 &&
                static_cast<std::uint64_t>(peps_rows) * peps_cols != n)
                throw InvalidSpec("PEPS rows*cols must equal n");
            if ((peps_rows != 0 && n % peps_rows != 0) ||
                (peps_cols != 0 && n % peps_cols != 0))
                throw InvalidSpec("PEPS grid shape must divide n");
        }
    }

    /// Same spec with the PEPS grid shape made explicit: rows is the largest
    /// divisor of n not exceeding sqrt(n).
    GeometrySpec resolved() const {
        GeometrySpec s = *this;
        if (s.family == Family::PEPS) {
            if (s.peps_rows == 0 && s.peps_cols == 0) {
                std::uint32_t r = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(s.n)));
                while (r > 1 && s.n % r != 0) --r;
                s.peps_rows = std::max<std::uint32_t>(r, 1);
                s.peps_cols = s.n / s.peps_rows;
            } else if (s.peps_rows == 0) {
                s.peps_rows = s.n / s.peps_cols;
            } else if (s.peps_cols == 0) {
                s.peps_cols = s.n / s.peps_rows;
            }
        }
        return s;
    }

    /// Short tag naming the topology, e.g. "mps", "star2", "peps3x4".
    std::string name() const {
        const GeometrySpec s = resolved();
        switch (s.family) {
            case Family::Star: return "star" + std::to_string(s.star_k);
            case Family::PEPS:
                return "peps" + std::to_string(s.peps_rows) + "x" + std::to_string(s.peps_cols);
            default: return family_tag(s.family);
        }
    }
};

namespace detail {

struct Topology {
    std::uint32_t n_nodes = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> site_node; // site -> node
};

inline Topology make_topology(const GeometrySpec& spec0) {
    const GeometrySpec spec = spec0.resolved();
    spec.validate();
    const std::uint32_t n = spec.n;
    Topology topo;
    switch (spec.family) {
        case Family::MPS: {
            topo.n_nodes = n;
            for (std::uint32_t i = 0; i + 1 < n; ++i) topo.edges.push_back({i, i + 1});
            for (std::uint32_t i = 0; i < n; ++i) topo.site_node.push_back(i);
            break;
        }
        case Family::Antenna: {
            // Caterpillar: a backbone of ceil(n/2) nodes, each carrying one
            // site; backbone node j also holds pendant leaf b+j while sites
            // remain. No node exceeds 3 virtual indices.
            const std::uint32_t backbone = (n + 1) / 2;
            topo.n_nodes = n;
            for (std::uint32_t i = 0; i + 1 < backbone; ++i) topo.edges.push_back({i, i + 1});
            for (std::uint32_t j = 0; backbone + j < n; ++j)
                topo.edges.push_back({j, backbone + j});
            for (std::uint32_t i = 0; i < n; ++i) topo.site_node.push_back(i);
            break;
        }
        case Family::Balanced: {
            // Complete ternary tree filled breadth-first; internal nodes have
            // at most 1 parent + 3 children = 4 virtual indices.
            topo.n_nodes = n;
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t c = 3 * i + 1; c <= 3 * i + 3 && c < n; ++c)
                    topo.edges.push_back({i, c});
            for (std::uint32_t i = 0; i < n; ++i) topo.site_node.push_back(i);
            break;
        }
        case Family::Star: {
            // Center node plus ceil((n-1)/k) chains of length <= k, sites
            // filled beam by beam.
            topo.n_nodes = n;
            std::uint32_t next = 1;
            while (next < n) {
                NodeId prev = 0;
                for (std::uint32_t step = 0; step < spec.star_k && next < n; ++step) {
                    topo.edges.push_back({prev, next});
                    prev = next;
                    ++next;
                }
            }
            for (std::uint32_t i = 0; i < n; ++i) topo.site_node.push_back(i);
            break;
        }
        case Family::PEPS: {
            const std::uint32_t r = spec.peps_rows, c = spec.peps_cols;
            topo.n_nodes = n;
            for (std::uint32_t i = 0; i < r; ++i) {
                for (std::uint32_t j = 0; j < c; ++j) {
                    const NodeId id = i * c + j;
                    if (j + 1 < c) topo.edges.push_back({id, id + 1});
                    if (i + 1 < r) topo.edges.push_back({id, id + c});
                }
            }
            for (std::uint32_t i = 0; i < n; ++i) topo.site_node.push_back(i);
            break;
        }
        case Family::Dense: {
            topo.n_nodes = 1;
            for (std::uint32_t i = 0; i < n; ++i) topo.site_node.push_back(0);
            break;
        }
    }
    return topo;
}

/// p^count, saturating at `cap` to avoid overflow.
inline std::size_t pow_capped(std::size_t p, std::size_t count, std::size_t cap) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < count; ++i) {
        if (r >= cap || r > cap / p) return cap;
        r *= p;
    }
    return std::min(r, cap);
}

/// Sites on each side of `edge` when it is removed from an acyclic topology.
inline std::pair<std::size_t, std::size_t> bipartition_sites(const Topology& topo,
                                                             std::size_t edge) {
    std::vector<std::vector<NodeId>> adj(topo.n_nodes);
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
        if (e == edge) continue;
        adj[topo.edges[e].first].push_back(topo.edges[e].second);
        adj[topo.edges[e].second].push_back(topo.edges[e].first);
    }
    std::vector<char> side_a(topo.n_nodes, 0);
    std::vector<NodeId> stack{topo.edges[edge].first};
    side_a[topo.edges[edge].first] = 1;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : adj[u])
            if (!side_a[v]) {
                side_a[v] = 1;
                stack.push_back(v);
            }
    }
    if (side_a[topo.edges[edge].second])
        throw NotATreeBond("bond lies on a cycle");
    std::size_t a = 0;
    for (NodeId node : topo.site_node)
        if (side_a[node]) ++a;
    return {a, topo.site_node.size() - a};
}

inline std::size_t cap_for_edge(const Topology& topo, std::size_t edge, std::size_t chi,
                                std::size_t p) {
    const auto [a, b] = bipartition_sites(topo, edge);
    const std::size_t cap_a = pow_capped(p, a, chi);
    const std::size_t cap_b = pow_capped(p, b, chi);
    return std::min({cap_a, cap_b, chi});
}

} // namespace detail

/// Largest useful dimension of a tree bond: min(p^|A|, p^|B|, chi) for the
/// site bipartition A/B induced by cutting it. `bond` indexes net.bonds().
inline std::size_t tree_cap(const Network& net, std::size_t bond, std::size_t chi) {
    if (bond >= net.bonds().size()) throw NoSuchNode("tree_cap: bond index out of range");

    std::map<NodeId, std::vector<NodeId>> adj;
    for (std::size_t e = 0; e < net.bonds().size(); ++e) {
        if (e == bond) continue;
        adj[net.bonds()[e].a].push_back(net.bonds()[e].b);
        adj[net.bonds()[e].b].push_back(net.bonds()[e].a);
    }
    std::set<NodeId> side_a{net.bonds()[bond].a};
    std::vector<NodeId> stack{net.bonds()[bond].a};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId v : adj[u])
            if (side_a.insert(v).second) stack.push_back(v);
    }
    if (side_a.count(net.bonds()[bond].b))
        throw NotATreeBond("bond lies on a cycle");

    std::size_t prod_a = 1, prod_b = 1;
    for (std::size_t s = 0; s < net.n_sites(); ++s) {
        const std::size_t d = net.phys_dim(s);
        std::size_t& prod = side_a.count(net.sites()[s].node) ? prod_a : prod_b;
        if (prod <= chi) prod *= d; // saturate once past chi
    }
    return std::min({prod_a, prod_b, chi});
}

/// Builds a randomly initialized Network for `spec`. Tree-family bonds get
/// the tree_cap dimension, PEPS bonds get chi. Node tensors are seeded
/// independently via derive_seed({seed, node}), then the whole network is
/// rescaled so the represented state has norm 1.
inline Network build(const GeometrySpec& spec0, std::uint64_t seed,
                     std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    const GeometrySpec spec = spec0.resolved();
    spec.validate();
    const detail::Topology topo = detail::make_topology(spec);

    std::vector<std::size_t> bond_dim(topo.edges.size(), spec.chi);
    if (spec.family != Family::PEPS && spec.family != Family::Dense)
        for (std::size_t e = 0; e < topo.edges.size(); ++e)
            bond_dim[e] = detail::cap_for_edge(topo, e, spec.chi, spec.p);

    // gather per-node index lists: physical (ascending site), then bonds
    std::vector<std::vector<Index>> node_indices(topo.n_nodes);
    for (std::uint32_t s = 0; s < spec.n; ++s)
        node_indices[topo.site_node[s]].push_back(physical_index(s, spec.p));
    std::vector<Index> bond_index(topo.edges.size());
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
        bond_index[e] = virtual_index(static_cast<std::uint32_t>(e), bond_dim[e]);
        node_indices[topo.edges[e].first].push_back(bond_index[e]);
        node_indices[topo.edges[e].second].push_back(bond_index[e]);
    }

    Network net;
    for (std::uint32_t id = 0; id < topo.n_nodes; ++id) {
        Rng rng(derive_seed({seed, id}));
        net.nodes().emplace(id, random_gaussian(node_indices[id], rng));
    }
    for (std::size_t e = 0; e < topo.edges.size(); ++e)
        net.bonds().push_back({topo.edges[e].first, topo.edges[e].second, bond_index[e]});
    for (std::uint32_t s = 0; s < spec.n; ++s)
        net.sites().push_back({topo.site_node[s], static_cast<IndexId>(s)});

    const double nu = to_dense(net, memory_ceiling).norm();
    if (nu > 0.0) {
        const double factor =
            std::pow(nu, -1.0 / static_cast<double>(net.nodes().size()));
        for (auto& [id, t] : net.nodes()) t.scale(factor);
    }
    return net;
}

} // namespace tngeo

#endif // TNGEO_GEOMETRY_HPP
