// Test-only oracles: independent brute-force routes for values the library
// computes by its production paths. Nothing here may call into the code it
// checks beyond plain data access.
#ifndef TNGEO_TESTS_ORACLES_HPP
#define TNGEO_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <vector>

namespace oracles {

/// C (m x n) = A (m x k) * B (k x n), plain triple loop.
inline std::vector<double> matmul_loops(const std::vector<double>& a,
                                        const std::vector<double>& b, std::size_t m,
                                        std::size_t k, std::size_t n) {
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < k; ++l) c[i * n + j] += a[i * k + l] * b[l * n + j];
    return c;
}

/// Naive re-indexing permute: axes[j] = source axis feeding output axis j.
inline std::vector<double> permute_loops(const std::vector<double>& in,
                                         const std::vector<std::size_t>& dims,
                                         const std::vector<std::size_t>& axes) {
    const std::size_t r = dims.size();
    std::vector<std::size_t> in_strides(r, 1), out_dims(r);
    for (std::size_t i = r; i-- > 1;) in_strides[i - 1] = in_strides[i] * dims[i];
    for (std::size_t j = 0; j < r; ++j) out_dims[j] = dims[axes[j]];
    std::vector<std::size_t> out_strides(r, 1);
    for (std::size_t i = r; i-- > 1;) out_strides[i - 1] = out_strides[i] * out_dims[i];

    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    std::vector<double> out(total);
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t rem = lin, out_pos = 0;
        std::vector<std::size_t> coord(r);
        for (std::size_t i = 0; i < r; ++i) {
            coord[i] = rem / in_strides[i];
            rem %= in_strides[i];
        }
        for (std::size_t j = 0; j < r; ++j) out_pos += coord[axes[j]] * out_strides[j];
        out[out_pos] = in[lin];
    }
    return out;
}

inline double dot_flat(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Singular values of an m x n row-major matrix by one-sided Jacobi
/// orthogonalization (Hestenes): rotate column pairs until mutually
/// orthogonal; the singular values are the final column norms.
inline std::vector<double> svd_singular_values(std::vector<double> a, std::size_t m,
                                               std::size_t n) {
    if (m < n) {
        // transpose so columns are the short direction
        std::vector<double> t(n * m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) t[j * m + i] = a[i * n + j];
        a.swap(t);
        std::swap(m, n);
    }
    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += a[i * n + p] * a[i * n + q];
        return s;
    };
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = col_dot(p, q);
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                off = std::max(off, std::abs(apq));
                if (std::abs(apq) <= 1e-30) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
                const double c = 1.0 / std::sqrt(1 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const double vp = a[i * n + p], vq = a[i * n + q];
                    a[i * n + p] = c * vp - s * vq;
                    a[i * n + q] = s * vp + c * vq;
                }
            }
        }
        if (off < 1e-15) break;
    }
    std::vector<double> sv(n);
    for (std::size_t p = 0; p < n; ++p) sv[p] = std::sqrt(col_dot(p, p));
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

inline std::size_t rank_from_singular_values(const std::vector<double>& sv, double tol) {
    if (sv.empty() || sv.front() == 0.0) return 0;
    std::size_t r = 0;
    for (double s : sv)
        if (s > tol * sv.front()) ++r;
    return r;
}

/// Graph diameter by BFS from every vertex over an explicit adjacency map.
inline int bfs_diameter(const std::map<int, std::set<int>>& adj) {
    int best = 0;
    for (const auto& [start, nb] : adj) {
        std::map<int, int> dist{{start, 0}};
        std::queue<int> q;
        q.push(start);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj.at(u))
                if (!dist.count(v)) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        for (const auto& [v, d] : dist) best = std::max(best, d);
    }
    return best;
}

/// Exhaustive search over all pairwise contraction orders of a small set of
/// tensors described by their index dims; returns the minimal possible peak
/// intermediate size.
inline std::size_t exhaustive_min_peak(std::vector<std::map<int, std::size_t>> tensors) {
    if (tensors.size() <= 1) return 0;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        for (std::size_t j = i + 1; j < tensors.size(); ++j) {
            bool adjacent = false;
            for (const auto& [id, d] : tensors[i])
                if (tensors[j].count(id)) adjacent = true;
            if (!adjacent) continue;
            std::map<int, std::size_t> merged;
            for (const auto& [id, d] : tensors[i])
                if (!tensors[j].count(id)) merged[id] = d;
            for (const auto& [id, d] : tensors[j])
                if (!tensors[i].count(id)) merged[id] = d;
            std::size_t cost = 1;
            for (const auto& [id, d] : merged) cost *= d;

            std::vector<std::map<int, std::size_t>> rest;
            for (std::size_t k = 0; k < tensors.size(); ++k)
                if (k != i && k != j) rest.push_back(tensors[k]);
            rest.push_back(merged);
            const std::size_t sub = exhaustive_min_peak(std::move(rest));
            best = std::min(best, std::max(cost, sub));
        }
    }
    return best;
}

/// Central finite difference of f along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    return (fp - fm) / (2.0 * h);
}

} // namespace oracles

#endif // TNGEO_TESTS_ORACLES_HPP
