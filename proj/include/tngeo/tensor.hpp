#ifndef TNGEO_TENSOR_HPP
#define TNGEO_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "tngeo/errors.hpp"
#include "tngeo/rng.hpp"

namespace tngeo {

using IndexId = std::uint64_t;

/// Physical indices are the open legs of the encoded state (one per site);
/// virtual indices are the bonds summed over during contraction.
enum class IndexKind : std::uint8_t { Physical, Virtual };

/// Index ids are globally unique within a network: physical ids equal the
/// site number, virtual ids live above kVirtualIdBase. A dense target state
/// and any network over the same sites therefore share physical ids by
/// construction.
inline constexpr IndexId kVirtualIdBase = 1ull << 32;

struct Index {
    IndexId id = 0;
    std::size_t dim = 1;
    IndexKind kind = IndexKind::Virtual;
    std::uint32_t tag = 0; // site number (Physical) or bond serial (Virtual)

    friend bool operator==(const Index& a, const Index& b) {
        return a.id == b.id && a.dim == b.dim && a.kind == b.kind && a.tag == b.tag;
    }
};

inline Index physical_index(std::uint32_t site, std::size_t dim) {
    return Index{static_cast<IndexId>(site), dim, IndexKind::Physical, site};
}

inline Index virtual_index(std::uint32_t serial, std::size_t dim) {
    return Index{kVirtualIdBase + serial, dim, IndexKind::Virtual, serial};
}

/// Dense real tensor with labeled indices, stored row-major with respect to
/// the index order. Immutable by convention once built: operations return
/// new tensors.
class Tensor {
public:
    Tensor() : indices_{}, data_{0.0} {}

    explicit Tensor(std::vector<Index> indices)
        : indices_(std::move(indices)), data_(checked_size(indices_), 0.0) {}

    Tensor(std::vector<Index> indices, std::vector<double> data)
        : indices_(std::move(indices)), data_(std::move(data)) {
        if (data_.size() != checked_size(indices_))
            throw DimensionMismatch("tensor data length does not match index dims");
    }

    static Tensor scalar(double v) {
        Tensor t;
        t.data_[0] = v;
        return t;
    }

    const std::vector<Index>& indices() const { return indices_; }
    std::size_t rank() const { return indices_.size(); }
    std::size_t size() const { return data_.size(); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    bool has_index(IndexId id) const {
        return std::any_of(indices_.begin(), indices_.end(),
                           [id](const Index& ix) { return ix.id == id; });
    }

    std::size_t position_of(IndexId id) const {
        for (std::size_t i = 0; i < indices_.size(); ++i)
            if (indices_[i].id == id) return i;
        throw DimensionMismatch("index id " + std::to_string(id) + " not on tensor");
    }

    const Index& index(IndexId id) const { return indices_[position_of(id)]; }

    double norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    void scale(double a) {
        for (double& v : data_) v *= a;
    }

private:
    static std::size_t checked_size(const std::vector<Index>& indices) {
        std::size_t n = 1;
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i].dim == 0)
                throw DimensionMismatch("index dim must be >= 1");
            for (std::size_t j = i + 1; j < indices.size(); ++j)
                if (indices[i].id == indices[j].id)
                    throw DimensionMismatch("duplicate index id on one tensor");
            n *= indices[i].dim;
        }
        return n;
    }

    std::vector<Index> indices_;
    std::vector<double> data_;
};

namespace detail {

inline std::vector<std::size_t> row_major_strides(const std::vector<Index>& idx) {
    std::vector<std::size_t> strides(idx.size(), 1);
    for (std::size_t i = idx.size(); i-- > 1;)
        strides[i - 1] = strides[i] * idx[i].dim;
    return strides;
}

/// C = A (MxK) * B (KxN), all row-major.
inline void matmul(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

} // namespace detail

/// Reorders the indices of `t` to `new_order` (a permutation of its ids),
/// relocating the data accordingly.
inline Tensor permute(const Tensor& t, std::span<const IndexId> new_order) {
    const auto& idx = t.indices();
    const std::size_t r = idx.size();
    if (new_order.size() != r)
        throw InvalidPermutation("permutation length does not match tensor rank");

    std::vector<std::size_t> src_axis(r);
    std::vector<bool> used(r, false);
    bool identity = true;
    for (std::size_t j = 0; j < r; ++j) {
        bool found = false;
        for (std::size_t i = 0; i < r; ++i) {
            if (!used[i] && idx[i].id == new_order[j]) {
                src_axis[j] = i;
                used[i] = true;
                found = true;
                break;
            }
        }
        if (!found)
            throw InvalidPermutation("new order is not a permutation of the tensor's ids");
        if (src_axis[j] != j) identity = false;
    }
    if (identity) return t;

    std::vector<Index> out_idx(r);
    for (std::size_t j = 0; j < r; ++j) out_idx[j] = idx[src_axis[j]];

    Tensor out(out_idx);
    const auto out_strides = detail::row_major_strides(out_idx);
    // contribution of each source axis to the output linear offset
    std::vector<std::size_t> contrib(r);
    for (std::size_t j = 0; j < r; ++j) contrib[src_axis[j]] = out_strides[j];

    const std::size_t total = t.size();
    std::vector<std::size_t> coord(r, 0);
    std::size_t out_pos = 0;
    const double* src = t.data().data();
    double* dst = out.data().data();
    for (std::size_t lin = 0; lin < total; ++lin) {
        dst[out_pos] = src[lin];
        // odometer increment over the source coordinates
        for (std::size_t ax = r; ax-- > 0;) {
            if (++coord[ax] < idx[ax].dim) {
                out_pos += contrib[ax];
                break;
            }
            coord[ax] = 0;
            out_pos -= contrib[ax] * (idx[ax].dim - 1);
        }
    }
    return out;
}

/// Pairwise contraction over all shared index ids. Sharing zero ids yields
/// the outer product. The result carries a's free indices followed by b's.
///
/// Implemented as permute-to-(free x shared) on both operands plus one
/// row-major matrix multiply over the shared block.
inline Tensor contract(const Tensor& a, const Tensor& b) {
    std::vector<IndexId> shared;
    for (const Index& ia : a.indices()) {
        if (b.has_index(ia.id)) {
            if (b.index(ia.id).dim != ia.dim)
                throw DimensionMismatch("shared index " + std::to_string(ia.id) +
                                        " has mismatched dims");
            shared.push_back(ia.id);
        }
    }

    std::vector<IndexId> a_order, b_order;
    std::vector<Index> out_idx;
    std::size_t m = 1, k = 1, n = 1;
    for (const Index& ia : a.indices()) {
        if (std::find(shared.begin(), shared.end(), ia.id) == shared.end()) {
            a_order.push_back(ia.id);
            out_idx.push_back(ia);
            m *= ia.dim;
        }
    }
    for (IndexId id : shared) {
        a_order.push_back(id);
        k *= a.index(id).dim;
    }
    b_order = shared;
    for (const Index& ib : b.indices()) {
        if (std::find(shared.begin(), shared.end(), ib.id) == shared.end()) {
            b_order.push_back(ib.id);
            out_idx.push_back(ib);
            n *= ib.dim;
        }
    }

    const Tensor ap = permute(a, a_order);
    const Tensor bp = permute(b, b_order);
    Tensor out(out_idx);
    detail::matmul(ap.data().data(), bp.data().data(), out.data().data(), m, k, n);
    return out;
}

/// Full contraction of two tensors over an identical index-id set.
/// Real scalars, so no conjugation.
inline double inner(const Tensor& a, const Tensor& b) {
    if (a.rank() != b.rank())
        throw DimensionMismatch("inner: tensors carry different index sets");
    std::vector<IndexId> order;
    order.reserve(a.rank());
    for (const Index& ia : a.indices()) {
        if (!b.has_index(ia.id) || b.index(ia.id).dim != ia.dim)
            throw DimensionMismatch("inner: tensors carry different index sets");
        order.push_back(ia.id);
    }
    const Tensor bp = permute(b, order);
    double s = 0.0;
    const double* x = a.data().data();
    const double* y = bp.data().data();
    for (std::size_t i = 0; i < a.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Tensor with i.i.d. standard normal entries drawn from `rng`.
inline Tensor random_gaussian(std::vector<Index> shape, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.next_normal();
    return t;
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method.
/// `a` is n*n row-major and is destroyed. Returns unsorted eigenvalues.
inline std::vector<double> jacobi_eigenvalues(std::vector<double>& a, std::size_t n,
                                              double tol = 1e-12, int max_sweeps = 100) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double frob = 0.0;
    for (double v : a) frob += v * v;
    frob = std::sqrt(frob);
    if (frob == 0.0) return std::vector<double>(n, 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) <= tol * frob) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) <= tol * frob * 1e-3) continue;
                const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double sign = tau >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = at(i, p), aiq = at(i, q);
                    at(i, p) = c * aip - s * aiq;
                    at(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = at(p, i), aqi = at(q, i);
                    at(p, i) = c * api - s * aqi;
                    at(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    return eig;
}

/// Number of singular values of the (left x right) matricization exceeding
/// tol * sigma_max. Computed from the eigenvalues of the smaller Gram matrix
/// (sigma_i = sqrt of Gram eigenvalue), which is all the Schmidt-rank checks
/// need at these sizes.
inline std::size_t numerical_rank(const Tensor& t, std::span<const IndexId> left_ids,
                                  double tol = 1e-10) {
    if (left_ids.empty() || left_ids.size() >= t.rank())
        throw InvalidBipartition("left ids must be a nonempty proper subset");
    std::vector<IndexId> order;
    std::size_t rows = 1;
    for (const Index& ix : t.indices()) {
        if (std::find(left_ids.begin(), left_ids.end(), ix.id) != left_ids.end()) {
            order.push_back(ix.id);
            rows *= ix.dim;
        }
    }
    if (order.size() != left_ids.size())
        throw InvalidBipartition("left ids must all belong to the tensor");
    for (const Index& ix : t.indices())
        if (std::find(order.begin(), order.end(), ix.id) == order.end())
            order.push_back(ix.id);

    const Tensor mp = permute(t, order);
    const std::size_t cols = mp.size() / rows;
    const double* md = mp.data().data();

    const std::size_t g = std::min(rows, cols);
    std::vector<double> gram(g * g, 0.0);
    if (rows <= cols) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = i; j < rows; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < cols; ++r) s += md[i * cols + r] * md[j * cols + r];
                gram[i * rows + j] = gram[j * rows + i] = s;
            }
    } else {
        for (std::size_t i = 0; i < cols; ++i)
            for (std::size_t j = i; j < cols; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < rows; ++r) s += md[r * cols + i] * md[r * cols + j];
                gram[i * cols + j] = gram[j * cols + i] = s;
            }
    }

    std::vector<double> eig = jacobi_eigenvalues(gram, g);
    double smax = 0.0;
    for (double& e : eig) {
        e = std::sqrt(std::max(e, 0.0));
        smax = std::max(smax, e);
    }
    if (smax == 0.0) return 0;
    std::size_t rank = 0;
    for (double s : eig)
        if (s > tol * smax) ++rank;
    return rank;
}

} // namespace tngeo

#endif // TNGEO_TENSOR_HPP
