#include <catch2/catch_amalgamated.hpp>

#include "tngeo/surrogate.hpp"
#include "tngeo/tensor.hpp"

#include "oracles.hpp"

using namespace tngeo;

namespace {

Tensor make(const std::vector<Index>& idx, const std::vector<double>& vals) {
    return Tensor(idx, vals);
}

Tensor random_tensor(const std::vector<Index>& idx, std::uint64_t seed) {
    Rng rng(seed);
    return random_gaussian(idx, rng);
}

} // namespace

TEST_CASE("contract: identity matrix acts as identity") {
    const Index i = virtual_index(0, 2), j = virtual_index(1, 2);
    const Tensor id = make({i, j}, {1, 0, 0, 1});
    const Tensor v = make({j}, {1, 2});
    const Tensor out = contract(id, v);
    REQUIRE(out.rank() == 1);
    REQUIRE(out.indices()[0].id == i.id);
    REQUIRE(out[0] == 1.0);
    REQUIRE(out[1] == 2.0);
}

TEST_CASE("contract: dot product of vectors") {
    const Index i = virtual_index(0, 2);
    const Tensor a = make({i}, {1, 2});
    const Tensor b = make({i}, {3, 4});
    const Tensor out = contract(a, b);
    REQUIRE(out.rank() == 0);
    REQUIRE(out[0] == 11.0);
}

TEST_CASE("contract: matches triple-loop matrix product") {
    const Index i = virtual_index(0, 2), k = virtual_index(1, 3), j = virtual_index(2, 4);
    const Tensor a = random_tensor({i, k}, 11);
    const Tensor b = random_tensor({k, j}, 12);
    const Tensor out = contract(a, b);
    const auto expect = oracles::matmul_loops(a.data(), b.data(), 2, 3, 4);
    REQUIRE(out.size() == expect.size());
    for (std::size_t e = 0; e < expect.size(); ++e)
        REQUIRE(out[e] == Catch::Approx(expect[e]).margin(1e-14));
}

TEST_CASE("contract: mismatched shared dims throw") {
    const Tensor a = make({Index{7, 2, IndexKind::Virtual, 0}}, {1, 2});
    const Tensor b = make({Index{7, 3, IndexKind::Virtual, 0}}, {1, 2, 3});
    REQUIRE_THROWS_AS(contract(a, b), DimensionMismatch);
}

TEST_CASE("contract: zero shared ids gives the outer product") {
    const Index i = virtual_index(0, 2), j = virtual_index(1, 3);
    const Tensor a = make({i}, {2, 5});
    const Tensor b = make({j}, {1, 10, 100});
    const Tensor out = contract(a, b);
    REQUIRE(out.size() == 6);
    REQUIRE(out[0] == 2.0);
    REQUIRE(out[5] == 500.0);
}

TEST_CASE("permute: swap of a 2x3 matrix")
{
    const Index i = virtual_index(0, 2), j = virtual_index(1, 3);
    const Tensor t = make({i, j}, {1, 2, 3, 4, 5, 6});
    const std::vector<IndexId> order{j.id, i.id};
    const Tensor out = permute(t, order);
    REQUIRE(out.indices()[0].id == j.id);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 3; ++b) REQUIRE(out[b * 2 + a] == t[a * 3 + b]);
}

TEST_CASE("permute: identity permutation is bitwise equal") {
    const Index i = virtual_index(0, 2), j = virtual_index(1, 3);
    const Tensor t = random_tensor({i, j}, 5);
    const std::vector<IndexId> order{i.id, j.id};
    const Tensor out = permute(t, order);
    REQUIRE(out.data() == t.data());
}

TEST_CASE("permute: reversed 2x3x4 matches the re-indexing oracle") {
    const Index i = virtual_index(0, 2), j = virtual_index(1, 3), k = virtual_index(2, 4);
    const Tensor t = random_tensor({i, j, k}, 99);
    const std::vector<IndexId> order{k.id, j.id, i.id};
    const Tensor out = permute(t, order);
    const auto expect = oracles::permute_loops(t.data(), {2, 3, 4}, {2, 1, 0});
    REQUIRE(out.data() == expect);
}

TEST_CASE("permute: rejects non-permutations") {
    const Index i = virtual_index(0, 2), j = virtual_index(1, 3);
    const Tensor t = random_tensor({i, j}, 1);
    const std::vector<IndexId> bad{i.id, i.id};
    REQUIRE_THROWS_AS(permute(t, bad), InvalidPermutation);
    const std::vector<IndexId> unknown{i.id, 12345};
    REQUIRE_THROWS_AS(permute(t, unknown), InvalidPermutation);
}

TEST_CASE("inner: of a tensor with itself is the squared Frobenius norm") {
    const Index i = virtual_index(0, 3), j = virtual_index(1, 2);
    const Tensor t = random_tensor({i, j}, 42);
    const double ip = inner(t, t);
    REQUIRE(ip >= 0.0);
    REQUIRE(ip == Catch::Approx(t.norm() * t.norm()).epsilon(1e-14));
}

TEST_CASE("inner: orthonormal basis tensors are orthogonal") {
    const Index i = virtual_index(0, 2);
    const Tensor e0 = make({i}, {1, 0});
    const Tensor e1 = make({i}, {0, 1});
    REQUIRE(inner(e0, e1) == 0.0);
}

TEST_CASE("inner: random pair equals the flat dot-product oracle") {
    const Index i = virtual_index(0, 2), j = virtual_index(1, 3), k = virtual_index(2, 2);
    const Tensor a = random_tensor({i, j, k}, 7);
    Tensor b = random_tensor({i, j, k}, 8);
    REQUIRE(inner(a, b) == Catch::Approx(oracles::dot_flat(a.data(), b.data())).margin(1e-14));
    // and is order-insensitive
    const std::vector<IndexId> order{k.id, i.id, j.id};
    const Tensor bp = permute(b, order);
    REQUIRE(inner(a, bp) == Catch::Approx(inner(a, b)).margin(1e-14));
}

TEST_CASE("inner: id-set mismatch throws") {
    const Tensor a = random_tensor({virtual_index(0, 2)}, 1);
    const Tensor b = random_tensor({virtual_index(1, 2)}, 1);
    REQUIRE_THROWS_AS(inner(a, b), DimensionMismatch);
}

TEST_CASE("random_gaussian: deterministic per seed") {
    const std::vector<Index> shape{virtual_index(0, 4), virtual_index(1, 5)};
    const Tensor a = random_tensor(shape, 123);
    const Tensor b = random_tensor(shape, 123);
    REQUIRE(a.data() == b.data());
    const Tensor c = random_tensor(shape, 124);
    REQUIRE(a.data() != c.data());
}

TEST_CASE("random_gaussian: sample statistics look standard normal") {
    Rng rng(2024);
    const Tensor t = random_gaussian({virtual_index(0, 100), virtual_index(1, 100)}, rng);
    double mean = 0.0;
    for (double v : t.data()) mean += v;
    mean /= static_cast<double>(t.size());
    double var = 0.0;
    for (double v : t.data()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.size() - 1);
    REQUIRE(mean > -0.05);
    REQUIRE(mean < 0.05);
    REQUIRE(var > 0.9);
    REQUIRE(var < 1.1);
}

TEST_CASE("numerical_rank: product state has rank 1") {
    // |00> as a 2x2 tensor
    const Index s0 = physical_index(0, 2), s1 = physical_index(1, 2);
    const Tensor t = make({s0, s1}, {1, 0, 0, 0});
    const std::vector<IndexId> left{s0.id};
    REQUIRE(numerical_rank(t, left) == 1);
}

TEST_CASE("numerical_rank: Bell-like state has rank 2") {
    const Index s0 = physical_index(0, 2), s1 = physical_index(1, 2);
    const double r = 1.0 / std::sqrt(2.0);
    const Tensor t = make({s0, s1}, {r, 0, 0, r});
    const std::vector<IndexId> left{s0.id};
    REQUIRE(numerical_rank(t, left) == 2);
}

TEST_CASE("numerical_rank: invalid bipartitions throw") {
    const Tensor t = random_tensor({physical_index(0, 2), physical_index(1, 2)}, 3);
    const std::vector<IndexId> empty;
    REQUIRE_THROWS_AS(numerical_rank(t, empty), InvalidBipartition);
    const std::vector<IndexId> full{0, 1};
    REQUIRE_THROWS_AS(numerical_rank(t, full), InvalidBipartition);
}

TEST_CASE("numerical_rank: hidden MPS chi_t=2 mid-cut, against the SVD oracle") {
    GeometrySpec spec;
    spec.family = Family::MPS;
    spec.n = 6;
    spec.chi = 2;
    const TargetState target = generate_hidden_tn(spec, 31);
    const std::vector<IndexId> left{0, 1, 2};
    const std::size_t rank = numerical_rank(target.state, left);
    REQUIRE(rank <= 2);

    // oracle: full SVD of the 8x8 matricization (site order is already 0..5)
    const auto sv = oracles::svd_singular_values(target.state.data(), 8, 8);
    REQUIRE(rank == oracles::rank_from_singular_values(sv, 1e-10));
}

TEST_CASE("property: contraction is symmetric up to index order") {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const Index i = virtual_index(0, 2), k = virtual_index(1, 3), j = virtual_index(2, 2);
        const Tensor a = random_tensor({i, k}, 100 + trial);
        const Tensor b = random_tensor({k, j}, 200 + trial);
        const Tensor ab = contract(a, b);
        Tensor ba = contract(b, a);
        std::vector<IndexId> order;
        for (const Index& ix : ab.indices()) order.push_back(ix.id);
        ba = permute(ba, order);
        for (std::size_t e = 0; e < ab.size(); ++e)
            REQUIRE(ab[e] == Catch::Approx(ba[e]).margin(1e-14));
    }
}

TEST_CASE("property: contraction of chains is associative") {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const Index i = virtual_index(0, 2), k = virtual_index(1, 3), l = virtual_index(2, 4),
                    j = virtual_index(3, 2);
        const Tensor a = random_tensor({i, k}, 300 + trial);
        const Tensor b = random_tensor({k, l}, 400 + trial);
        const Tensor c = random_tensor({l, j}, 500 + trial);
        const Tensor left = contract(contract(a, b), c);
        const Tensor right = contract(a, contract(b, c));
        for (std::size_t e = 0; e < left.size(); ++e) {
            const double scale = std::max(std::abs(left[e]), 1.0);
            REQUIRE(std::abs(left[e] - right[e]) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("property: contraction is bilinear") {
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const Index i = virtual_index(0, 3), k = virtual_index(1, 2);
        Tensor a = random_tensor({i, k}, 600 + trial);
        const Tensor b = random_tensor({k}, 700 + trial);
        const double alpha = 0.5 + static_cast<double>(trial);
        const Tensor ab = contract(a, b);
        a.scale(alpha);
        const Tensor scaled = contract(a, b);
        for (std::size_t e = 0; e < ab.size(); ++e)
            REQUIRE(scaled[e] == Catch::Approx(alpha * ab[e]).margin(1e-12));
    }
}

TEST_CASE("property: numerical_rank is permutation invariant") {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        const Index s0 = physical_index(0, 2), s1 = physical_index(1, 2),
                    s2 = physical_index(2, 2), s3 = physical_index(3, 2);
        const Tensor t = random_tensor({s0, s1, s2, s3}, 800 + trial);
        const std::vector<IndexId> left{s0.id, s2.id};
        const std::size_t r1 = numerical_rank(t, left);
        const std::vector<IndexId> order{s3.id, s1.id, s2.id, s0.id};
        const Tensor tp = permute(t, order);
        REQUIRE(numerical_rank(tp, left) == r1);
    }
}
