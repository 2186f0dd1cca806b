#ifndef TNGEO_SURROGATE_HPP
#define TNGEO_SURROGATE_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tngeo/geometry.hpp"

namespace tngeo {

/// How a target state came to be: sampled dense, or contracted from a hidden
/// tensor network whose bond dimension bounds the state's Schmidt ranks.
struct TargetProvenance {
    enum class Scenario : std::uint8_t { FullRandom, HiddenTN };
    Scenario scenario = Scenario::FullRandom;
    std::uint64_t seed = 0;
    std::size_t chi_target = 0; // 0 = unconstrained
    std::optional<GeometrySpec> generator;
};

/// Normalized dense state over n physical sites, plus provenance.
struct TargetState {
    Tensor state;
    TargetProvenance provenance;

    std::uint32_t n() const { return static_cast<std::uint32_t>(state.rank()); }
    std::size_t p() const { return state.rank() ? state.indices()[0].dim : 1; }
};

namespace detail {

inline std::size_t checked_state_size(std::uint32_t n, std::size_t p, std::size_t ceiling) {
    std::size_t total = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (total > ceiling / p)
            throw TargetTooLarge("p^n exceeds the memory ceiling");
        total *= p;
    }
    if (total > ceiling) throw TargetTooLarge("p^n exceeds the memory ceiling");
    return total;
}

} // namespace detail

/// i.i.d. Gaussian dense tensor over p^n entries, normalized.
inline TargetState generate_full_random(std::uint32_t n, std::size_t p, std::uint64_t seed,
                                        std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    if (n < 1) throw InvalidSpec("target needs n >= 1");
    detail::checked_state_size(n, p, memory_ceiling);
    std::vector<Index> shape;
    shape.reserve(n);
    for (std::uint32_t s = 0; s < n; ++s) shape.push_back(physical_index(s, p));
    Rng rng(derive_seed({seed, 0x7A46E7ull}));
    Tensor state = random_gaussian(std::move(shape), rng);
    const double nu = state.norm();
    if (nu > 0.0) state.scale(1.0 / nu);

    TargetState t;
    t.state = std::move(state);
    t.provenance = {TargetProvenance::Scenario::FullRandom, seed, 0, std::nullopt};
    return t;
}

/// Random network of the given structure contracted into a single dense
/// tensor, normalized. The statevector form hides the generating geometry;
/// only the provenance records it.
inline TargetState generate_hidden_tn(const GeometrySpec& spec, std::uint64_t seed,
                                      std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    spec.validate();
    detail::checked_state_size(spec.n, spec.p, memory_ceiling);
    const Network net = build(spec, seed, memory_ceiling);
    Tensor state = to_dense(net, memory_ceiling);
    const double nu = state.norm();
    if (nu > 0.0) state.scale(1.0 / nu);

    TargetState t;
    t.state = std::move(state);
    t.provenance = {TargetProvenance::Scenario::HiddenTN, seed, spec.chi, spec};
    return t;
}

// --- flat binary target files -------------------------------------------
//
// 16-byte header: magic "TNGT", version u16, n u16, p u16, 6 pad bytes,
// then p^n little-endian f64 values in row-major site order. A JSON
// provenance sidecar sits next to the binary as <path>.json.

inline constexpr std::uint16_t kTargetFileVersion = 1;

namespace detail {

inline void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace detail

inline void write_target(const std::filesystem::path& path, const TargetState& target) {
    std::string header;
    header += "TNGT";
    detail::put_u16(header, kTargetFileVersion);
    detail::put_u16(header, static_cast<std::uint16_t>(target.n()));
    detail::put_u16(header, static_cast<std::uint16_t>(target.p()));
    header.append(6, '\0');

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (double v : target.state.data()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        char le[8];
        for (int i = 0; i < 8; ++i) le[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
        out.write(le, 8);
    }
    if (!out) throw IoError("short write to " + path.string());

    nlohmann::json prov;
    prov["scenario"] = target.provenance.scenario == TargetProvenance::Scenario::FullRandom
                           ? "full_random"
                           : "hidden_tn";
    prov["seed"] = target.provenance.seed;
    prov["n"] = target.n();
    prov["p"] = target.p();
    if (target.provenance.chi_target != 0) prov["chi_target"] = target.provenance.chi_target;
    if (target.provenance.generator) {
        const GeometrySpec g = target.provenance.generator->resolved();
        nlohmann::json jg;
        jg["family"] = family_tag(g.family);
        jg["n"] = g.n;
        jg["chi"] = g.chi;
        jg["p"] = g.p;
        if (g.family == Family::Star) jg["k"] = g.star_k;
        if (g.family == Family::PEPS) {
            jg["rows"] = g.peps_rows;
            jg["cols"] = g.peps_cols;
        }
        prov["generator"] = jg;
    }
    std::ofstream side(path.string() + ".json");
    if (!side) throw IoError("cannot write provenance sidecar for " + path.string());
    side << prov.dump(2) << "\n";
}

inline TargetState read_target(const std::filesystem::path& path,
                               std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), 16);
    if (!in || std::memcmp(header, "TNGT", 4) != 0)
        throw IoError(path.string() + " is not a target file (bad magic)");
    const std::uint16_t version = detail::get_u16(header + 4);
    if (version != kTargetFileVersion)
        throw IoError("unsupported target file version " + std::to_string(version));
    const std::uint32_t n = detail::get_u16(header + 6);
    const std::size_t p = detail::get_u16(header + 8);
    if (n < 1 || p < 1) throw IoError("corrupt target header");
    const std::size_t total = detail::checked_state_size(n, p, memory_ceiling);

    std::vector<Index> shape;
    for (std::uint32_t s = 0; s < n; ++s) shape.push_back(physical_index(s, p));
    Tensor state(shape);
    for (std::size_t i = 0; i < total; ++i) {
        unsigned char le[8];
        in.read(reinterpret_cast<char*>(le), 8);
        if (!in) throw IoError("target file truncated: " + path.string());
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(le[b]) << (8 * b);
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        state[i] = v;
    }

    TargetState t;
    t.state = std::move(state);
    t.provenance.scenario = TargetProvenance::Scenario::FullRandom;

    const std::filesystem::path side = path.string() + ".json";
    if (std::filesystem::exists(side)) {
        std::ifstream sin(side);
        nlohmann::json prov = nlohmann::json::parse(sin, nullptr, true, true);
        if (prov.value("scenario", "full_random") == std::string("hidden_tn"))
            t.provenance.scenario = TargetProvenance::Scenario::HiddenTN;
        t.provenance.seed = prov.value("seed", std::uint64_t{0});
        t.provenance.chi_target = prov.value("chi_target", std::size_t{0});
    }
    return t;
}

} // namespace tngeo

#endif // TNGEO_SURROGATE_HPP
