#ifndef TNGEO_ENGINE_HPP
#define TNGEO_ENGINE_HPP

#include <cmath>
#include <map>

#include "tngeo/contraction.hpp"
#include "tngeo/surrogate.hpp"

namespace tngeo {

/// Fidelity floor inside the logarithm. At desk scale a random start has
/// |F| ~ p^(-n/2), far above this; the clamp only absorbs F <= 0, where the
/// loss gradient is defined as zero.
inline constexpr double kFidelityClamp = 1e-300;

struct LossReport {
    double fidelity = 0.0;
    double infidelity = 0.0;
    double loss = 0.0;
    std::map<NodeId, Tensor> grads;
};

inline double loss_from_fidelity(double f) {
    const double clamped = f > kFidelityClamp ? f : kFidelityClamp;
    const double l = std::log(clamped) - 1.0;
    return l * l;
}

namespace detail {

inline void check_compatible(const TargetState& target, const Network& net) {
    if (target.n() != net.n_sites())
        throw DimensionMismatch("target and network disagree on the number of sites");
    for (std::size_t s = 0; s < net.n_sites(); ++s)
        if (net.phys_dim(s) != target.state.indices()[s].dim)
            throw DimensionMismatch("target and network disagree on a physical dim");
}

} // namespace detail

/// F = <target|psi>/|psi| with psi the network's dense state (the target is
/// unit norm); I = 1 - F; L = (ln max(F, clamp) - 1)^2.
inline LossReport evaluate(const TargetState& target, const Network& net,
                           std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    detail::check_compatible(target, net);
    const Tensor psi = to_dense(net, memory_ceiling);
    const double nu = psi.norm();
    if (nu == 0.0) throw DegenerateState("network represents the zero state");

    LossReport r;
    r.fidelity = inner(target.state, psi) / nu;
    r.infidelity = 1.0 - r.fidelity;
    r.loss = loss_from_fidelity(r.fidelity);
    return r;
}

/// evaluate() plus exact gradients of the loss with respect to every node
/// tensor, via environment tensors:
///   dF/dT_i = env(s, i)/nu - (F/nu^2) env(psi, i)
///   dL/dT_i = 2 (ln F - 1)/F * dF/dT_i   (zero when F is in the clamp region)
/// where s is the target state, psi the dense network state and nu = |psi|.
inline LossReport loss_and_grad(const TargetState& target, const Network& net,
                                std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    detail::check_compatible(target, net);
    const Tensor psi = to_dense(net, memory_ceiling);
    const double nu = psi.norm();
    if (nu == 0.0) throw DegenerateState("network represents the zero state");

    LossReport r;
    r.fidelity = inner(target.state, psi) / nu;
    r.infidelity = 1.0 - r.fidelity;
    r.loss = loss_from_fidelity(r.fidelity);

    const bool clamped = !(r.fidelity > kFidelityClamp);
    const double dl_df =
        clamped ? 0.0 : 2.0 * (std::log(r.fidelity) - 1.0) / r.fidelity;

    std::map<NodeId, Tensor> env_s = all_environments(target.state, net);
    std::map<NodeId, Tensor> env_psi = all_environments(psi, net);

    const double f_over_nu2 = r.fidelity / (nu * nu);
    for (const auto& [id, t] : net.nodes()) {
        Tensor g = std::move(env_s.at(id)); // same index order as the node tensor
        const Tensor& ep = env_psi.at(id);
        double* gd = g.data().data();
        const double* ed = ep.data().data();
        for (std::size_t i = 0; i < g.size(); ++i)
            gd[i] = dl_df * (gd[i] / nu - f_over_nu2 * ed[i]);
        r.grads.emplace(id, std::move(g));
    }
    return r;
}

} // namespace tngeo

#endif // TNGEO_ENGINE_HPP
