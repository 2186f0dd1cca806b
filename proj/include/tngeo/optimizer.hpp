#ifndef TNGEO_OPTIMIZER_HPP
#define TNGEO_OPTIMIZER_HPP

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tngeo/compact.hpp"
#include "tngeo/engine.hpp"

namespace tngeo {

/// Evaluates the objective at x, fills `grad` (same length) and returns the
/// value. Must be deterministic.
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct OptimConfig {
    int memory_pairs = 10;
    int max_iters = 1000;
    double grad_tol = 1e-12;  // on the gradient infinity norm
    double loss_tol = 1e-14;  // relative loss change over loss_tol_window iters
    int loss_tol_window = 5;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search_steps = 40;

    void validate() const {
        if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
            throw ConfigError("need 0 < c1 < c2 < 1");
        if (memory_pairs < 1 || max_iters < 0 || max_line_search_steps < 1)
            throw ConfigError("invalid optimizer configuration");
    }
};

enum class StopReason : std::uint8_t { GradTol, LossTol, MaxIters, LineSearchFail };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::GradTol: return "GradTol";
        case StopReason::LossTol: return "LossTol";
        case StopReason::MaxIters: return "MaxIters";
        case StopReason::LineSearchFail: return "LineSearchFail";
    }
    return "?";
}

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    StopReason reason = StopReason::MaxIters;
    int iterations = 0;
    std::vector<double> values; // accepted values, initial point included
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

struct Probe {
    double alpha = 0.0;
    double phi = 0.0;
    double dphi = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

/// Minimizer of the cubic Hermite interpolant through two probes, projected
/// into the inner 80% of the interval; bisection when the data is unusable.
inline double interp_step(const Probe& lo, const Probe& hi) {
    const double a = lo.alpha, b = hi.alpha;
    double cand = 0.5 * (a + b);
    if (std::isfinite(lo.phi) && std::isfinite(hi.phi) && std::isfinite(lo.dphi) &&
        std::isfinite(hi.dphi) && a != b) {
        const double d1 = lo.dphi + hi.dphi - 3.0 * (lo.phi - hi.phi) / (a - b);
        const double disc = d1 * d1 - lo.dphi * hi.dphi;
        if (disc >= 0.0) {
            const double d2 = (b > a ? 1.0 : -1.0) * std::sqrt(disc);
            const double t = b - (b - a) * (hi.dphi + d2 - d1) / (hi.dphi - lo.dphi + 2.0 * d2);
            if (std::isfinite(t)) cand = t;
        }
    }
    const double left = std::min(lo.alpha, hi.alpha);
    const double right = std::max(lo.alpha, hi.alpha);
    const double margin = 0.1 * (right - left);
    return std::min(std::max(cand, left + margin), right - margin);
}

/// Strong-Wolfe line search (bracketing plus zoom). Returns true and fills
/// `out` with the accepted probe; false when no acceptable step was found
/// within the evaluation budget. If the interval collapses while holding a
/// point with sufficient decrease, that point is accepted so progress is
/// never thrown away.
inline bool line_search(const Objective& obj, const std::vector<double>& x0, double f0,
                        const std::vector<double>& g0, const std::vector<double>& dir,
                        double alpha_init, const OptimConfig& cfg, Probe& out) {
    const double dphi0 = dot(g0, dir);
    if (!(dphi0 < 0.0)) return false;

    int evals_left = cfg.max_line_search_steps;
    auto eval = [&](double alpha, Probe& p) {
        p.alpha = alpha;
        p.x.resize(x0.size());
        for (std::size_t i = 0; i < x0.size(); ++i) p.x[i] = x0[i] + alpha * dir[i];
        p.g.assign(x0.size(), 0.0);
        p.phi = obj(p.x, p.g);
        p.dphi = dot(p.g, dir);
        --evals_left;
    };
    auto sufficient = [&](const Probe& p) {
        return std::isfinite(p.phi) && p.phi <= f0 + cfg.wolfe_c1 * p.alpha * dphi0;
    };
    auto curvature = [&](const Probe& p) { return std::abs(p.dphi) <= -cfg.wolfe_c2 * dphi0; };

    Probe lo;
    lo.alpha = 0.0;
    lo.phi = f0;
    lo.dphi = dphi0;
    lo.x = x0;
    lo.g = g0;

    bool bracketed = false;
    Probe hi;
    Probe cur;
    double alpha = alpha_init;
    const double alpha_max = 1e8;
    Probe prev = lo;

    while (evals_left > 0 && !bracketed) {
        eval(alpha, cur);
        if (!std::isfinite(cur.phi) || cur.phi > f0 + cfg.wolfe_c1 * alpha * dphi0 ||
            (prev.alpha > 0.0 && cur.phi >= prev.phi)) {
            lo = prev;
            hi = cur;
            bracketed = true;
            break;
        }
        if (curvature(cur)) {
            out = std::move(cur);
            return true;
        }
        if (cur.dphi >= 0.0) {
            hi = prev;
            lo = cur;
            bracketed = true;
            break;
        }
        prev = cur;
        if (alpha >= alpha_max) break;
        alpha = std::min(2.0 * alpha, alpha_max);
    }
    if (!bracketed && prev.alpha > 0.0) lo = prev;

    if (bracketed) {
        while (evals_left > 0) {
            const double span = std::abs(hi.alpha - lo.alpha);
            if (span * norm_inf(dir) <= 1e-16 * (1.0 + norm_inf(lo.x))) break;
            eval(interp_step(lo, hi), cur);
            if (!sufficient(cur) || cur.phi >= lo.phi) {
                hi = cur;
                continue;
            }
            if (curvature(cur)) {
                out = std::move(cur);
                return true;
            }
            if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
            lo = std::move(cur);
        }
    }
    // budget exhausted or interval collapsed: salvage a sufficient-decrease
    // point if the search produced one
    if (lo.alpha > 0.0 && sufficient(lo)) {
        out = std::move(lo);
        return true;
    }
    return false;
}

} // namespace detail

/// Limited-memory BFGS with two-loop recursion and a strong-Wolfe line
/// search. Accepted values are monotone non-increasing; stops on whichever
/// of the config criteria fires first. `on_accept` (when given) sees the
/// initial point as iteration 0 and every accepted iterate after that.
inline MinimizeResult minimize(
    const Objective& obj, std::vector<double> x0, const OptimConfig& cfg,
    const std::function<void(int, const std::vector<double>&, double)>& on_accept = {}) {
    cfg.validate();
    const std::size_t dim = x0.size();

    MinimizeResult res;
    std::vector<double> g(dim, 0.0);
    double f = obj(x0, g);
    res.values.push_back(f);
    if (on_accept) on_accept(0, x0, f);
    res.x = std::move(x0);
    res.value = f;
    if (!std::isfinite(f)) {
        res.reason = StopReason::LineSearchFail;
        return res;
    }
    if (detail::norm_inf(g) <= cfg.grad_tol) {
        res.reason = StopReason::GradTol;
        return res;
    }

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> dir(dim), q(dim), alpha_coef;

    res.reason = StopReason::MaxIters;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        // two-loop recursion for d = -H g
        q = g;
        const std::size_t pairs = s_hist.size();
        alpha_coef.assign(pairs, 0.0);
        for (std::size_t i = pairs; i-- > 0;) {
            alpha_coef[i] = rho_hist[i] * detail::dot(s_hist[i], q);
            for (std::size_t j = 0; j < dim; ++j) q[j] -= alpha_coef[i] * y_hist[i][j];
        }
        if (pairs > 0) {
            const double gamma = detail::dot(s_hist.back(), y_hist.back()) /
                                 detail::dot(y_hist.back(), y_hist.back());
            for (double& v : q) v *= gamma;
        }
        for (std::size_t i = 0; i < pairs; ++i) {
            const double beta = rho_hist[i] * detail::dot(y_hist[i], q);
            for (std::size_t j = 0; j < dim; ++j) q[j] += (alpha_coef[i] - beta) * s_hist[i][j];
        }
        for (std::size_t j = 0; j < dim; ++j) dir[j] = -q[j];

        bool steepest = pairs == 0;
        if (!steepest && detail::dot(dir, g) >= 0.0) {
            // not a descent direction: drop the memory and restart
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t j = 0; j < dim; ++j) dir[j] = -g[j];
            steepest = true;
        }

        const double gnorm = detail::norm2(g);
        double alpha_init = steepest ? (gnorm > 1.0 ? 1.0 / gnorm : 1.0) : 1.0;

        detail::Probe accepted;
        bool ok = detail::line_search(obj, res.x, f, g, dir, alpha_init, cfg, accepted);
        if (!ok && !steepest) {
            // one steepest-descent retry before giving up
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t j = 0; j < dim; ++j) dir[j] = -g[j];
            alpha_init = gnorm > 1.0 ? 1.0 / gnorm : 1.0;
            ok = detail::line_search(obj, res.x, f, g, dir, alpha_init, cfg, accepted);
        }
        if (!ok) {
            res.reason = StopReason::LineSearchFail;
            break;
        }

        std::vector<double> s(dim), y(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            s[j] = accepted.x[j] - res.x[j];
            y[j] = accepted.g[j] - g[j];
        }
        const double sy = detail::dot(s, y);
        if (sy > 1e-14 * detail::norm2(s) * detail::norm2(y)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > cfg.memory_pairs) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        res.x = std::move(accepted.x);
        g = std::move(accepted.g);
        f = accepted.phi;
        res.value = f;
        res.iterations = iter;
        res.values.push_back(f);
        if (on_accept) on_accept(iter, res.x, f);

        if (detail::norm_inf(g) <= cfg.grad_tol) {
            res.reason = StopReason::GradTol;
            break;
        }
        const std::size_t k = res.values.size() - 1;
        if (static_cast<int>(k) >= cfg.loss_tol_window) {
            const double before = res.values[k - cfg.loss_tol_window];
            if (std::abs(before - f) <= cfg.loss_tol * std::max(1.0, std::abs(f))) {
                res.reason = StopReason::LossTol;
                break;
            }
        }
    }
    return res;
}

// --- single-trial orchestration -------------------------------------------

struct TrialMetrics {
    int diameter = 0;
    std::size_t largest_tensor = 0;
    std::size_t total_elems = 0;
    std::size_t chi = 1;
};

struct TrialResult {
    double final_infidelity = 0.0;
    int iterations_used = 0;
    double wall_ms = 0.0;
    StopReason converged = StopReason::MaxIters;
    std::vector<std::pair<double, double>> history; // (loss, infidelity) per iterate
    std::uint64_t seed = 0;
    TrialMetrics metrics;
};

namespace detail {

/// Fixed parameter layout: ascending node id, row-major inside each tensor.
struct ParamLayout {
    std::vector<std::pair<NodeId, std::size_t>> offsets;
    std::size_t total = 0;

    explicit ParamLayout(const Network& net) {
        for (const auto& [id, t] : net.nodes()) {
            offsets.push_back({id, total});
            total += t.size();
        }
    }

    std::vector<double> flatten(const Network& net) const {
        std::vector<double> x(total);
        for (const auto& [id, off] : offsets) {
            const auto& d = net.tensor(id).data();
            std::copy(d.begin(), d.end(), x.begin() + static_cast<std::ptrdiff_t>(off));
        }
        return x;
    }

    void scatter(const std::vector<double>& x, Network& net) const {
        for (const auto& [id, off] : offsets) {
            auto& d = net.tensor(id).data();
            std::copy(x.begin() + static_cast<std::ptrdiff_t>(off),
                      x.begin() + static_cast<std::ptrdiff_t>(off + d.size()), d.begin());
        }
    }

    void gather(const std::map<NodeId, Tensor>& grads, std::vector<double>& out) const {
        for (const auto& [id, off] : offsets) {
            const auto& d = grads.at(id).data();
            std::copy(d.begin(), d.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
        }
    }
};

} // namespace detail

/// Builds the network for `spec` (compactified when requested), flattens all
/// tensor entries into one parameter vector and minimizes the loss against
/// `target`. The reported infidelity is recomputed by evaluate() on the
/// final network.
inline TrialResult run_trial(const TargetState& target, const GeometrySpec& spec, bool compact,
                             std::uint64_t seed, const OptimConfig& cfg,
                             std::size_t memory_ceiling = kDefaultMemoryCeiling) {
    const auto t_start = std::chrono::steady_clock::now();

    Network net = build(spec, seed, memory_ceiling);
    if (compact) net = compactify(net, spec.chi);
    // start on the positive-overlap side; F < 0 sits in the loss clamp
    // region where the gradient vanishes, so such a start could never move
    if (evaluate(target, net, memory_ceiling).fidelity < 0.0)
        net.nodes().begin()->second.scale(-1.0);

    const detail::ParamLayout layout(net);
    TrialResult trial;
    trial.seed = seed;

    Network work = net;
    const Objective objective = [&](const std::vector<double>& x, std::vector<double>& grad) {
        layout.scatter(x, work);
        LossReport r = loss_and_grad(target, work, memory_ceiling);
        layout.gather(r.grads, grad);
        return r.loss;
    };
    const auto record = [&](int, const std::vector<double>& x, double) {
        layout.scatter(x, work);
        const LossReport r = evaluate(target, work, memory_ceiling);
        trial.history.push_back({r.loss, r.infidelity});
    };

    MinimizeResult mr = minimize(objective, layout.flatten(net), cfg, record);

    layout.scatter(mr.x, net);
    trial.final_infidelity = evaluate(target, net, memory_ceiling).infidelity;
    trial.iterations_used = mr.iterations;
    trial.converged = mr.reason;
    trial.metrics.diameter = diameter(net);
    const auto [largest, total] = sizes(net);
    trial.metrics.largest_tensor = largest;
    trial.metrics.total_elems = total;
    trial.metrics.chi = max_bond_dim(net);
    trial.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             t_start)
                        .count();
    return trial;
}

} // namespace tngeo

#endif // TNGEO_OPTIMIZER_HPP
