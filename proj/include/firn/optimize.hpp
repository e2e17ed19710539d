#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firn/objective.hpp"

namespace firn {

enum class OptMethod { steepest, ncg };
enum class BetaRule { HS, FR, PR, HZ };
enum class Constraint { none, nonneg, nonneg_decreasing };
enum class GradBackend { block, finite_difference };

struct WolfeParams {
    double c1 = 1e-4;
    double c2 = 0.9;
    int max_brackets = 25;
    int max_zoom = 40;
};

struct OptimizerConfig {
    OptMethod method = OptMethod::ncg;
    BetaRule beta_rule = BetaRule::HZ;
    Constraint constraints = Constraint::none;
    GradBackend grad_backend = GradBackend::block;
    std::optional<double> tol_grad; // default: 1e-8 for ncg, 1e-6 otherwise
    std::size_t max_iters = 2000;
    WolfeParams wolfe;
    C1Mode c1_mode = C1Mode::consistent;
    double fd_eps = 1e-6;

    double resolved_tol() const {
        if (tol_grad) return *tol_grad;
        return method == OptMethod::ncg ? 1e-8 : 1e-6;
    }
    void validate() const {
        if (!(0.0 < wolfe.c1 && wolfe.c1 < wolfe.c2 && wolfe.c2 < 1.0))
            throw std::invalid_argument("OptimizerConfig: require 0 < c1 < c2 < 1");
    }
};

struct OptimizerReport {
    std::vector<double> d_final;
    std::size_t iterations = 0;
    double wall_time_s = 0.0;
    std::vector<double> objective_history; // V at d_0 and each accepted iterate
    std::vector<double> grad_norm_history;
    std::string termination_reason;
    std::optional<double> l2_relative_error; // vs d_true when supplied
    std::size_t objective_evals = 0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace detail

struct LineSearchResult {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;
    bool satisfied = false;
    int evals = 0;
};

/// Strong-Wolfe line search (bracket then zoom). `phi(alpha)` returns the
/// pair (value, derivative) of the 1-D restriction. Requires a descent
/// direction; on bracketing exhaustion returns the best point found with
/// `satisfied = false`.
template <typename Phi>
LineSearchResult line_search_strong_wolfe(Phi&& phi, double phi0, double dphi0, double alpha0,
                                          const WolfeParams& w = {}) {
    if (!(dphi0 < 0.0))
        throw std::invalid_argument("line_search_strong_wolfe: not a descent direction");
    if (!(alpha0 > 0.0)) alpha0 = 1.0;

    LineSearchResult best{0.0, phi0, dphi0, false, 0};
    const auto probe = [&](double a) {
        auto [v, s] = phi(a);
        ++best.evals;
        if (v < best.value) best = LineSearchResult{a, v, s, false, best.evals};
        return std::pair{v, s};
    };
    const auto armijo = [&](double a, double v) { return v <= phi0 + w.c1 * a * dphi0; };
    const auto curvature = [&](double s) { return std::abs(s) <= -w.c2 * dphi0; };

    // Zoom on a bracket [lo, hi] known to contain a strong-Wolfe point.
    const auto zoom = [&](double alo, double vlo, double slo, double ahi, double vhi) {
        for (int it = 0; it < w.max_zoom; ++it) {
            // Quadratic interpolation from (alo, vlo, slo) and (ahi, vhi),
            // safeguarded toward bisection.
            double a = alo + 0.5 * (ahi - alo);
            const double denom = vhi - vlo - slo * (ahi - alo);
            if (denom != 0.0) {
                const double q = alo - 0.5 * slo * (ahi - alo) * (ahi - alo) / denom;
                const double lo = std::min(alo, ahi), hi = std::max(alo, ahi);
                const double margin = 0.1 * (hi - lo);
                if (q > lo + margin && q < hi - margin) a = q;
            }
            auto [v, s] = probe(a);
            if (!armijo(a, v) || v >= vlo) {
                ahi = a;
                vhi = v;
            } else {
                if (curvature(s)) return LineSearchResult{a, v, s, true, best.evals};
                if (s * (ahi - alo) >= 0.0) {
                    ahi = alo;
                    vhi = vlo;
                }
                alo = a;
                vlo = v;
                slo = s;
            }
            if (std::abs(ahi - alo) <= 1e-16 * std::max(1.0, std::abs(alo))) break;
        }
        return best;
    };

    double aprev = 0.0, vprev = phi0, sprev = dphi0;
    double a = alpha0;
    for (int it = 0; it < w.max_brackets; ++it) {
        auto [v, s] = probe(a);
        if (!armijo(a, v) || (it > 0 && v >= vprev)) return zoom(aprev, vprev, sprev, a, v);
        if (curvature(s)) return LineSearchResult{a, v, s, true, best.evals};
        if (s >= 0.0) return zoom(a, v, s, aprev, vprev);
        aprev = a;
        vprev = v;
        sprev = s;
        a *= 2.0;
    }
    return best;
}

namespace detail {

inline double beta_value(BetaRule rule, std::span<const double> g_new,
                         std::span<const double> g_old, std::span<const double> delta) {
    const std::size_t n = g_new.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = g_new[i] - g_old[i];
    const double tiny = 1e-300;
    switch (rule) {
    case BetaRule::HS: {
        const double dy = dot(delta, y);
        if (std::abs(dy) < tiny) return 0.0;
        return dot(g_new, y) / dy;
    }
    case BetaRule::FR: {
        const double gg = dot(g_old, g_old);
        if (gg < tiny) return 0.0;
        return dot(g_new, g_new) / gg;
    }
    case BetaRule::PR: {
        const double gg = dot(g_old, g_old);
        if (gg < tiny) return 0.0;
        return dot(g_new, y) / gg;
    }
    case BetaRule::HZ: {
        const double dy = dot(delta, y);
        if (std::abs(dy) < tiny) return 0.0;
        const double hs = dot(g_new, y) / dy;
        return hs - 2.0 * dot(y, y) / (dy * dy) * dot(g_new, delta);
    }
    }
    return 0.0;
}

/// Objective adaptor: value and gradient with the configured backend,
/// counting evaluations.
struct ObjectiveDriver {
    const InverseData& data;
    const OptimizerConfig& cfg;
    std::size_t* evals;

    double value(std::span<const double> d) const {
        ++*evals;
        return evaluate(d, data, false, cfg.c1_mode).value;
    }
    std::pair<double, std::vector<double>> value_and_gradient(std::span<const double> d) const {
        ++*evals;
        if (cfg.grad_backend == GradBackend::finite_difference) {
            const double v = evaluate(d, data, false, cfg.c1_mode).value;
            return {v, fd_gradient(d, data, cfg.fd_eps, cfg.c1_mode)};
        }
        ObjectiveEval ev = evaluate(d, data, true, cfg.c1_mode);
        return {ev.value, std::move(ev.gradient)};
    }
};

inline void finish_report(OptimizerReport& rep, std::span<const double> d_true,
                          std::chrono::steady_clock::time_point t0) {
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!d_true.empty()) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < d_true.size(); ++i) {
            const double e = rep.d_final[i] - d_true[i];
            num += e * e;
            den += d_true[i] * d_true[i];
        }
        rep.l2_relative_error = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    }
}

} // namespace detail

/// Exact Euclidean projection onto nonincreasing sequences
/// (pool-adjacent-violators with unit weights).
inline std::vector<double> project_nonincreasing(std::span<const double> x) {
    // PAVA on the reversed-order nondecreasing problem, stack of blocks.
    const std::size_t n = x.size();
    std::vector<double> mean;
    std::vector<std::size_t> count;
    mean.reserve(n);
    count.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        mean.push_back(x[i]);
        count.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] < mean.back()) {
            const double total = mean[mean.size() - 2] * static_cast<double>(count[count.size() - 2]) +
                                 mean.back() * static_cast<double>(count.back());
            count[count.size() - 2] += count.back();
            mean[mean.size() - 2] = total / static_cast<double>(count[count.size() - 2]);
            mean.pop_back();
            count.pop_back();
        }
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < mean.size(); ++b)
        out.insert(out.end(), count[b], mean[b]);
    return out;
}

inline std::vector<double> project_nonneg(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

/// Projection onto the constraint set: clamping for d >= 0, PAVA followed
/// by clamping for the nonincreasing nonnegative cone (clamping a
/// nonincreasing sequence at 0 keeps it nonincreasing, and the composite
/// is the exact Euclidean projection).
inline std::vector<double> project(Constraint c, std::span<const double> x) {
    switch (c) {
    case Constraint::none: return {x.begin(), x.end()};
    case Constraint::nonneg: return project_nonneg(x);
    case Constraint::nonneg_decreasing: {
        auto y = project_nonincreasing(x);
        for (double& v : y) v = std::max(v, 0.0);
        return y;
    }
    }
    return {x.begin(), x.end()};
}

/// Unconstrained minimization of V(d): steepest descent or nonlinear CG
/// (HS/FR/PR/HZ) with a strong-Wolfe line search. Restarts to steepest
/// descent whenever the update is not a descent direction and every 5n
/// iterations.
inline OptimizerReport ncg_minimize(const InverseData& data, const OptimizerConfig& config,
                                    std::span<const double> d0,
                                    std::span<const double> d_true = {}) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    OptimizerReport rep;
    detail::ObjectiveDriver obj{data, config, &rep.objective_evals};
    const double tol = config.resolved_tol();
    const std::size_t n = data.mesh.n();

    std::vector<double> d(d0.begin(), d0.end());
    auto [V, g] = obj.value_and_gradient(d);
    const double g0norm = detail::norm2(g);
    rep.objective_history.push_back(V);
    rep.grad_norm_history.push_back(g0norm);

    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = -g[i];
    double V_prev = V;
    rep.termination_reason = "max iterations";

    for (std::size_t k = 0; k < config.max_iters; ++k) {
        if (detail::norm2(g) <= tol * std::max(1.0, g0norm)) {
            rep.termination_reason = "gradient tolerance";
            break;
        }
        if (k % (5 * n) == 0 && k > 0)
            for (std::size_t i = 0; i < n; ++i) delta[i] = -g[i];
        double dphi0 = detail::dot(g, delta);
        if (dphi0 >= 0.0) {
            for (std::size_t i = 0; i < n; ++i) delta[i] = -g[i];
            dphi0 = detail::dot(g, delta);
            if (dphi0 >= 0.0) {
                rep.termination_reason = "zero gradient";
                break;
            }
        }

        double alpha0 = 1.0;
        if (k > 0) {
            const double guess = 2.0 * (V - V_prev) / dphi0;
            if (std::isfinite(guess) && guess > 1e-12 && guess < 1e12) alpha0 = guess;
        }

        // Cache of the last probed point so the accepted iterate reuses its
        // gradient instead of re-evaluating.
        std::vector<double> trial(n), g_trial;
        double cached_alpha = -1.0;
        const auto phi = [&](double a) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = d[i] + a * delta[i];
            auto [v, gt] = obj.value_and_gradient(trial);
            g_trial = std::move(gt);
            cached_alpha = a;
            return std::pair{v, detail::dot(g_trial, delta)};
        };
        const auto ls = line_search_strong_wolfe(phi, V, dphi0, alpha0, config.wolfe);
        if (ls.alpha <= 0.0 || ls.value >= V) {
            rep.termination_reason = "line search failure";
            break;
        }
        if (cached_alpha != ls.alpha) phi(ls.alpha);

        V_prev = V;
        V = ls.value;
        std::vector<double> g_new = std::move(g_trial);
        for (std::size_t i = 0; i < n; ++i) d[i] = d[i] + ls.alpha * delta[i];

        const double beta = config.method == OptMethod::steepest
                                ? 0.0
                                : detail::beta_value(config.beta_rule, g_new, g, delta);
        for (std::size_t i = 0; i < n; ++i) delta[i] = -g_new[i] + beta * delta[i];
        g = std::move(g_new);
        ++rep.iterations;
        rep.objective_history.push_back(V);
        rep.grad_norm_history.push_back(detail::norm2(g));
    }

    rep.d_final = std::move(d);
    detail::finish_report(rep, d_true, t0);
    return rep;
}

/// Projected gradient / projected NCG for d >= 0 or nonincreasing d >= 0:
/// d_{k+1} = P(d_k + alpha_k delta_k) with a monotone Armijo search along
/// the projection arc. Gradient steps start from the Barzilai-Borwein
/// spectral length, which is what lets the iteration track the curved
/// faces of the monotone cone instead of stalling on them. Terminates when
/// ||d - P(d - g)|| meets the tolerance.
inline OptimizerReport projected_minimize(const InverseData& data,
                                          const OptimizerConfig& config,
                                          std::span<const double> d0,
                                          std::span<const double> d_true = {}) {
    config.validate();
    if (config.constraints == Constraint::none)
        return ncg_minimize(data, config, d0, d_true);
    const auto t0 = std::chrono::steady_clock::now();
    OptimizerReport rep;
    detail::ObjectiveDriver obj{data, config, &rep.objective_evals};
    const double tol = config.resolved_tol();
    const std::size_t n = data.mesh.n();

    std::vector<double> d = project(config.constraints, d0);
    auto [V, g] = obj.value_and_gradient(d);
    rep.objective_history.push_back(V);
    rep.grad_norm_history.push_back(detail::norm2(g));

    const auto projected_gradient_norm = [&](std::span<const double> dd,
                                             std::span<const double> gg) {
        std::vector<double> step(n);
        for (std::size_t i = 0; i < n; ++i) step[i] = dd[i] - gg[i];
        const auto proj = project(config.constraints, step);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = dd[i] - proj[i];
            s += e * e;
        }
        return std::sqrt(s);
    };
    double alpha_bb = 1.0;
    {
        double gmax = 0.0;
        for (double x : g) gmax = std::max(gmax, std::abs(x));
        if (gmax > 0.0) alpha_bb = 1.0 / gmax;
    }

    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = -g[i];
    double V_prev = V;
    rep.termination_reason = "max iterations";

    // One Armijo arc search; returns the accepted point or an empty vector.
    const auto arc_search = [&](std::span<const double> dir, double alpha,
                                double* V_out) -> std::vector<double> {
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> step(n);
            for (std::size_t i = 0; i < n; ++i) step[i] = d[i] + alpha * dir[i];
            auto cand = project(config.constraints, step);
            double decr = 0.0;
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i) {
                decr += g[i] * (cand[i] - d[i]);
                moved = moved || cand[i] != d[i];
            }
            if (moved && decr < 0.0) {
                const double V_new = obj.value(cand);
                if (V_new <= V + config.wolfe.c1 * decr) {
                    *V_out = V_new;
                    return cand;
                }
            }
            alpha *= 0.5;
        }
        return {};
    };

    for (std::size_t k = 0; k < config.max_iters; ++k) {
        // near-KKT plateaus on the cone faces make a relative test fire
        // far from the minimizer, so the tolerance is absolute here
        if (projected_gradient_norm(d, g) <= tol) {
            rep.termination_reason = "projected gradient tolerance";
            break;
        }
        bool along_gradient =
            config.method == OptMethod::steepest || (k > 0 && k % (5 * n) == 0) || k == 0;
        if (!along_gradient && detail::dot(g, delta) >= 0.0) along_gradient = true;
        if (along_gradient)
            for (std::size_t i = 0; i < n; ++i) delta[i] = -g[i];

        double alpha = std::clamp(alpha_bb, 1e-12, 1e8);
        if (!along_gradient) {
            const double dphi0 = detail::dot(g, delta);
            const double guess = 2.0 * (V - V_prev) / dphi0;
            if (std::isfinite(guess) && guess > 1e-12 && guess < 1e12) alpha = guess;
        }

        double V_new = V;
        std::vector<double> d_new = arc_search(delta, alpha, &V_new);
        if (d_new.empty() && !along_gradient) {
            for (std::size_t i = 0; i < n; ++i) delta[i] = -g[i];
            d_new = arc_search(delta, std::clamp(alpha_bb, 1e-12, 1e8), &V_new);
        }
        if (d_new.empty()) {
            rep.termination_reason = "line search failure";
            break;
        }

        auto [V_check, g_new] = obj.value_and_gradient(d_new);
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = d_new[i] - d[i];
            const double y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        alpha_bb = sy > 1e-300 * ss ? ss / sy : 1e6;

        V_prev = V;
        V = V_new;
        d = std::move(d_new);
        const double beta = config.method == OptMethod::steepest
                                ? 0.0
                                : detail::beta_value(config.beta_rule, g_new, g, delta);
        for (std::size_t i = 0; i < n; ++i) delta[i] = -g_new[i] + beta * delta[i];
        g = std::move(g_new);
        ++rep.iterations;
        rep.objective_history.push_back(V);
        rep.grad_norm_history.push_back(detail::norm2(g));
    }

    rep.d_final = std::move(d);
    detail::finish_report(rep, d_true, t0);
    return rep;
}

enum class PostprocessMode { none, clamp_nonneg, polyfit };

/// Optional smoothing of a recovered profile: clamp negatives to zero, or
/// replace by the least-squares polynomial of the given degree evaluated
/// at the nodes.
inline std::vector<double> postprocess_profile(std::span<const double> d, const Mesh& mesh,
                                               PostprocessMode mode, int degree = 3) {
    if (d.size() != mesh.n())
        throw std::invalid_argument("postprocess_profile: profile/mesh mismatch");
    switch (mode) {
    case PostprocessMode::none: return {d.begin(), d.end()};
    case PostprocessMode::clamp_nonneg: return project_nonneg(d);
    case PostprocessMode::polyfit: break;
    }
    const std::size_t n = d.size();
    const std::size_t cols = static_cast<std::size_t>(degree) + 1;
    if (degree < 0 || cols >= n)
        throw std::invalid_argument("postprocess_profile: polynomial degree must satisfy k < n-1");

    // Least squares via Householder QR of the Vandermonde matrix in the
    // shifted variable x = 2z - 1.
    std::vector<double> Vmat(n * cols);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * mesh.z(i) - 1.0;
        double p = 1.0;
        for (std::size_t j = 0; j < cols; ++j) {
            Vmat[i * cols + j] = p;
            p *= x;
        }
    }
    std::vector<double> rhs(d.begin(), d.end());
    for (std::size_t j = 0; j < cols; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += Vmat[i * cols + j] * Vmat[i * cols + j];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("postprocess_profile: rank-deficient fit");
        double head = Vmat[j * cols + j];
        const double sign = head >= 0.0 ? 1.0 : -1.0;
        std::vector<double> v(n - j);
        v[0] = head + sign * norm;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = Vmat[i * cols + j];
        double vv = 0.0;
        for (double x : v) vv += x * x;
        for (std::size_t c = j; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += v[i - j] * Vmat[i * cols + c];
            const double f = 2.0 * s / vv;
            for (std::size_t i = j; i < n; ++i) Vmat[i * cols + c] -= f * v[i - j];
        }
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += v[i - j] * rhs[i];
        const double f = 2.0 * s / vv;
        for (std::size_t i = j; i < n; ++i) rhs[i] -= f * v[i - j];
    }
    std::vector<double> coef(cols);
    for (std::size_t j = cols; j-- > 0;) {
        double s = rhs[j];
        for (std::size_t c = j + 1; c < cols; ++c) s -= Vmat[j * cols + c] * coef[c];
        coef[j] = s / Vmat[j * cols + j];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * mesh.z(i) - 1.0;
        double acc = 0.0;
        for (std::size_t j = cols; j-- > 0;) acc = acc * x + coef[j];
        out[i] = acc;
    }
    return out;
}

} // namespace firn
