#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firn/assembly.hpp"
#include "firn/forward.hpp"
#include "firn/mesh.hpp"
#include "firn/params.hpp"
#include "firn/sensitivity.hpp"

namespace firn {

/// Where a dataset came from; carried along for the sidecar files.
struct DatasetInfo {
    std::string case_name;
    double h_g = 0.0;
    double sigma = 0.0;
    unsigned long long seed = 0;
};

/// End-time concentration data for the inverse problem: one vector g_alpha
/// per gas (length n, boundary node included), in the order of
/// params.r_alphas, plus the mesh/grid the inversion solves on.
struct InverseData {
    Mesh mesh;
    TimeGrid grid;
    FirnParams params;
    std::vector<std::vector<double>> g;
    DatasetInfo info;

    void validate() const {
        if (g.size() != params.r_alphas.size())
            throw std::invalid_argument("InverseData: one g vector per gas required");
        for (const auto& gi : g)
            if (gi.size() != mesh.n())
                throw std::invalid_argument("InverseData: g length must equal node count");
    }
};

/// Objective value, optional gradient, and per-gas residuals at end time.
struct ObjectiveEval {
    double value = 0.0;
    std::vector<double> gradient;               // length n when requested
    std::vector<std::vector<double>> residuals; // per gas, full n

    bool has_gradient() const { return !gradient.empty(); }
};

/// V(d) = sum_alpha ||Lambda_alpha(:,end) - g_alpha||^2 over all n nodes;
/// the gradient row accumulates 2 (Lambda(2:n,end) - g(2:n))^T V_alpha over
/// gases, with V_alpha the end-time block of directional derivatives.
inline ObjectiveEval evaluate(std::span<const double> d, const InverseData& data,
                              bool want_gradient, C1Mode c1_mode = C1Mode::consistent) {
    data.validate();
    detail::require_profile(data.mesh, d, "evaluate");
    const std::size_t n = data.mesh.n();
    ObjectiveEval out;
    if (want_gradient) out.gradient.assign(n, 0.0);
    std::vector<double> D(n);
    for (std::size_t gas = 0; gas < data.params.r_alphas.size(); ++gas) {
        const double r = data.params.r_alphas[gas];
        for (std::size_t i = 0; i < n; ++i) D[i] = r * d[i];
        std::vector<double> end;
        SensitivityBlock block;
        if (want_gradient) {
            const ForwardTrace trace =
                forward_solve(data.mesh, data.grid, data.params, D, c1_mode);
            block = block_sensitivity_solve(data.mesh, data.grid, data.params, r, D, trace,
                                            UQuad::right_rectangle, c1_mode);
            end = trace.end_state();
        } else {
            end = forward_end_state(data.mesh, data.grid, data.params, D, c1_mode);
        }
        std::vector<double> resid(n);
        for (std::size_t i = 0; i < n; ++i) resid[i] = end[i] - data.g[gas][i];
        for (double ri : resid) out.value += ri * ri;
        if (want_gradient) {
            for (std::size_t rrow = 0; rrow + 1 < n; ++rrow) {
                const double w = 2.0 * resid[rrow + 1];
                const double* vrow = block.V_end.row(rrow).data();
                for (std::size_t j = 0; j < n; ++j) out.gradient[j] += w * vrow[j];
            }
        }
        out.residuals.push_back(std::move(resid));
    }
    return out;
}

/// Central-difference gradient of an arbitrary scalar function of d with
/// step eps_j = eps_base * (1 + |d_j|).
template <typename F>
std::vector<double> central_difference_gradient(F&& value, std::span<const double> d,
                                                double eps_base = 1e-6) {
    std::vector<double> grad(d.size());
    std::vector<double> dd(d.begin(), d.end());
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double eps = eps_base * (1.0 + std::abs(d[j]));
        const double dj = dd[j];
        dd[j] = dj + eps;
        const double vp = value(std::span<const double>(dd));
        dd[j] = dj - eps;
        const double vm = value(std::span<const double>(dd));
        dd[j] = dj;
        grad[j] = (vp - vm) / (2.0 * eps);
    }
    return grad;
}

/// Finite-difference gradient of V: 2n forward solves. Verification oracle
/// and alternative optimizer backend.
inline std::vector<double> fd_gradient(std::span<const double> d, const InverseData& data,
                                       double eps_base = 1e-6,
                                       C1Mode c1_mode = C1Mode::consistent) {
    return central_difference_gradient(
        [&](std::span<const double> dd) { return evaluate(dd, data, false, c1_mode).value; },
        d, eps_base);
}

} // namespace firn
