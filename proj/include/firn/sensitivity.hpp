#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firn/assembly.hpp"
#include "firn/banded.hpp"
#include "firn/forward.hpp"
#include "firn/matrix.hpp"

namespace firn {

/// Time quadrature of the inhomogeneous sensitivity forcing.
/// `right_rectangle` uses the end-of-step state, which makes the discrete
/// sensitivity the exact derivative of the discrete forward map (the
/// gradient then matches finite differences to roundoff). `trapezoid`
/// averages the two step states as in the written block algorithm; it is a
/// consistent O(dt) variant of the same forcing.
enum class UQuad { right_rectangle, trapezoid };

/// End-time directional derivatives of rho_alpha with respect to every
/// nodal perturbation direction: entry (i,j) = v_{alpha,e_j}(z_{i+2}, 1)
/// for i = 0..n-2, j = 0..n-1. The boundary row v_alpha(0,t) = 0 is implicit.
struct SensitivityBlock {
    Matrix V_end; // (n-1) x n
};

namespace detail {

inline void require_trace_match(const ForwardTrace& trace, const Mesh& mesh,
                                const TimeGrid& grid, const char* what) {
    if (trace.mesh.n() != mesh.n() || trace.grid.m() != grid.m() ||
        trace.grid.dt != grid.dt)
        throw std::invalid_argument(std::string(what) +
                                    ": forward trace does not match mesh/grid");
    if (trace.lambda.rows() != mesh.n() || trace.lambda.cols() != grid.m())
        throw std::invalid_argument(std::string(what) + ": trace is not a full n x m history");
}

/// W = M V for tridiagonal M and row-major V, one fused pass per row.
inline void tridiag_matmul(const TridiagonalMatrix& M, const Matrix& V, Matrix& W) {
    const std::size_t N = M.dim();
    const std::size_t k = V.cols();
    for (std::size_t i = 0; i < N; ++i) {
        const double* vi = V.row(i).data();
        double* wi = W.row(i).data();
        const double di = M.diag[i];
        for (std::size_t c = 0; c < k; ++c) wi[c] = di * vi[c];
        if (i > 0) {
            const double* vm = V.row(i - 1).data();
            const double s = M.sub[i - 1];
            for (std::size_t c = 0; c < k; ++c) wi[c] += s * vm[c];
        }
        if (i + 1 < N) {
            const double* vp = V.row(i + 1).data();
            const double s = M.super[i];
            for (std::size_t c = 0; c < k; ++c) wi[c] += s * vp[c];
        }
    }
}

// Step-state combination v and boundary factor for the chosen quadrature:
// trapezoid:       v = Lambda(t) + Lambda(t+dt),  p = c2 (rho(t) + rho(t+dt))
// right rectangle: v = 2 Lambda(t+dt),            p = 2 c2 rho(t+dt)
inline void forcing_state(const ForwardTrace& trace, std::size_t i, UQuad quad,
                          std::span<double> v) {
    const std::size_t N = v.size();
    if (quad == UQuad::trapezoid) {
        for (std::size_t r = 0; r < N; ++r)
            v[r] = trace.lambda(r + 1, i + 1) + trace.lambda(r + 1, i);
    } else {
        for (std::size_t r = 0; r < N; ++r) v[r] = 2.0 * trace.lambda(r + 1, i + 1);
    }
}

inline double forcing_rho(const FirnParams& params, const TimeGrid& grid, std::size_t i,
                          UQuad quad) {
    if (quad == UQuad::trapezoid)
        return params.rho_atm(grid.t(i)) + params.rho_atm(grid.t(i + 1));
    return 2.0 * params.rho_atm(grid.t(i + 1));
}

} // namespace detail

/// Block directional-derivative problem: marches the (n-1) x n matrix of
/// sensitivities through time with the same factorized system as the
/// direct problem, all n canonical directions at once.
inline SensitivityBlock block_sensitivity_solve(const Mesh& mesh, const TimeGrid& grid,
                                                const FirnParams& params, double r_alpha,
                                                std::span<const double> D_alpha,
                                                const ForwardTrace& trace,
                                                UQuad quad = UQuad::right_rectangle,
                                                C1Mode c1_mode = C1Mode::consistent) {
    detail::require_trace_match(trace, mesh, grid, "block_sensitivity_solve");
    detail::require_profile(mesh, D_alpha, "block_sensitivity_solve");
    if (mesh.kind != MeshKind::uniform)
        throw std::invalid_argument(
            "block_sensitivity_solve: structured right-hand sides assume a uniform mesh");
    const std::size_t n = mesh.n();
    const std::size_t N = n - 1;
    const double h = mesh.uniform_h();
    const double Te_dt = params.Te * grid.dt;
    const double c2 = boundary_constant_c2(mesh, params, r_alpha, c1_mode);

    const TridiagonalMatrix M = assemble_mass(mesh);
    TridiagonalMatrix system = assemble_C(mesh, params, D_alpha);
    system.scale(Te_dt);
    system.axpy(1.0, M);
    const BandedSystem lu = factorize(std::move(system));

    Matrix V(N, n), W(N, n), J(N, n);
    std::vector<double> v(N);
    for (std::size_t i = 0; i + 1 < grid.m(); ++i) {
        detail::forcing_state(trace, i, quad, v);
        detail::tridiag_matmul(M, V, W);
        detail::fill_J_block(J, v, params, r_alpha, h); // sparsity fixed, overwrite is safe
        const double p = c2 * detail::forcing_rho(params, grid, i, quad);
        for (std::size_t r = 0; r + 1 < N; ++r) {
            W(r, r) -= Te_dt * J(r, r);
            W(r, r + 1) -= Te_dt * J(r, r + 1);
            W(r, r + 2) -= Te_dt * J(r, r + 2);
        }
        W(N - 1, N - 1) -= Te_dt * J(N - 1, N - 1);
        W(N - 1, N) -= Te_dt * J(N - 1, N);
        W(0, 0) -= Te_dt * p;
        W(0, 1) -= Te_dt * p;
        lu.solve_block_in_place(W);
        std::swap(V, W);
    }
    for (double x : V.data())
        if (!std::isfinite(x))
            throw SolverError("block_sensitivity_solve: non-finite sensitivity at end time");
    return SensitivityBlock{std::move(V)};
}

/// Sensitivity along one arbitrary direction beta (length n). Oracle for
/// the block path and the entry point for non-canonical directions.
/// Returns v_{alpha,beta}(z_2..z_n, 1), length n-1.
inline std::vector<double> single_direction_solve(const Mesh& mesh, const TimeGrid& grid,
                                                  const FirnParams& params, double r_alpha,
                                                  std::span<const double> D_alpha,
                                                  std::span<const double> beta,
                                                  const ForwardTrace& trace,
                                                  UQuad quad = UQuad::right_rectangle,
                                                  C1Mode c1_mode = C1Mode::consistent) {
    detail::require_trace_match(trace, mesh, grid, "single_direction_solve");
    detail::require_profile(mesh, D_alpha, "single_direction_solve");
    detail::require_profile(mesh, beta, "single_direction_solve(beta)");
    const std::size_t N = mesh.n() - 1;
    const double Te_dt = params.Te * grid.dt;

    std::vector<double> D_beta(beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i) D_beta[i] = r_alpha * beta[i];
    TridiagonalMatrix Jb = assemble_S(mesh, D_beta);
    Jb.scale(1.0 / (2.0 * params.zF * params.zF * params.f));
    TridiagonalMatrix Ab = assemble_A(mesh, D_beta);
    Jb.axpy(-params.Malpha / (2.0 * params.zF * params.f), Ab);
    const double c2b =
        (beta[0] + beta[1]) * boundary_constant_c2(mesh, params, r_alpha, c1_mode);

    const TridiagonalMatrix M = assemble_mass(mesh);
    TridiagonalMatrix system = assemble_C(mesh, params, D_alpha);
    system.scale(Te_dt);
    system.axpy(1.0, M);
    const BandedSystem lu = factorize(std::move(system));

    std::vector<double> vstate(N, 0.0), rhs(N), w(N), Jw(N);
    for (std::size_t i = 0; i + 1 < grid.m(); ++i) {
        detail::forcing_state(trace, i, quad, w);
        M.matvec(vstate, rhs);
        Jb.matvec(w, Jw);
        for (std::size_t r = 0; r < N; ++r) rhs[r] -= Te_dt * Jw[r];
        rhs[0] -= Te_dt * c2b * detail::forcing_rho(params, grid, i, quad);
        lu.solve_in_place(rhs);
        for (double x : rhs)
            if (!std::isfinite(x))
                throw SolverError("single_direction_solve: non-finite value at time step " +
                                  std::to_string(i + 1));
        vstate.swap(rhs);
    }
    return vstate;
}

} // namespace firn
