#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firn/assembly.hpp"
#include "firn/banded.hpp"
#include "firn/matrix.hpp"
#include "firn/mesh.hpp"
#include "firn/params.hpp"

namespace firn {

/// Full time history of a direct solve: lambda is n x m with column i the
/// solution at t_i, boundary row included (lambda(0,i) = rho_atm(t_i)).
struct ForwardTrace {
    Matrix lambda;
    Mesh mesh;
    TimeGrid grid;
    FirnParams params;

    std::size_t n() const { return mesh.n(); }
    std::size_t m() const { return grid.m(); }

    std::vector<double> end_state() const { return lambda.col(grid.m() - 1); }
};

namespace detail {

/// One implicit Euler march of the direct problem. `sink(step, interior)`
/// receives the interior solution (length n-1) after each solve; step 0 is
/// the zero initial state.
template <typename Sink>
void forward_march(const Mesh& mesh, const TimeGrid& grid, const FirnParams& params,
                   std::span<const double> D_alpha, C1Mode c1_mode, Sink&& sink) {
    params.validate();
    require_profile(mesh, D_alpha, "forward_solve");
    const std::size_t N = mesh.n() - 1;
    const double Te_dt = params.Te * grid.dt;
    const double z2_6 = mesh.z(1) / 6.0;
    const double c1 = boundary_constant_c1(mesh, params, D_alpha, c1_mode);

    const TridiagonalMatrix M = assemble_mass(mesh);
    TridiagonalMatrix system = assemble_C(mesh, params, D_alpha);
    system.scale(Te_dt);
    system.axpy(1.0, M);
    const BandedSystem lu = factorize(std::move(system));

    std::vector<double> lam(N, 0.0), rhs(N, 0.0);
    sink(std::size_t{0}, std::span<const double>(lam));
    double rho_prev = params.rho_atm(0.0);
    for (std::size_t i = 0; i + 1 < grid.m(); ++i) {
        const double rho_next = params.rho_atm(grid.t(i + 1));
        M.matvec(lam, rhs);
        rhs[0] -= Te_dt * rho_next * c1 + (rho_next - rho_prev) * z2_6;
        lu.solve_in_place(rhs);
        for (double x : rhs)
            if (!std::isfinite(x))
                throw SolverError("forward_solve: non-finite solution at time step " +
                                  std::to_string(i + 1) + " of " + std::to_string(grid.steps));
        lam.swap(rhs);
        sink(i + 1, std::span<const double>(lam));
        rho_prev = rho_next;
    }
}

} // namespace detail

/// Direct problem: marches [M + Te*dt*C] Lambda(t+dt) = M Lambda(t) - v with
/// one banded solve per step, reusing a single factorization. Returns the
/// full n x m trace (the sensitivity solve needs every column).
inline ForwardTrace forward_solve(const Mesh& mesh, const TimeGrid& grid,
                                  const FirnParams& params, std::span<const double> D_alpha,
                                  C1Mode c1_mode = C1Mode::consistent) {
    ForwardTrace trace{Matrix(mesh.n(), grid.m()), mesh, grid, params};
    for (std::size_t i = 0; i < grid.m(); ++i)
        trace.lambda(0, i) = params.rho_atm(grid.t(i));
    detail::forward_march(mesh, grid, params, D_alpha, c1_mode,
                          [&](std::size_t step, std::span<const double> interior) {
                              for (std::size_t r = 0; r < interior.size(); ++r)
                                  trace.lambda(r + 1, step) = interior[r];
                          });
    return trace;
}

/// End-time solution only (length n, boundary value first); avoids storing
/// the full trace on fine meshes.
inline std::vector<double> forward_end_state(const Mesh& mesh, const TimeGrid& grid,
                                             const FirnParams& params,
                                             std::span<const double> D_alpha,
                                             C1Mode c1_mode = C1Mode::consistent) {
    std::vector<double> u(mesh.n(), 0.0);
    const std::size_t last = grid.m() - 1;
    detail::forward_march(mesh, grid, params, D_alpha, c1_mode,
                          [&](std::size_t step, std::span<const double> interior) {
                              if (step == last)
                                  for (std::size_t r = 0; r < interior.size(); ++r)
                                      u[r + 1] = interior[r];
                          });
    u[0] = params.rho_atm(grid.t(last));
    return u;
}

/// L-infinity and L2, absolute and relative errors of `u` against the
/// reference `ref` sampled at the same points.
struct ErrorReport {
    double linf_abs = 0.0;
    double linf_rel = 0.0;
    double l2_abs = 0.0;
    double l2_rel = 0.0;
};

inline ErrorReport error_report(std::span<const double> u, std::span<const double> ref) {
    if (u.size() != ref.size() || u.empty())
        throw std::invalid_argument("error_report: size mismatch");
    ErrorReport e;
    double ref_max = 0.0, ref_sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = std::abs(u[i] - ref[i]);
        e.linf_abs = std::max(e.linf_abs, d);
        e.l2_abs += d * d;
        ref_max = std::max(ref_max, std::abs(ref[i]));
        ref_sq += ref[i] * ref[i];
    }
    e.l2_abs = std::sqrt(e.l2_abs);
    e.linf_rel = ref_max > 0.0 ? e.linf_abs / ref_max : e.linf_abs;
    e.l2_rel = ref_sq > 0.0 ? e.l2_abs / std::sqrt(ref_sq) : e.l2_abs;
    return e;
}

/// Errors of end states at the given probe coordinates, which must be nodes
/// of both meshes. `ref` is the reference solution.
inline ErrorReport error_report_at_nodes(std::span<const double> probes, const Mesh& mesh_u,
                                         std::span<const double> u, const Mesh& mesh_ref,
                                         std::span<const double> ref) {
    std::vector<double> su, sref;
    su.reserve(probes.size());
    sref.reserve(probes.size());
    std::size_t iu = 0, ir = 0;
    for (double p : probes) {
        while (iu < mesh_u.n() && mesh_u.z(iu) < p - 1e-12) ++iu;
        while (ir < mesh_ref.n() && mesh_ref.z(ir) < p - 1e-12) ++ir;
        if (iu >= mesh_u.n() || std::abs(mesh_u.z(iu) - p) > 1e-12 || ir >= mesh_ref.n() ||
            std::abs(mesh_ref.z(ir) - p) > 1e-12)
            throw std::invalid_argument("error_report_at_nodes: probe " + std::to_string(p) +
                                        " is not a node of both meshes");
        su.push_back(u[iu]);
        sref.push_back(ref[ir]);
    }
    return error_report(su, sref);
}

/// End-time comparison of two traces at the common nodes of the coarser
/// mesh. `b` is the reference. The traces must share zF and Te.
inline ErrorReport compare_traces(const ForwardTrace& a, const ForwardTrace& b) {
    if (a.params.zF != b.params.zF || a.params.Te != b.params.Te)
        throw std::invalid_argument("compare_traces: traces have different zF or Te");
    const auto pairs = common_nodes(a.mesh, b.mesh);
    if (pairs.size() < 3)
        throw std::invalid_argument("compare_traces: meshes share no nodes beyond endpoints");
    const auto ua = a.end_state();
    const auto ub = b.end_state();
    std::vector<double> sa(pairs.size()), sb(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        sa[k] = ua[pairs[k].first];
        sb[k] = ub[pairs[k].second];
    }
    return error_report(sa, sb);
}

/// Fraction of interior nodes where consecutive differences change sign.
/// Differences below floor_rel * max|u| do not count, so roundoff wiggles
/// in a decayed tail are not mistaken for oscillation.
inline double oscillation_fraction(std::span<const double> u, double floor_rel = 1e-10) {
    if (u.size() < 3) return 0.0;
    double umax = 0.0;
    for (double x : u) umax = std::max(umax, std::abs(x));
    const double floor_abs = floor_rel * umax;
    std::size_t changes = 0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double d1 = u[i] - u[i - 1];
        const double d2 = u[i + 1] - u[i];
        if (d1 * d2 < 0.0 && std::abs(d1) > floor_abs && std::abs(d2) > floor_abs) ++changes;
    }
    return static_cast<double>(changes) / static_cast<double>(u.size() - 2);
}

/// Flags a numerically oscillating end-time solution (sign changes at more
/// than 25% of interior nodes).
inline bool is_oscillatory(std::span<const double> u) { return oscillation_fraction(u) > 0.25; }

} // namespace firn
