#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "firn/matrix.hpp"
#include "firn/mesh.hpp"
#include "firn/params.hpp"
#include "firn/tridiag.hpp"

namespace firn {

/// Nodal samples of a diffusion coefficient on a mesh, one value per node.
using DiffusionProfile = std::vector<double>;

namespace detail {

inline void require_profile(const Mesh& mesh, std::span<const double> D, const char* what) {
    if (D.size() != mesh.n())
        throw std::invalid_argument(std::string(what) + ": profile has " +
                                    std::to_string(D.size()) + " values for a mesh with " +
                                    std::to_string(mesh.n()) + " nodes");
}

inline void require_system_size(const Mesh& mesh, const char* what) {
    if (mesh.n() < 3)
        throw std::invalid_argument(std::string(what) + ": mesh needs at least 3 nodes");
}

} // namespace detail

/// Mass-matrix reading. `exact` integrates the hat products over every
/// element, giving first diagonal entry (h_1+h_2)/3; this is what the
/// benchmark tables were produced with. `display` reproduces the printed
/// stencil (h/6)*tridiag(1; 2,4,..,4,2; 1), whose first corner drops the
/// [z_1,z_2] contribution.
enum class MassMode { exact, display };

/// Mass matrix over the unknowns at z_2..z_n.
inline TridiagonalMatrix assemble_mass(const Mesh& mesh, MassMode mode = MassMode::exact) {
    detail::require_system_size(mesh, "assemble_mass");
    const std::size_t N = mesh.n() - 1;
    TridiagonalMatrix M(N);
    M.diag[0] = mode == MassMode::exact ? (mesh.h(0) + mesh.h(1)) / 3.0 : mesh.h(1) / 3.0;
    for (std::size_t r = 1; r + 1 < N; ++r)
        M.diag[r] = (mesh.h(r) + mesh.h(r + 1)) / 3.0;
    M.diag[N - 1] = mesh.h(N - 1) / 3.0;
    for (std::size_t r = 0; r + 1 < N; ++r) {
        M.super[r] = mesh.h(r + 1) / 6.0;
        M.sub[r] = M.super[r];
    }
    return M;
}

/// Advection matrices. K and Q = B - K are spacing-independent:
/// K = (F/2)*tridiag(-1; 0,..,0,1; 1), B is zero except B(n-1,n-1) = F.
inline std::tuple<TridiagonalMatrix, TridiagonalMatrix, TridiagonalMatrix>
assemble_K_Q_B(const Mesh& mesh, double F) {
    detail::require_system_size(mesh, "assemble_K_Q_B");
    const std::size_t N = mesh.n() - 1;
    TridiagonalMatrix K(N), Q(N), B(N);
    for (std::size_t r = 0; r + 1 < N; ++r) {
        K.super[r] = 0.5 * F;
        K.sub[r] = -0.5 * F;
        Q.super[r] = -0.5 * F;
        Q.sub[r] = 0.5 * F;
    }
    K.diag[N - 1] = 0.5 * F;
    Q.diag[N - 1] = 0.5 * F;
    B.diag[N - 1] = F;
    return {K, Q, B};
}

/// Gravity/drift matrix A(D), trapezoidal in D per element:
/// diag_i = (D_i - D_{i+2})/4, last diag = (D_{n-1}+D_n)/4,
/// super_i = (D_{i+1}+D_{i+2})/4, sub_i = -super_i. The entries do not
/// depend on the spacings, so the same stencil covers nonuniform meshes.
inline TridiagonalMatrix assemble_A(const Mesh& mesh, std::span<const double> D) {
    detail::require_system_size(mesh, "assemble_A");
    detail::require_profile(mesh, D, "assemble_A");
    const std::size_t N = mesh.n() - 1;
    TridiagonalMatrix A(N);
    for (std::size_t r = 0; r + 1 < N; ++r)
        A.diag[r] = 0.25 * (D[r] - D[r + 2]);
    A.diag[N - 1] = 0.25 * (D[N - 1] + D[N]);
    for (std::size_t r = 0; r + 1 < N; ++r) {
        A.super[r] = 0.25 * (D[r + 1] + D[r + 2]);
        A.sub[r] = -A.super[r];
    }
    return A;
}

/// Stiffness matrix S(D), trapezoidal in D per element. Symmetric positive
/// definite for positive D. On a uniform mesh:
/// diag_i = (D_i + 2D_{i+1} + D_{i+2})/(2h), off_i = -(D_{i+1}+D_{i+2})/(2h),
/// last diag = (D_{n-1}+D_n)/(2h).
inline TridiagonalMatrix assemble_S(const Mesh& mesh, std::span<const double> D) {
    detail::require_system_size(mesh, "assemble_S");
    detail::require_profile(mesh, D, "assemble_S");
    const std::size_t N = mesh.n() - 1;
    TridiagonalMatrix S(N);
    for (std::size_t r = 0; r + 1 < N; ++r)
        S.diag[r] = 0.5 * (D[r] + D[r + 1]) / mesh.h(r) +
                    0.5 * (D[r + 1] + D[r + 2]) / mesh.h(r + 1);
    S.diag[N - 1] = 0.5 * (D[N - 1] + D[N]) / mesh.h(N - 1);
    for (std::size_t r = 0; r + 1 < N; ++r) {
        S.super[r] = -0.5 * (D[r + 1] + D[r + 2]) / mesh.h(r + 1);
        S.sub[r] = S.super[r];
    }
    return S;
}

/// System matrix C = (G/f) M + 1/(zF^2 f) S(D) - Malpha/(zF f) A(D) + (1/zF) Q.
inline TridiagonalMatrix assemble_C(const Mesh& mesh, const FirnParams& p,
                                    std::span<const double> D_alpha) {
    TridiagonalMatrix C = assemble_mass(mesh);
    C.scale(p.G / p.f);
    const auto S = assemble_S(mesh, D_alpha);
    const auto A = assemble_A(mesh, D_alpha);
    const auto [K, Q, B] = assemble_K_Q_B(mesh, p.F);
    C.axpy(1.0 / (p.zF * p.zF * p.f), S);
    C.axpy(-p.Malpha / (p.zF * p.f), A);
    C.axpy(1.0 / p.zF, Q);
    return C;
}

/// Reading of the boundary constant c1. `consistent` carries the 1/zF
/// factors of the weak-form bracket; `literal` is the same expression with
/// those factors dropped. The two coincide when zF = 1.
enum class C1Mode { consistent, literal };

/// Boundary constant multiplying rho_atm(t+dt) in the forcing vector.
inline double boundary_constant_c1(const Mesh& mesh, const FirnParams& p,
                                   std::span<const double> D_alpha,
                                   C1Mode mode = C1Mode::consistent) {
    detail::require_system_size(mesh, "boundary_constant_c1");
    detail::require_profile(mesh, D_alpha, "boundary_constant_c1");
    const double z2 = mesh.z(1);
    const double Dsum = D_alpha[0] + D_alpha[1];
    if (mode == C1Mode::literal)
        return p.G / (6.0 * p.f) * z2 -
               (1.0 / (2.0 * p.f * z2) + p.Malpha / (4.0 * p.f)) * Dsum - 0.5 * p.F;
    return p.G / (6.0 * p.f) * z2 -
           (1.0 / (2.0 * p.f * p.zF * p.zF * z2) + p.Malpha / (4.0 * p.zF * p.f)) * Dsum -
           0.5 * p.F / p.zF;
}

/// Boundary constant of the sensitivity forcing, c_{2,e_1} = c_{2,e_2};
/// the constant is zero for every later canonical direction. It equals half
/// the derivative of c1 with respect to the first two nodal values, so the
/// mode must match the c1 reading used by the forward solve.
inline double boundary_constant_c2(const Mesh& mesh, const FirnParams& p, double r_alpha,
                                   C1Mode mode = C1Mode::consistent) {
    detail::require_system_size(mesh, "boundary_constant_c2");
    const double z2 = mesh.z(1);
    if (mode == C1Mode::literal)
        return -r_alpha / (4.0 * p.f * z2) - r_alpha * p.Malpha / (8.0 * p.f);
    return -r_alpha / (4.0 * p.zF * p.zF * p.f * z2) -
           r_alpha * p.Malpha / (8.0 * p.zF * p.f);
}

namespace detail {

struct BlockStencil {
    std::vector<double> a; // a_j = v_{j+1} - v_j with v_0 = 0, j = 0..n-2
    std::vector<double> b; // b_j = v_{j+2} - v_j, j = 0..n-3
    std::vector<double> c; // c_j = a_j - a_{j+1}, j = 0..n-3
};

inline BlockStencil block_stencil(std::span<const double> v) {
    const std::size_t N = v.size(); // n - 1
    BlockStencil s;
    s.a.resize(N);
    s.b.resize(N > 0 ? N - 1 : 0);
    s.c.resize(N > 0 ? N - 1 : 0);
    if (N == 0) return s;
    s.a[0] = v[0];
    for (std::size_t j = 1; j < N; ++j) s.a[j] = v[j] - v[j - 1];
    for (std::size_t j = 0; j + 1 < N; ++j) {
        s.b[j] = v[j + 1] - (j == 0 ? 0.0 : v[j - 1]);
        s.c[j] = s.a[j] - s.a[j + 1];
    }
    return s;
}

} // namespace detail

/// (n-1) x n block [A(e_1)v A(e_2)v ... A(e_n)v] built in O(n).
/// v has length n-1 and stands for the already-summed interior solution.
inline Matrix structured_Ae_product(std::span<const double> v) {
    const std::size_t N = v.size();
    if (N < 2) throw std::invalid_argument("structured_Ae_product: need n-1 >= 2");
    const auto s = detail::block_stencil(v);
    Matrix out(N, N + 1);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        out(i, i) = 0.25 * s.a[i];
        out(i, i + 1) = 0.25 * s.b[i];
        out(i, i + 2) = 0.25 * s.a[i + 1];
    }
    out(N - 1, N - 1) = 0.25 * s.a[N - 1];
    out(N - 1, N) = 0.25 * s.a[N - 1];
    return out;
}

/// (n-1) x n block [S(e_1)v S(e_2)v ... S(e_n)v] built in O(n); uniform h.
inline Matrix structured_Se_product(std::span<const double> v, double h) {
    const std::size_t N = v.size();
    if (N < 2) throw std::invalid_argument("structured_Se_product: need n-1 >= 2");
    const auto s = detail::block_stencil(v);
    const double w = 1.0 / (2.0 * h);
    Matrix out(N, N + 1);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        out(i, i) = w * s.a[i];
        out(i, i + 1) = w * s.c[i];
        out(i, i + 2) = -w * s.a[i + 1];
    }
    out(N - 1, N - 1) = w * s.a[N - 1];
    out(N - 1, N) = w * s.a[N - 1];
    return out;
}

namespace detail {

/// Writes the nonzero entries of J = r/(2 zF^2 f) Se - r Malpha/(2 zF f) Ae
/// into `out`. The sparsity pattern is fixed across time steps, so a reused
/// workspace stays correct without re-zeroing.
inline void fill_J_block(Matrix& out, std::span<const double> v, const FirnParams& p,
                         double r_alpha, double h) {
    const std::size_t N = v.size();
    const auto s = block_stencil(v);
    const double coefS = r_alpha / (2.0 * p.zF * p.zF * p.f) / (2.0 * h);
    const double coefA = r_alpha * p.Malpha / (2.0 * p.zF * p.f) / 4.0;
    for (std::size_t i = 0; i + 1 < N; ++i) {
        out(i, i) = (coefS - coefA) * s.a[i];
        out(i, i + 1) = coefS * s.c[i] - coefA * s.b[i];
        out(i, i + 2) = -(coefS + coefA) * s.a[i + 1];
    }
    out(N - 1, N - 1) = (coefS - coefA) * s.a[N - 1];
    out(N - 1, N) = (coefS - coefA) * s.a[N - 1];
}

} // namespace detail

/// (n-1) x n block [J_{e_1}v ... J_{e_n}v] of the sensitivity right-hand side.
inline Matrix structured_J_block(std::span<const double> v, const FirnParams& p,
                                 double r_alpha, double h) {
    const std::size_t N = v.size();
    if (N < 2) throw std::invalid_argument("structured_J_block: need n-1 >= 2");
    Matrix out(N, N + 1);
    detail::fill_J_block(out, v, p, r_alpha, h);
    return out;
}

} // namespace firn
