#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firn/matrix.hpp"
#include "firn/tridiag.hpp"

namespace firn {

/// Solver failure (singular system, NaN in the march, ...).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Smallest eigenvalue of a symmetric tridiagonal matrix via Sturm-sequence
/// bisection. `diag` has length N, `off` length N-1.
inline double min_eig_sym_tridiag(std::span<const double> diag, std::span<const double> off,
                                  double tol = 1e-12) {
    const std::size_t N = diag.size();
    if (N == 0) throw std::invalid_argument("min_eig_sym_tridiag: empty matrix");
    if (N == 1) return diag[0];

    // Gershgorin bracket.
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < N; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < N) r += std::abs(off[i]);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }

    // Number of eigenvalues strictly below x (Sturm count).
    const auto count_below = [&](double x) {
        int count = 0;
        double q = diag[0] - x;
        if (q < 0.0) ++count;
        for (std::size_t i = 1; i < N; ++i) {
            const double denom = (q == 0.0) ? 1e-300 : q;
            q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
            if (q < 0.0) ++count;
        }
        return count;
    };

    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    while (hi - lo > tol * scale) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Positive-definiteness report for M + Te*dt*C in the symmetric-part sense.
/// Failing the check is a warning, not an error: definiteness is sufficient
/// for invertibility, not necessary.
struct DtDiagnostic {
    bool positive_definite = false;
    bool exact = false;        // true: Sturm eigenvalue; false: Gershgorin bound
    double min_symmetric = 0.0; // min eigenvalue (exact) or Gershgorin lower bound
    std::string note;

    bool warn() const { return !positive_definite; }
};

/// Tridiagonal system with a reusable banded LU factorization (partial
/// pivoting, adjacent-row interchanges). Solve cost is O(n) per
/// right-hand side; the block variant runs row-wise over all columns so a
/// whole matrix of right-hand sides is eliminated in one sweep.
class BandedSystem {
public:
    explicit BandedSystem(TridiagonalMatrix matrix) : original_(std::move(matrix)) {
        if (!original_.bands_consistent())
            throw std::invalid_argument("BandedSystem: inconsistent bands");
        factorize_();
    }

    std::size_t dim() const { return original_.dim(); }
    const TridiagonalMatrix& matrix() const { return original_; }

    // Factor access for reconstruction checks.
    std::span<const double> factor_sub() const { return dl_; }
    std::span<const double> factor_diag() const { return d_; }
    std::span<const double> factor_super() const { return du_; }
    std::span<const double> factor_super2() const { return du2_; }
    std::span<const std::size_t> pivots() const { return ipiv_; }

    void solve_in_place(std::span<double> b) const {
        const std::size_t N = dim();
        if (b.size() != N) throw std::invalid_argument("BandedSystem::solve: size mismatch");
        for (std::size_t i = 0; i + 1 < N; ++i) {
            if (ipiv_[i] == i) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl_[i] * b[i];
            }
        }
        b[N - 1] /= d_[N - 1];
        if (N >= 2) b[N - 2] = (b[N - 2] - du_[N - 2] * b[N - 1]) / d_[N - 2];
        for (std::size_t k = N; k-- > 2;) {
            const std::size_t i = k - 2;
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
        }
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> x(rhs.begin(), rhs.end());
        solve_in_place(x);
        return x;
    }

    /// Solves A X = B for a dim() x k right-hand-side matrix in place.
    /// Row operations run over contiguous rows, one pass per elimination
    /// step, so the k columns are processed simultaneously.
    void solve_block_in_place(Matrix& B) const {
        const std::size_t N = dim();
        if (B.rows() != N) throw std::invalid_argument("BandedSystem::solve_block: size mismatch");
        const std::size_t k = B.cols();
        double* data = B.data().data();
        for (std::size_t i = 0; i + 1 < N; ++i) {
            double* ri = data + i * k;
            double* rj = ri + k;
            const double m = dl_[i];
            if (ipiv_[i] == i) {
                for (std::size_t c = 0; c < k; ++c) rj[c] -= m * ri[c];
            } else {
                for (std::size_t c = 0; c < k; ++c) {
                    const double tmp = ri[c];
                    ri[c] = rj[c];
                    rj[c] = tmp - m * rj[c];
                }
            }
        }
        {
            double* r = data + (N - 1) * k;
            const double inv = 1.0 / d_[N - 1];
            for (std::size_t c = 0; c < k; ++c) r[c] *= inv;
        }
        if (N >= 2) {
            double* r = data + (N - 2) * k;
            const double* r1 = r + k;
            const double inv = 1.0 / d_[N - 2], u = du_[N - 2];
            for (std::size_t c = 0; c < k; ++c) r[c] = (r[c] - u * r1[c]) * inv;
        }
        for (std::size_t step = N; step-- > 2;) {
            const std::size_t i = step - 2;
            double* r = data + i * k;
            const double* r1 = r + k;
            const double* r2 = r1 + k;
            const double inv = 1.0 / d_[i], u1 = du_[i], u2 = du2_[i];
            for (std::size_t c = 0; c < k; ++c) r[c] = (r[c] - u1 * r1[c] - u2 * r2[c]) * inv;
        }
    }

private:
    void factorize_() {
        const std::size_t N = dim();
        d_.assign(original_.diag.begin(), original_.diag.end());
        dl_.assign(original_.sub.begin(), original_.sub.end());
        du_.assign(original_.super.begin(), original_.super.end());
        du2_.assign(N >= 2 ? N - 2 : 0, 0.0);
        ipiv_.resize(N >= 1 ? N - 1 : 0);

        for (std::size_t i = 0; i + 1 < N; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                ipiv_[i] = i;
                if (d_[i] == 0.0) throw_singular_(i);
                const double m = dl_[i] / d_[i];
                dl_[i] = m;
                d_[i + 1] -= m * du_[i];
                if (i + 2 < N) du2_[i] = 0.0;
            } else {
                ipiv_[i] = i + 1;
                const double m = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = m;
                const double tmp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = tmp - m * d_[i + 1];
                if (i + 2 < N) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -m * du_[i + 1];
                }
            }
        }
        if (d_[N - 1] == 0.0) throw_singular_(N - 1);
    }

    [[noreturn]] void throw_singular_(std::size_t pivot) const;

    TridiagonalMatrix original_;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<std::size_t> ipiv_;
};

/// Positive-definiteness check of the symmetric part (A + A^T)/2 of a
/// system matrix: exact smallest eigenvalue for dim <= 64, Gershgorin
/// lower bound beyond that.
inline DtDiagnostic check_dt_admissible(const BandedSystem& system) {
    const TridiagonalMatrix& A = system.matrix();
    const std::size_t N = A.dim();
    std::vector<double> off(N >= 1 ? N - 1 : 0);
    for (std::size_t i = 0; i + 1 < N; ++i) off[i] = 0.5 * (A.super[i] + A.sub[i]);

    DtDiagnostic diag;
    if (N <= 64) {
        diag.exact = true;
        diag.min_symmetric = min_eig_sym_tridiag(A.diag, off);
        diag.positive_definite = diag.min_symmetric > 0.0;
        diag.note = diag.positive_definite
                        ? "symmetric part positive definite (min eig > 0)"
                        : "symmetric part not positive definite; invertibility not guaranteed "
                          "by the definiteness bound (warning only)";
    } else {
        double bound = A.diag[0];
        for (std::size_t i = 0; i < N; ++i) {
            double r = 0.0;
            if (i > 0) r += std::abs(off[i - 1]);
            if (i + 1 < N) r += std::abs(off[i]);
            bound = std::min(bound, A.diag[i] - r);
        }
        diag.exact = false;
        diag.min_symmetric = bound;
        diag.positive_definite = bound > 0.0;
        diag.note = diag.positive_definite
                        ? "Gershgorin bound on the symmetric part is positive"
                        : "Gershgorin bound inconclusive; factorization success is the "
                          "operative test (warning only)";
    }
    return diag;
}

inline void BandedSystem::throw_singular_(std::size_t pivot) const {
    const DtDiagnostic diag = check_dt_admissible(*this);
    throw SolverError("factorize: singular matrix, zero pivot at index " +
                      std::to_string(pivot) + " of " + std::to_string(dim()) +
                      "; dt admissibility: " + diag.note);
}

/// Convenience wrapper naming the operation of the direct-problem setup.
inline BandedSystem factorize(TridiagonalMatrix system_matrix) {
    return BandedSystem(std::move(system_matrix));
}

} // namespace firn
