#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace firn {

/// Tridiagonal matrix in three-band storage. For dimension N the bands are
/// sub (N-1), diag (N), super (N-1). N is the matrix dimension, which for
/// the assembled systems equals n-1 (mesh nodes minus the Dirichlet node).
struct TridiagonalMatrix {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    TridiagonalMatrix() = default;
    explicit TridiagonalMatrix(std::size_t n)
        : sub(n > 0 ? n - 1 : 0, 0.0), diag(n, 0.0), super(n > 0 ? n - 1 : 0, 0.0) {}

    std::size_t dim() const { return diag.size(); }

    bool bands_consistent() const {
        return diag.empty() ? (sub.empty() && super.empty())
                            : (sub.size() == diag.size() - 1 && super.size() == diag.size() - 1);
    }

    /// y = A x
    void matvec(std::span<const double> x, std::span<double> y) const {
        const std::size_t n = dim();
        if (x.size() != n || y.size() != n)
            throw std::invalid_argument("tridiagonal matvec: dimension mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += sub[i - 1] * x[i - 1];
            if (i + 1 < n) s += super[i] * x[i + 1];
            y[i] = s;
        }
    }

    std::vector<double> matvec(std::span<const double> x) const {
        std::vector<double> y(dim());
        matvec(x, y);
        return y;
    }

    TridiagonalMatrix& axpy(double c, const TridiagonalMatrix& other) {
        if (other.dim() != dim())
            throw std::invalid_argument("tridiagonal axpy: dimension mismatch");
        for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += c * other.diag[i];
        for (std::size_t i = 0; i < sub.size(); ++i) {
            sub[i] += c * other.sub[i];
            super[i] += c * other.super[i];
        }
        return *this;
    }

    TridiagonalMatrix& scale(double c) {
        for (auto& v : diag) v *= c;
        for (auto& v : sub) v *= c;
        for (auto& v : super) v *= c;
        return *this;
    }
};

} // namespace firn
