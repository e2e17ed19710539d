#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace firn {

enum class MeshKind { uniform, adaptive };

/// 1-D spatial mesh on the rescaled interval [0,1].
/// Immutable after construction; nodes are strictly increasing with
/// z_1 = 0 and z_n = 1 exactly.
struct Mesh {
    std::vector<double> nodes;
    std::vector<double> spacings; // h_j = z_{j+1} - z_j
    MeshKind kind = MeshKind::uniform;

    std::size_t n() const { return nodes.size(); }
    double z(std::size_t i) const { return nodes[i]; }
    double h(std::size_t j) const { return spacings[j]; }

    /// Spacing of a uniform mesh (first spacing; all equal by construction).
    double uniform_h() const {
        if (kind != MeshKind::uniform)
            throw std::logic_error("uniform_h() called on a nonuniform mesh");
        return spacings.front();
    }
};

namespace detail {

inline std::int64_t exact_cell_count(double width, double step, const char* what) {
    if (!(step > 0.0) || !(width > 0.0))
        throw std::invalid_argument(std::string(what) + ": step must be positive");
    const double q = width / step;
    const auto cells = static_cast<std::int64_t>(std::llround(q));
    if (cells < 1 || std::abs(step * static_cast<double>(cells) - width) > 1e-9 * width)
        throw std::invalid_argument(std::string(what) + ": step " + std::to_string(step) +
                                    " does not evenly divide an interval of width " +
                                    std::to_string(width));
    return cells;
}

inline void finalize_spacings(Mesh& mesh) {
    mesh.spacings.resize(mesh.nodes.size() - 1);
    for (std::size_t j = 0; j + 1 < mesh.nodes.size(); ++j)
        mesh.spacings[j] = mesh.nodes[j + 1] - mesh.nodes[j];
}

} // namespace detail

/// Uniform mesh with n = 1/h + 1 nodes. Rejects h that does not evenly
/// divide [0,1]. Nodes are computed as i/cells so z_n = 1 exactly.
inline Mesh build_uniform_mesh(double h) {
    const auto cells = detail::exact_cell_count(1.0, h, "build_uniform_mesh");
    Mesh mesh;
    mesh.kind = MeshKind::uniform;
    mesh.nodes.resize(static_cast<std::size_t>(cells) + 1);
    for (std::int64_t i = 0; i <= cells; ++i)
        mesh.nodes[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(cells);
    detail::finalize_spacings(mesh);
    return mesh;
}

/// Adaptive mesh refined toward z = 0: spacing h/16 on [0, 1/16],
/// h/8 on [1/16, 1/8], h/4 on [1/8, 1/4], h/2 on [1/4, 1/2], h on [1/2, 1].
/// Band boundaries are nodes; rejects h for which any band is not an
/// integer number of cells.
inline Mesh build_adaptive_mesh(double h) {
    static constexpr double band_start[] = {0.0, 0.0625, 0.125, 0.25, 0.5, 1.0};
    static constexpr double step_factor[] = {16.0, 8.0, 4.0, 2.0, 1.0};

    Mesh mesh;
    mesh.kind = MeshKind::adaptive;
    mesh.nodes.push_back(0.0);
    for (int b = 0; b < 5; ++b) {
        const double start = band_start[b];
        const double width = band_start[b + 1] - start;
        const auto cells = detail::exact_cell_count(width, h / step_factor[b], "build_adaptive_mesh");
        for (std::int64_t k = 1; k < cells; ++k)
            mesh.nodes.push_back(start + (static_cast<double>(k) * width) /
                                             static_cast<double>(cells));
        mesh.nodes.push_back(band_start[b + 1]); // band boundary placed exactly
    }
    detail::finalize_spacings(mesh);
    return mesh;
}

/// Uniform time grid on [0,1]: t_i = i*dt for i = 0..m-1 with t_{m-1} = 1.
struct TimeGrid {
    double dt = 1.0;
    std::size_t steps = 1; // number of time steps, m - 1

    TimeGrid() = default;
    explicit TimeGrid(double dt_) : dt(dt_) {
        if (!(dt_ > 0.0) || dt_ > 1.0)
            throw std::invalid_argument("TimeGrid: dt must be in (0,1]");
        const double q = 1.0 / dt_;
        const auto s = static_cast<std::int64_t>(std::llround(q));
        if (s < 1 || std::abs(dt_ * static_cast<double>(s) - 1.0) > 1e-12)
            throw std::invalid_argument("TimeGrid: dt must divide [0,1] exactly (got dt = " +
                                        std::to_string(dt_) + ")");
        steps = static_cast<std::size_t>(s);
    }

    std::size_t m() const { return steps + 1; }
    double t(std::size_t i) const { return static_cast<double>(i) * dt; }
};

/// Index pairs (i,j) with |a.z(i) - b.z(j)| <= tol, in increasing z.
inline std::vector<std::pair<std::size_t, std::size_t>>
common_nodes(const Mesh& a, const Mesh& b, double tol = 1e-12) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        while (j < b.n() && b.z(j) < a.z(i) - tol) ++j;
        if (j < b.n() && std::abs(b.z(j) - a.z(i)) <= tol) out.emplace_back(i, j);
    }
    return out;
}

} // namespace firn
