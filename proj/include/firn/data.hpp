#pragma once

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firn/forward.hpp"
#include "firn/mesh.hpp"
#include "firn/objective.hpp"
#include "firn/params.hpp"

namespace firn {

/// Closed-form diffusion profiles of the benchmark cases:
/// case 1: 200 - 199.98 z; cases 2a..2d: 200 (1-z)^p, p = 0.25, 0.5, 0.75, 1.
struct TestCase {
    enum class Id { case1, case2a, case2b, case2c, case2d };
    Id id = Id::case1;

    static TestCase from_name(const std::string& name) {
        if (name == "1" || name == "case1") return {Id::case1};
        if (name == "2a" || name == "case2a") return {Id::case2a};
        if (name == "2b" || name == "case2b") return {Id::case2b};
        if (name == "2c" || name == "case2c") return {Id::case2c};
        if (name == "2d" || name == "case2d") return {Id::case2d};
        throw std::invalid_argument("unknown test case '" + name +
                                    "' (expected 1, 2a, 2b, 2c or 2d)");
    }

    std::string name() const {
        switch (id) {
        case Id::case1: return "1";
        case Id::case2a: return "2a";
        case Id::case2b: return "2b";
        case Id::case2c: return "2c";
        case Id::case2d: return "2d";
        }
        return "?";
    }

    double d_true(double z) const {
        switch (id) {
        case Id::case1: return 200.0 - 199.98 * z;
        case Id::case2a: return 200.0 * std::pow(1.0 - z, 0.25);
        case Id::case2b: return 200.0 * std::pow(1.0 - z, 0.5);
        case Id::case2c: return 200.0 * std::pow(1.0 - z, 0.75);
        case Id::case2d: return 200.0 * (1.0 - z);
        }
        return 0.0;
    }

    std::vector<double> sample(const Mesh& mesh) const {
        std::vector<double> d(mesh.n());
        for (std::size_t i = 0; i < mesh.n(); ++i) d[i] = d_true(mesh.z(i));
        return d;
    }
};

enum class DtRule { h, h2 };

inline double dt_for(double h, DtRule rule) { return rule == DtRule::h ? h : h * h; }

inline std::string to_string(DtRule rule) { return rule == DtRule::h ? "h" : "h2"; }

/// The experiment sweep of the benchmark study.
struct ExperimentGrid {
    std::vector<double> zF_list{1.0, 50.0, 100.0, 150.0};
    std::vector<double> Te_list{150.0};
    std::vector<double> h_list{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    double reference_h = 1.0 / 256;
    DtRule dt_rule = DtRule::h2;
    double generation_h = 1.0 / 65; // 65 cells, 66 nodes
};

/// Synthetic inverse-problem data: one forward solve per gas with
/// D_alpha = r_alpha * d_true on a uniform generation mesh of spacing h_g,
/// dt = h_g, end-time columns stored per gas. Optional Gaussian noise.
inline InverseData generate_data(const TestCase& tc, const FirnParams& params, double h_g,
                                 double sigma = 0.0, unsigned long long seed = 0,
                                 C1Mode c1_mode = C1Mode::consistent) {
    InverseData data;
    data.mesh = build_uniform_mesh(h_g);
    data.grid = TimeGrid(h_g);
    data.params = params;
    data.info = DatasetInfo{tc.name(), h_g, sigma, seed};
    const auto d = tc.sample(data.mesh);
    std::vector<double> D(d.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double r : params.r_alphas) {
        for (std::size_t i = 0; i < d.size(); ++i) D[i] = r * d[i];
        auto g = forward_end_state(data.mesh, data.grid, params, D, c1_mode);
        if (sigma > 0.0)
            for (double& v : g) v += noise(rng);
        data.g.push_back(std::move(g));
    }
    return data;
}

/// Piecewise-linear resampling of every g_alpha onto the target mesh,
/// exact at shared nodes. The time grid and params carry over; the caller
/// picks the inversion time step afterwards.
inline InverseData resample_linear(const InverseData& data, const Mesh& target) {
    data.validate();
    for (std::size_t i = 0; i < target.n(); ++i)
        if (target.z(i) < -1e-12 || target.z(i) > 1.0 + 1e-12)
            throw std::invalid_argument("resample_linear: target node outside [0,1]");
    InverseData out;
    out.mesh = target;
    out.grid = data.grid;
    out.params = data.params;
    out.info = data.info;
    const Mesh& src = data.mesh;
    for (const auto& gsrc : data.g) {
        std::vector<double> g(target.n());
        std::size_t seg = 0;
        for (std::size_t i = 0; i < target.n(); ++i) {
            const double z = target.z(i);
            while (seg + 2 < src.n() && src.z(seg + 1) < z) ++seg;
            if (std::abs(z - src.z(seg)) <= 1e-12) {
                g[i] = gsrc[seg];
            } else if (std::abs(z - src.z(seg + 1)) <= 1e-12) {
                g[i] = gsrc[seg + 1];
            } else {
                const double t = (z - src.z(seg)) / (src.z(seg + 1) - src.z(seg));
                g[i] = (1.0 - t) * gsrc[seg] + t * gsrc[seg + 1];
            }
        }
        out.g.push_back(std::move(g));
    }
    return out;
}

} // namespace firn
