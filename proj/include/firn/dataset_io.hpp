#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "firn/data.hpp"
#include "firn/objective.hpp"

namespace firn {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes `base`.csv (header z,g_alpha1,...; one row per node) and the
/// `base`.json sidecar with params and provenance.
inline void write_dataset(const InverseData& data, const std::string& base) {
    data.validate();
    std::ofstream csv(base + ".csv");
    if (!csv) throw std::runtime_error("write_dataset: cannot open " + base + ".csv");
    csv << "z";
    for (std::size_t g = 0; g < data.g.size(); ++g) csv << ",g_alpha" << (g + 1);
    csv << "\n";
    for (std::size_t i = 0; i < data.mesh.n(); ++i) {
        csv << format_double(data.mesh.z(i));
        for (const auto& gv : data.g) csv << "," << format_double(gv[i]);
        csv << "\n";
    }

    nlohmann::json j;
    j["case"] = data.info.case_name;
    j["h_g"] = data.info.h_g;
    j["sigma"] = data.info.sigma;
    j["seed"] = data.info.seed;
    j["dt"] = data.grid.dt;
    j["zF"] = data.params.zF;
    j["Te"] = data.params.Te;
    j["f"] = data.params.f;
    j["G"] = data.params.G;
    j["F"] = data.params.F;
    j["Malpha"] = data.params.Malpha;
    j["r_alphas"] = data.params.r_alphas;
    j["mesh_kind"] = data.mesh.kind == MeshKind::uniform ? "uniform" : "adaptive";
    j["nodes"] = data.mesh.n();
    std::ofstream side(base + ".json");
    if (!side) throw std::runtime_error("write_dataset: cannot open " + base + ".json");
    side << j.dump(2) << "\n";
}

/// Reads a dataset written by write_dataset. The atmospheric function is
/// reconstructed as the standard 2*(Te*t)^(1/4).
inline InverseData read_dataset(const std::string& base) {
    std::ifstream side(base + ".json");
    if (!side) throw std::runtime_error("read_dataset: cannot open " + base + ".json");
    nlohmann::json j;
    side >> j;

    InverseData data;
    data.params = default_params(j.at("zF").get<double>(), j.at("Te").get<double>());
    data.params.f = j.at("f").get<double>();
    data.params.G = j.at("G").get<double>();
    data.params.F = j.at("F").get<double>();
    data.params.Malpha = j.at("Malpha").get<double>();
    data.params.r_alphas = j.at("r_alphas").get<std::vector<double>>();
    data.grid = TimeGrid(j.at("dt").get<double>());
    data.info.case_name = j.at("case").get<std::string>();
    data.info.h_g = j.at("h_g").get<double>();
    data.info.sigma = j.at("sigma").get<double>();
    data.info.seed = j.at("seed").get<unsigned long long>();

    std::ifstream csv(base + ".csv");
    if (!csv) throw std::runtime_error("read_dataset: cannot open " + base + ".csv");
    std::string line;
    if (!std::getline(csv, line)) throw std::runtime_error("read_dataset: empty csv");
    std::size_t gases = 0;
    for (char c : line) gases += c == ',';
    data.g.assign(gases, {});
    std::vector<double> nodes;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        nodes.push_back(std::stod(cell));
        for (std::size_t g = 0; g < gases; ++g) {
            std::getline(row, cell, ',');
            data.g[g].push_back(std::stod(cell));
        }
    }
    data.mesh.nodes = std::move(nodes);
    data.mesh.kind = j.at("mesh_kind").get<std::string>() == "adaptive" ? MeshKind::adaptive
                                                                         : MeshKind::uniform;
    data.mesh.spacings.resize(data.mesh.nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < data.mesh.nodes.size(); ++i)
        data.mesh.spacings[i] = data.mesh.nodes[i + 1] - data.mesh.nodes[i];
    data.validate();
    return data;
}

} // namespace firn
