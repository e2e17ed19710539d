// Command-line driver for the firn gas-trapping solver: forward runs,
// error/runtime table reproduction, gradient verification, dataset
// generation, and inversion.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <firn/dataset_io.hpp>
#include <firn/firn.hpp>
#include <firn/svg.hpp>

using namespace firn;
namespace fs = std::filesystem;

namespace {

// Mesh sizes are accepted as exact fractions ("1/128") so node placement
// has no decimal drift; plain decimals are also accepted.
double parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return std::stod(text);
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("zero denominator");
        return num / den;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse '" + text + "' as a number or fraction");
    }
}

std::string fraction_tag(double h) {
    const double inv = 1.0 / h;
    char buf[32];
    if (std::abs(inv - std::llround(inv)) < 1e-9)
        std::snprintf(buf, sizeof buf, "1over%lld", (long long)std::llround(inv));
    else
        std::snprintf(buf, sizeof buf, "%g", h);
    return buf;
}

Mesh make_mesh(const std::string& kind, double h) {
    if (kind == "adaptive") return build_adaptive_mesh(h);
    return build_uniform_mesh(h);
}

void write_profile_csv(const std::string& path, const Mesh& mesh,
                       std::span<const double> values, const std::string& value_header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "z," << value_header << "\n";
    for (std::size_t i = 0; i < mesh.n(); ++i)
        out << format_double(mesh.z(i)) << "," << format_double(values[i]) << "\n";
}

struct CommonRun {
    std::string case_name = "1";
    double zF = 1.0;
    double Te = 150.0;
    std::string h_text = "1/16";
    std::string dt_rule = "h";
    std::string mesh_kind = "uniform";
    std::string c1_mode = "consistent";
    std::string out_dir = "out";

    C1Mode c1() const {
        return c1_mode == "literal" ? C1Mode::literal : C1Mode::consistent;
    }
    DtRule rule() const { return dt_rule == "h2" ? DtRule::h2 : DtRule::h; }
    double h() const { return parse_fraction(h_text); }
    fs::path out() const {
        fs::create_directories(out_dir);
        return out_dir;
    }
};

void add_common_flags(CLI::App* cmd, CommonRun& run, bool case_required) {
    cmd->set_help_flag("--help", "Print help"); // frees -h for the mesh-size flag
    auto* c = cmd->add_option("--case", run.case_name, "Test case: 1, 2a, 2b, 2c or 2d");
    if (case_required) c->required();
    cmd->add_option("--zf", run.zF, "Firn depth z_F in meters");
    cmd->add_option("--te", run.Te, "End time T_e in years");
    cmd->add_option("--h", run.h_text, "Mesh size as a fraction, e.g. 1/128");
    cmd->add_option("--dt", run.dt_rule, "Time step rule")
        ->check(CLI::IsMember({"h", "h2"}));
    cmd->add_option("--mesh", run.mesh_kind, "Mesh kind")
        ->check(CLI::IsMember({"uniform", "adaptive"}));
    cmd->add_option("--c1-mode", run.c1_mode, "Boundary constant reading")
        ->check(CLI::IsMember({"consistent", "literal"}));
    cmd->add_option("--out", run.out_dir, "Output directory");
}

/// Flat key=value config support: file keys are the long flag names. The
/// derived tokens are injected right after the subcommand name, so
/// command-line flags override the file (last occurrence wins).
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file " + config_path);
    std::vector<std::string> injected;
    std::string line;
    while (std::getline(in, line)) {
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#' || line[start] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + line);
        auto trim = [](std::string s2) {
            const auto a = s2.find_first_not_of(" \t\r");
            const auto b = s2.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s2.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        if (key.empty()) throw std::invalid_argument("config line without key: " + line);
        injected.push_back("--" + key + "=" + value);
    }

    // insert after the subcommand token (first non-flag argument)
    auto pos = args.begin();
    while (pos != args.end() && pos->rfind("-", 0) == 0) ++pos;
    if (pos != args.end()) ++pos;
    args.insert(pos, injected.begin(), injected.end());
    return args;
}

// ---------------------------------------------------------------- forward

int cmd_forward(const CommonRun& run, bool full_trace, bool plot) {
    const TestCase tc = TestCase::from_name(run.case_name);
    const Mesh mesh = make_mesh(run.mesh_kind, run.h());
    const TimeGrid grid(dt_for(run.h(), run.rule()));
    const FirnParams params = default_params(run.zF, run.Te);
    const auto D = tc.sample(mesh);

    {
        TridiagonalMatrix system = assemble_C(mesh, params, D);
        system.scale(params.Te * grid.dt);
        system.axpy(1.0, assemble_mass(mesh));
        const auto diag = check_dt_admissible(factorize(std::move(system)));
        if (diag.warn()) std::cout << "note: " << diag.note << "\n";
    }

    const std::string base = "forward_case" + tc.name() + "_zf" + std::to_string((int)run.zF) +
                             "_te" + std::to_string((int)run.Te) + "_h" + fraction_tag(run.h());
    const fs::path out = run.out();

    std::vector<double> end;
    if (full_trace) {
        const auto trace = forward_solve(mesh, grid, params, D, run.c1());
        end = trace.end_state();
        std::ofstream tr(out / (base + "_trace.csv"));
        tr << "z";
        for (std::size_t i = 0; i < grid.m(); ++i) tr << ",t" << format_double(grid.t(i));
        tr << "\n";
        for (std::size_t r = 0; r < mesh.n(); ++r) {
            tr << format_double(mesh.z(r));
            for (std::size_t i = 0; i < grid.m(); ++i)
                tr << "," << format_double(trace.lambda(r, i));
            tr << "\n";
        }
    } else {
        end = forward_end_state(mesh, grid, params, D, run.c1());
    }
    write_profile_csv((out / (base + ".csv")).string(), mesh, end, "rho");
    if (plot) {
        SvgSeries s{"rho(z, Te)", "#1f77b4", mesh.nodes, end};
        write_svg_plot((out / (base + ".svg")).string(),
                       "End-time concentration, case " + tc.name(), std::span(&s, 1));
    }
    std::cout << "wrote " << (out / (base + ".csv")).string() << "\n"
              << "oscillation fraction " << oscillation_fraction(end)
              << (is_oscillatory(end) ? " (oscillatory: z_F*h too large)" : "") << "\n";
    return 0;
}

// ----------------------------------------------------------------- tables

struct ErrorRow {
    double zF, h;
    ErrorReport e;
};

int cmd_tables(const CommonRun& run, const std::string& kind, std::vector<double> zF_list) {
    const TestCase tc = TestCase::from_name(run.case_name);
    const fs::path out = run.out();
    const ExperimentGrid grid_spec;
    if (zF_list.empty()) zF_list = grid_spec.zF_list;

    if (kind == "errors" || kind == "all") {
        const DtRule rule = run.dt_rule == "h" ? DtRule::h : DtRule::h2;
        const Mesh probe = build_uniform_mesh(1.0 / 16);

        // one worker per zF block; results joined in listed order
        std::vector<std::future<std::vector<ErrorRow>>> jobs;
        for (double zF : zF_list)
            jobs.push_back(std::async(std::launch::async, [&, zF] {
                const FirnParams p = default_params(zF, run.Te);
                const Mesh ref_mesh = build_uniform_mesh(grid_spec.reference_h);
                const auto ref = forward_end_state(
                    ref_mesh, TimeGrid(dt_for(grid_spec.reference_h, rule)), p,
                    tc.sample(ref_mesh), run.c1());
                std::vector<ErrorRow> rows;
                for (double h : grid_spec.h_list) {
                    const Mesh mesh = build_uniform_mesh(h);
                    const auto u = forward_end_state(mesh, TimeGrid(dt_for(h, rule)), p,
                                                     tc.sample(mesh), run.c1());
                    rows.push_back(
                        {zF, h, error_report_at_nodes(probe.nodes, mesh, u, ref_mesh, ref)});
                }
                return rows;
            }));

        const std::string name = "errors_case" + tc.name() + "_te" +
                                 std::to_string((int)run.Te) + "_dt" + run.dt_rule + ".csv";
        std::ofstream csv(out / name);
        csv << "zF,h,linf_abs,linf_rel,l2_abs,l2_rel\n";
        std::printf("%4s %7s %15s %15s %15s %15s\n", "zF", "h", "Linf abs", "Linf rel",
                    "L2 abs", "L2 rel");
        for (auto& job : jobs)
            for (const auto& row : job.get()) {
                csv << row.zF << "," << format_double(row.h) << ","
                    << format_double(row.e.linf_abs) << "," << format_double(row.e.linf_rel)
                    << "," << format_double(row.e.l2_abs) << "," << format_double(row.e.l2_rel)
                    << "\n";
                std::printf("%4g 1/%-5.0f %15.8E %15.8E %15.8E %15.8E\n", row.zF, 1.0 / row.h,
                            row.e.linf_abs, row.e.linf_rel, row.e.l2_abs, row.e.l2_rel);
            }
        std::cout << "wrote " << (out / name).string() << "\n";
    }

    if (kind == "runtime" || kind == "all") {
        const std::string name = "runtime_case" + tc.name() + ".csv";
        std::ofstream csv(out / name);
        csv << "mesh,h,nodes,dt_rule,runtime_s,runtime_per_step_s\n";
        std::printf("%9s %7s %6s %4s %13s %16s\n", "mesh", "h", "nodes", "dt", "runtime/s",
                    "runtime/step/s");
        const FirnParams p = default_params(run.zF, run.Te);
        for (const std::string mesh_kind : {"uniform", "adaptive"}) {
            const std::vector<double> hs =
                mesh_kind == "uniform"
                    ? std::vector<double>{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}
                    : std::vector<double>{1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
            for (double h : hs) {
                const Mesh mesh = make_mesh(mesh_kind, h);
                const auto D = tc.sample(mesh);
                for (DtRule rule : {DtRule::h2, DtRule::h}) {
                    const TimeGrid tg(dt_for(h, rule));
                    const int reps = tg.steps <= 2048 ? 10 : tg.steps <= 16384 ? 3 : 1;
                    const auto t0 = std::chrono::steady_clock::now();
                    for (int r = 0; r < reps; ++r)
                        forward_end_state(mesh, tg, p, D, run.c1());
                    const double secs =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count() /
                        reps;
                    csv << mesh_kind << "," << format_double(h) << "," << mesh.n() << ","
                        << to_string(rule) << "," << format_double(secs) << ","
                        << format_double(secs / static_cast<double>(tg.steps)) << "\n";
                    std::printf("%9s 1/%-5.0f %6zu %4s %13.6E %16.6E\n", mesh_kind.c_str(),
                                1.0 / h, mesh.n(), to_string(rule).c_str(), secs,
                                secs / static_cast<double>(tg.steps));
                }
            }
        }
        std::cout << "wrote " << (out / name).string() << "\n";
    }
    return 0;
}

// -------------------------------------------------------------- datasets

InverseData load_or_generate(const CommonRun& run, const std::string& data_base,
                             const std::string& hg_text, double sigma,
                             unsigned long long seed) {
    if (!data_base.empty()) return read_dataset(data_base);
    const TestCase tc = TestCase::from_name(run.case_name);
    const FirnParams p = default_params(run.zF, run.Te);
    return generate_data(tc, p, parse_fraction(hg_text), sigma, seed, run.c1());
}

int cmd_generate(const CommonRun& run, const std::string& hg_text, double sigma,
                 unsigned long long seed) {
    const auto data = load_or_generate(run, "", hg_text, sigma, seed);
    const std::string base = "dataset_case" + run.case_name + "_zf" +
                             std::to_string((int)run.zF) + "_te" + std::to_string((int)run.Te);
    write_dataset(data, (run.out() / base).string());
    std::cout << "wrote " << (run.out() / base).string() << ".csv/.json\n";
    return 0;
}

// -------------------------------------------------------------- gradcheck

int cmd_gradcheck(const CommonRun& run, const std::string& data_base,
                  const std::string& hg_text, bool corrupt) {
    InverseData data = load_or_generate(run, data_base, hg_text, 0.0, 0);
    data = resample_linear(data, build_uniform_mesh(run.h()));
    data.grid = TimeGrid(dt_for(run.h(), run.rule()));

    const TestCase tc = TestCase::from_name(data.info.case_name.empty() ? run.case_name
                                                                        : data.info.case_name);
    std::vector<double> d(data.mesh.n());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = 0.8 * tc.d_true(data.mesh.z(i)) + 10.0; // fixed probe point

    const auto t0 = std::chrono::steady_clock::now();
    auto ev = evaluate(d, data, true, run.c1());
    const auto t1 = std::chrono::steady_clock::now();
    const auto fd = fd_gradient(d, data, 1e-6, run.c1());
    const auto t2 = std::chrono::steady_clock::now();

    if (corrupt) ev.gradient[d.size() / 2] *= 1.5; // negative-control hook

    double worst = 0.0;
    for (std::size_t j = 0; j < fd.size(); ++j)
        worst = std::max(worst,
                         std::abs(ev.gradient[j] - fd[j]) / (1.0 + std::abs(fd[j])));
    const double block_s = std::chrono::duration<double>(t1 - t0).count();
    const double fd_s = std::chrono::duration<double>(t2 - t1).count();
    std::printf("max componentwise relative discrepancy: %.3E\n", worst);
    std::printf("directional-derivative gradient: %.3E s, central differences: %.3E s, "
                "speedup %.1fx\n",
                block_s, fd_s, fd_s / block_s);
    if (worst > 1e-4) {
        std::cout << "FAIL: discrepancy above 1e-4\n";
        return 1;
    }
    std::cout << "OK\n";
    return 0;
}

// ----------------------------------------------------------------- invert

int cmd_invert(const CommonRun& run, const std::string& data_base, const std::string& hg_text,
               double sigma, unsigned long long seed, const std::string& method,
               const std::string& beta, const std::string& constraints,
               const std::string& grad_backend, double tol, std::size_t max_iters,
               const std::string& post, int degree, bool plot) {
    InverseData data = load_or_generate(run, data_base, hg_text, sigma, seed);
    data = resample_linear(data, build_uniform_mesh(run.h()));
    data.grid = TimeGrid(dt_for(run.h(), run.rule()));

    OptimizerConfig cfg;
    cfg.method = method == "sd" ? OptMethod::steepest : OptMethod::ncg;
    cfg.beta_rule = beta == "hs"   ? BetaRule::HS
                    : beta == "fr" ? BetaRule::FR
                    : beta == "pr" ? BetaRule::PR
                                   : BetaRule::HZ;
    cfg.constraints = constraints == "nonneg" ? Constraint::nonneg
                      : constraints == "dec"  ? Constraint::nonneg_decreasing
                                              : Constraint::none;
    cfg.grad_backend =
        grad_backend == "fd" ? GradBackend::finite_difference : GradBackend::block;
    if (tol > 0.0) cfg.tol_grad = tol;
    cfg.max_iters = max_iters;
    cfg.c1_mode = run.c1();

    const std::string case_name =
        data.info.case_name.empty() ? run.case_name : data.info.case_name;
    std::vector<double> d_true;
    try {
        d_true = TestCase::from_name(case_name).sample(data.mesh);
    } catch (const std::invalid_argument&) {
        // dataset from an unknown case: no truth available
    }

    const std::vector<double> d0(data.mesh.n(), 0.0);
    const OptimizerReport rep = cfg.constraints == Constraint::none
                                    ? ncg_minimize(data, cfg, d0, d_true)
                                    : projected_minimize(data, cfg, d0, d_true);

    const PostprocessMode pmode = post == "clamp"     ? PostprocessMode::clamp_nonneg
                                  : post == "polyfit" ? PostprocessMode::polyfit
                                                      : PostprocessMode::none;
    const auto d_post = postprocess_profile(rep.d_final, data.mesh, pmode, degree);

    const fs::path out = run.out();
    const std::string base = "invert_case" + case_name + "_zf" +
                             std::to_string((int)data.params.zF) + "_h" +
                             fraction_tag(run.h()) + "_" + method + "_" + constraints;

    nlohmann::json j;
    j["method"] = method;
    j["beta"] = beta;
    j["constraints"] = constraints;
    j["grad"] = grad_backend;
    j["h"] = run.h();
    j["dt"] = data.grid.dt;
    j["c1_mode"] = run.c1_mode;
    j["postprocess"] = post;
    j["iterations"] = rep.iterations;
    j["objective_evals"] = rep.objective_evals;
    j["wall_time_s"] = rep.wall_time_s;
    j["termination"] = rep.termination_reason;
    j["objective_history"] = rep.objective_history;
    j["grad_norm_history"] = rep.grad_norm_history;
    if (rep.l2_relative_error) j["l2_relative_error"] = *rep.l2_relative_error;
    if (!d_true.empty()) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < d_true.size(); ++i) {
            num += (d_post[i] - d_true[i]) * (d_post[i] - d_true[i]);
            den += d_true[i] * d_true[i];
        }
        j["l2_relative_error_postprocessed"] = std::sqrt(num / den);
    }
    std::ofstream(out / (base + ".json")) << j.dump(2) << "\n";

    {
        std::ofstream csv(out / (base + ".csv"));
        csv << "z,d_recovered,d_postprocessed" << (d_true.empty() ? "" : ",d_true") << "\n";
        for (std::size_t i = 0; i < data.mesh.n(); ++i) {
            csv << format_double(data.mesh.z(i)) << "," << format_double(rep.d_final[i]) << ","
                << format_double(d_post[i]);
            if (!d_true.empty()) csv << "," << format_double(d_true[i]);
            csv << "\n";
        }
    }
    if (plot) {
        std::vector<SvgSeries> series;
        series.push_back({"recovered", "#d62728", data.mesh.nodes, rep.d_final});
        if (!d_true.empty()) series.push_back({"true", "#1f77b4", data.mesh.nodes, d_true});
        write_svg_plot((out / (base + ".svg")).string(), "Recovered diffusion profile", series);
    }

    std::cout << "termination: " << rep.termination_reason << " after " << rep.iterations
              << " iterations, V = " << rep.objective_history.back() << "\n";
    if (rep.l2_relative_error)
        std::cout << "L2 relative error vs d_true: " << *rep.l2_relative_error << "\n";
    std::cout << "wrote " << (out / (base + ".json")).string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"firn: gas-trapping direct and inverse problem solver"};
    app.set_help_flag("--help", "Print help");
    app.require_subcommand(1);

    CommonRun fwd_run, tab_run, gen_run, grd_run, inv_run;
    bool fwd_trace = false, fwd_plot = false;

    auto* forward = app.add_subcommand("forward", "Solve the direct problem");
    add_common_flags(forward, fwd_run, true);
    forward->add_flag("--trace", fwd_trace, "Also write the full time history");
    forward->add_flag("--plot", fwd_plot, "Write an SVG plot of the end-time solution");

    std::string tab_kind = "errors";
    std::vector<double> tab_zf;
    auto* tables = app.add_subcommand("tables", "Reproduce error and runtime tables");
    tab_run.dt_rule = "h2";
    add_common_flags(tables, tab_run, false);
    tables->add_option("--kind", tab_kind, "Which tables to produce")
        ->check(CLI::IsMember({"errors", "runtime", "all"}));
    tables->add_option("--zf-list", tab_zf, "Override the z_F sweep for error tables");

    std::string gen_hg = "1/65";
    double gen_sigma = 0.0;
    unsigned long long gen_seed = 0;
    auto* generate = app.add_subcommand("generate", "Generate an inverse-problem dataset");
    gen_run.zF = 5.0;
    gen_run.case_name = "2d";
    add_common_flags(generate, gen_run, false);
    generate->add_option("--hg", gen_hg, "Generation mesh size (fraction)");
    generate->add_option("--sigma", gen_sigma, "Gaussian noise standard deviation");
    generate->add_option("--seed", gen_seed, "Noise seed");

    std::string grd_data, grd_hg = "1/65";
    bool grd_corrupt = false;
    auto* gradcheck = app.add_subcommand(
        "gradcheck", "Verify the gradient against central differences and report the speedup");
    grd_run.case_name = "2d";
    grd_run.zF = 5.0;
    add_common_flags(gradcheck, grd_run, false);
    gradcheck->add_option("--data", grd_data, "Dataset base path (omit to generate)");
    gradcheck->add_option("--hg", grd_hg, "Generation mesh size when generating");
    gradcheck->add_flag("--corrupt-gradient", grd_corrupt, "Negative-control test hook")
        ->group("");

    std::string inv_data, inv_hg = "1/65", inv_method = "ncg", inv_beta = "hz",
                inv_constraints = "none", inv_grad = "block", inv_post = "none";
    double inv_sigma = 0.0, inv_tol = 0.0;
    unsigned long long inv_seed = 0;
    std::size_t inv_max_iters = 2000;
    int inv_degree = 3;
    bool inv_plot = false;
    auto* invert = app.add_subcommand("invert", "Recover the diffusion profile from data");
    inv_run.case_name = "2d";
    inv_run.zF = 5.0;
    add_common_flags(invert, inv_run, false);
    invert->add_option("--data", inv_data, "Dataset base path (omit to generate)");
    invert->add_option("--hg", inv_hg, "Generation mesh size when generating");
    invert->add_option("--sigma", inv_sigma, "Noise level when generating");
    invert->add_option("--seed", inv_seed, "Noise seed when generating");
    invert->add_option("--method", inv_method, "Optimizer family")
        ->check(CLI::IsMember({"sd", "ncg"}));
    invert->add_option("--beta", inv_beta, "NCG beta rule")
        ->check(CLI::IsMember({"hs", "fr", "pr", "hz"}));
    invert->add_option("--constraints", inv_constraints, "Constraint set")
        ->check(CLI::IsMember({"none", "nonneg", "dec"}));
    invert->add_option("--grad", inv_grad, "Gradient backend")
        ->check(CLI::IsMember({"block", "fd"}));
    invert->add_option("--tol", inv_tol, "Gradient tolerance (0 = default)");
    invert->add_option("--max-iters", inv_max_iters, "Iteration cap");
    invert->add_option("--post", inv_post, "Postprocessing of the recovered profile")
        ->check(CLI::IsMember({"none", "clamp", "polyfit"}));
    invert->add_option("--degree", inv_degree, "Polynomial degree for --post polyfit");
    invert->add_flag("--plot", inv_plot, "Write an SVG overlay of recovered vs true profile");

    // config files inject values before the flags; last occurrence wins
    for (auto* sub : app.get_subcommands({})) {
        sub->add_option("--config", "Config file with key=value lines; flags override")
            ->configurable(false);
        for (auto* opt : sub->get_options())
            if (opt->get_expected_min() == 1 && opt->get_expected_max() == 1)
                opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    forward->callback([&] { cmd_forward(fwd_run, fwd_trace, fwd_plot); });
    tables->callback([&] { cmd_tables(tab_run, tab_kind, tab_zf); });
    generate->callback([&] { cmd_generate(gen_run, gen_hg, gen_sigma, gen_seed); });

    int exit_code = 0;
    gradcheck->callback(
        [&] { exit_code = cmd_gradcheck(grd_run, grd_data, grd_hg, grd_corrupt); });
    invert->callback([&] {
        exit_code = cmd_invert(inv_run, inv_data, inv_hg, inv_sigma, inv_seed, inv_method,
                               inv_beta, inv_constraints, inv_grad, inv_tol, inv_max_iters,
                               inv_post, inv_degree, inv_plot);
    });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end()); // CLI11's vector overload is reversed
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
