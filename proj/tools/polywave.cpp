#include "polywave/polywave.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int protected_run(const std::function<void()>& body)
{
    try {
        body();
        return 0;
    } catch (const polywave::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const polywave::SolverError& err) {
        std::cerr << "solver failure: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"polywave: mixed virtual element solver for the first-order acoustic wave "
                 "equation on polygonal meshes"};
    app.require_subcommand(1);

    // ---- mesh ------------------------------------------------------------
    auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh and its quality report");
    polywave::MeshCommandArgs margs;
    mesh_cmd->add_option("--family", margs.family, "mesh family: tria|quad|hexa|voro");
    mesh_cmd->add_option("--holes", margs.holes, "scattering mesh: five|eight");
    mesh_cmd->add_option("--n", margs.n, "subdivision count")->required();
    mesh_cmd->add_option("--seed", margs.seed, "random seed (voro/hexa)");
    mesh_cmd->add_option("--refine", margs.refine, "refinement level (holes meshes)");
    mesh_cmd->add_option("--out", margs.out, "output mesh path");
    mesh_cmd->add_option("--quality", margs.quality_out, "quality report JSON path");

    // ---- run / convergence / energy ---------------------------------------
    std::string config_path, out_dir;
    int threads = 0;
    unsigned cli_seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--threads", threads, "worker threads for per-cell stages");
        cmd->add_option_function<unsigned>(
            "--seed", [&](unsigned s) { cli_seed = s; seed_set = true; },
            "mesh seed override");
    };
    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    add_common(run_cmd);
    auto* conv_cmd = app.add_subcommand("convergence", "refinement study over mesh families");
    add_common(conv_cmd);
    auto* energy_cmd = app.add_subcommand("energy", "energy conservation study over schemes");
    add_common(energy_cmd);

    CLI11_PARSE(app, argc, argv);

    auto load_json = [&]() {
        std::ifstream is(config_path);
        if (!is) throw polywave::ConfigError("cannot open config file: " + config_path);
        polywave::json j;
        try {
            is >> j;
        } catch (const polywave::json::exception& err) {
            throw polywave::ConfigError(std::string("config parse error: ") + err.what());
        }
        if (!out_dir.empty()) j["output"]["dir"] = out_dir;
        if (threads > 0) j["threads"] = threads;
        if (seed_set) j["mesh"]["seed"] = cli_seed;
        return j;
    };

    if (mesh_cmd->parsed()) {
        return protected_run([&] {
            const auto rep = polywave::cmd_mesh(margs);
            std::cout << "mesh written to " << margs.out << " (h=" << rep.h
                      << ", rho_star=" << rep.rho_star << ", rho_edge=" << rep.rho_edge << ")\n";
            if (rep.rho_star < 0.01 || rep.rho_edge < 0.01)
                std::cerr << "warning: mesh quality ratios below 0.01 (worst cell "
                          << rep.worst_cell << ")\n";
        });
    }
    if (run_cmd->parsed()) {
        return protected_run([&] {
            const auto cfg = polywave::ScenarioConfig::from_json(load_json());
            const auto summary = polywave::run_scenario(cfg);
            std::cout << "steps: " << summary.steps << "\n"
                      << "final energy: " << summary.final_energy << "\n";
            if (summary.errors)
                std::cout << "e_u: " << summary.errors->e_u << "\ne_p: " << summary.errors->e_p
                          << "\n";
            std::cout << "wall time: " << summary.wall_time << " s\n";
        });
    }
    if (conv_cmd->parsed()) {
        return protected_run([&] {
            const auto out = polywave::run_convergence(load_json());
            for (const auto& row : out.at("verdicts")) {
                std::cout << row.at("family").get<std::string>() << " k="
                          << row.at("k").get<int>();
                if (row.contains("eoc_u"))
                    std::cout << " eoc_u=" << row.at("eoc_u").get<double>()
                              << " eoc_p=" << row.at("eoc_p").get<double>();
                std::cout << "\n";
            }
        });
    }
    if (energy_cmd->parsed()) {
        return protected_run([&] {
            const auto out = polywave::run_energy(load_json());
            for (const auto& row : out.at("schemes"))
                std::cout << row.at("scheme").get<std::string>() << ": relative energy error "
                          << row.at("relative_energy_error").get<double>() << "\n";
        });
    }
    return 0;
}
