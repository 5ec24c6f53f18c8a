#pragma once

#include "polywave/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace polywave {

// Drivers behind the CLI subcommands. They live in the library so the command
// logic is testable without spawning processes.

struct MeshCommandArgs {
    std::string family;       // tria|quad|hexa|voro, or empty when holes is set
    std::string holes;        // five|eight
    int n = 8;
    unsigned seed = 0;
    int refine = 0;
    std::string out = "mesh.poly";
    std::string quality_out;  // optional JSON quality report
};

inline MeshQualityReport cmd_mesh(const MeshCommandArgs& args)
{
    PolygonalMesh mesh;
    if (!args.holes.empty()) {
        HolesConfig cfg;
        if (args.holes == "five") cfg = HolesConfig::fiveHoles;
        else if (args.holes == "eight") cfg = HolesConfig::eightHoles;
        else throw ConfigError("--holes expects 'five' or 'eight'");
        mesh = build_holes_mesh(cfg, args.n, args.refine);
    } else {
        mesh = generate(mesh_family_from_string(args.family), args.n, args.seed);
    }
    const MeshQualityReport rep = validate(mesh);
    write_polymesh(mesh, args.out);
    if (!args.quality_out.empty()) {
        json j;
        j["rho_star"] = rep.rho_star;
        j["rho_edge"] = rep.rho_edge;
        j["h"] = rep.h;
        j["worst_cell"] = rep.worst_cell;
        j["n_vertices"] = mesh.n_vertices();
        j["n_edges"] = mesh.n_edges();
        j["n_cells"] = mesh.n_cells();
        std::ofstream os(args.quality_out);
        if (!os) throw ConfigError("cannot open quality report file: " + args.quality_out);
        os << j.dump(2) << "\n";
    }
    return rep;
}

// Refinement study following the error-decay protocol: one table per
// (family, k), CSV plus a JSON verdict with the least-squares rates.
inline json run_convergence(const json& config)
{
    using namespace configdetail;
    ScenarioConfig base = ScenarioConfig::from_json(config);
    const auto families = get_or<std::vector<std::string>>(config, "config", "families",
                                                           {"tria", "quad"});
    const auto ks = get_or<std::vector<int>>(config, "config", "ks", {1, 2});
    const auto refinements =
        get_or<std::vector<int>>(config, "config", "refinements", {4, 8, 16, 32});
    if (refinements.empty()) throw ConfigError("refinements list must not be empty");

    std::filesystem::create_directories(base.output.dir);
    json verdicts = json::array();
    for (const std::string& family : families) {
        for (int k : ks) {
            ConvergenceTable table;
            for (int n : refinements) {
                ScenarioConfig cfg = base;
                cfg.mesh.kind = MeshSpec::Kind::generated;
                cfg.mesh.family = mesh_family_from_string(family);
                cfg.mesh.n = n;
                cfg.k = k;
                cfg.output.energy_trace = false;
                cfg.output.snapshot_stride = 0;
                DiscreteProblem pb = DiscreteProblem::build(cfg);
                const auto t0 = std::chrono::steady_clock::now();
                const WaveState state = run_to_final_state(cfg, pb);
                const ScenarioData& data = find_scenario_data(cfg.data);
                if (!data.has_exact)
                    throw ConfigError("convergence study needs a data entry with an exact solution");
                ErrorReport rep = compute_errors(pb.mesh, *pb.dofmap, pb.ops, cfg.material,
                                                 state, data.u_exact, data.p_exact);
                rep.h = pb.quality.h;
                rep.mesh_family = family;
                rep.wall_time =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                table.add(rep);
            }
            json row;
            row["family"] = family;
            row["k"] = k;
            if (table.rows.size() >= 2) {
                const EocResult rates = eoc(table);
                const std::string csv =
                    base.output.dir + "/convergence_" + family + "_k" + std::to_string(k) + ".csv";
                write_convergence_csv(table, rates, csv);
                row["eoc_u"] = rates.slope_u;
                row["eoc_p"] = rates.slope_p;
                row["eoc_energy"] = rates.slope_energy;
                row["csv"] = csv;
                row["pass_u"] = rates.slope_u >= k + 0.8 && rates.slope_u <= k + 1.4;
                row["pass_p"] = rates.slope_p >= k + 0.8 && rates.slope_p <= k + 1.4;
            } else {
                std::cerr << "warning: single mesh in refinement list, no EOC computed\n";
                json errs = json::array();
                for (const auto& r : table.rows)
                    errs.push_back({{"h", r.h}, {"e_u", r.e_u}, {"e_p", r.e_p}});
                row["rows"] = errs;
            }
            verdicts.push_back(row);
        }
    }
    json out;
    out["verdicts"] = verdicts;
    std::ofstream os(base.output.dir + "/convergence_verdicts.json");
    os << out.dump(2) << "\n";
    return out;
}

// Energy study: the four integrators on the same mesh and order, one trace per
// scheme plus a drift summary (including the x1e4 column matching the
// benchmark's magnified plots).
inline json run_energy(const json& config)
{
    using namespace configdetail;
    ScenarioConfig base = ScenarioConfig::from_json(config);
    const auto schemes = get_or<std::vector<std::string>>(
        config, "config", "schemes", {"explicit", "implicit", "crank_nicolson", "symplectic"});

    std::filesystem::create_directories(base.output.dir);
    DiscreteProblem pb = DiscreteProblem::build(base);

    json summary = json::array();
    for (const std::string& scheme : schemes) {
        ScenarioConfig cfg = base;
        if (scheme == "explicit") {
            cfg.stepping.scheme = Scheme::theta;
            cfg.stepping.theta = 0.0;
        } else if (scheme == "implicit") {
            cfg.stepping.scheme = Scheme::theta;
            cfg.stepping.theta = 1.0;
        } else if (scheme == "crank_nicolson") {
            cfg.stepping.scheme = Scheme::theta;
            cfg.stepping.theta = 0.5;
        } else if (scheme == "symplectic") {
            cfg.stepping.scheme = Scheme::symplectic;
        } else {
            throw ConfigError("unknown scheme '" + scheme + "'");
        }
        cfg.output.dir = base.output.dir + "/" + scheme;
        cfg.output.energy_trace = true;
        cfg.output.snapshot_stride = 0;
        const RunSummary rs = run_scenario(cfg, &pb);

        const double e0 = std::sqrt(rs.initial_energy);
        const double eT = std::sqrt(rs.final_energy);
        double max_drift = 0.0;
        for (double e : rs.energy_history) max_drift = std::max(max_drift, std::abs(e - rs.initial_energy));
        json row;
        row["scheme"] = scheme;
        row["relative_energy_error"] = e0 > 0.0 ? (eT - e0) / e0 : 0.0;
        row["relative_energy_error_x1e4"] = e0 > 0.0 ? 1e4 * (eT - e0) / e0 : 0.0;
        row["max_abs_energy_drift"] = max_drift;
        row["max_abs_energy_drift_x1e4"] = 1e4 * max_drift;
        row["trace"] = cfg.output.dir + "/energy.csv";
        summary.push_back(row);
    }
    json out;
    out["schemes"] = summary;
    std::ofstream os(base.output.dir + "/energy_summary.json");
    os << out.dump(2) << "\n";
    return out;
}

} // namespace polywave
