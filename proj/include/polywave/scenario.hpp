#pragma once

#include "polywave/analysis.hpp"
#include "polywave/io_matrix.hpp"
#include "polywave/io_mesh.hpp"
#include "polywave/timestepping.hpp"
#include "polywave/util.hpp"
#include "polywave/vtk.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace polywave {

using nlohmann::json;

namespace configdetail {

inline void require_keys(const json& obj, const std::string& where,
                         const std::vector<std::string>& allowed)
{
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T> T get_required(const json& obj, const std::string& where, const std::string& key)
{
    if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& err) {
        throw ConfigError(where + "." + key + ": " + err.what());
    }
}

template <class T>
T get_or(const json& obj, const std::string& where, const std::string& key, T fallback)
{
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& err) {
        throw ConfigError(where + "." + key + ": " + err.what());
    }
}

} // namespace configdetail

struct MeshSpec {
    enum class Kind { generated, file, holes } kind = Kind::generated;
    MeshFamily family = MeshFamily::quad;
    int n = 8;
    unsigned seed = 0;
    std::string file;
    HolesConfig holes = HolesConfig::fiveHoles;
    int refine = 0;

    PolygonalMesh build() const
    {
        switch (kind) {
            case Kind::generated: return generate(family, n, seed);
            case Kind::file: return read_polymesh(file);
            case Kind::holes: return build_holes_mesh(holes, n, refine);
        }
        throw ConfigError("unhandled mesh spec");
    }
};

// Named boundary tagging rules on the unit square; "from_mesh" keeps whatever
// the mesh already carries (holes meshes, tagged files).
inline void apply_boundary_rule(PolygonalMesh& mesh, const std::string& rule)
{
    auto near = [](double a, double b) { return std::abs(a - b) < 1e-9; };
    if (rule == "from_mesh") {
        for (const MeshEdge& e : mesh.edges)
            if (e.on_boundary() && e.tag == BoundaryTag::untagged)
                throw ConfigError("boundary rule 'from_mesh' but the mesh has untagged edges");
        return;
    }
    if (rule == "dirichlet_all") {
        tag_boundary_all(mesh, BoundaryTag::dirichlet);
        return;
    }
    if (rule == "neumann_all") {
        tag_boundary_all(mesh, BoundaryTag::neumann);
        return;
    }
    if (rule == "robin_all") {
        tag_boundary_all(mesh, BoundaryTag::robin);
        return;
    }
    if (rule == "dirichlet_tb_neumann_lr") {
        tag_boundary(mesh, [near](const Vec2& mid) -> std::optional<BoundaryTag> {
            if (near(mid.y(), 0.0) || near(mid.y(), 1.0)) return BoundaryTag::dirichlet;
            if (near(mid.x(), 0.0) || near(mid.x(), 1.0)) return BoundaryTag::neumann;
            return std::nullopt;
        });
        return;
    }
    throw ConfigError("unknown boundary rule '" + rule +
                      "' (expected dirichlet_all|neumann_all|robin_all|"
                      "dirichlet_tb_neumann_lr|from_mesh)");
}

struct OutputConfig {
    std::string dir = "out";
    int snapshot_stride = 0; // 0: no snapshots
    bool vtk = true;
    bool energy_trace = true;
    bool dump_matrices = false;
};

struct ScenarioConfig {
    MeshSpec mesh;
    int k = 1;
    MaterialField material;
    std::string boundary = "dirichlet_all";
    std::string data = "zero";
    SteppingConfig stepping;
    OutputConfig output;
    int threads = 1;

    static ScenarioConfig from_json(const json& j);
    static ScenarioConfig from_file(const std::string& path);
};

inline ScenarioConfig ScenarioConfig::from_json(const json& j)
{
    using namespace configdetail;
    require_keys(j, "config",
                 {"schema", "mesh", "k", "material", "boundary", "data", "scheme", "tau", "T",
                  "output", "threads", "refinements", "families", "ks", "schemes"});
    const std::string schema = get_required<std::string>(j, "config", "schema");
    if (schema != "polywave-config-v1")
        throw ConfigError("unsupported config schema '" + schema + "'");

    ScenarioConfig cfg;
    const json& jm = j.at("mesh");
    require_keys(jm, "mesh", {"family", "n", "seed", "file", "holes", "refine"});
    if (jm.contains("file")) {
        cfg.mesh.kind = MeshSpec::Kind::file;
        cfg.mesh.file = get_required<std::string>(jm, "mesh", "file");
    } else if (jm.contains("holes")) {
        cfg.mesh.kind = MeshSpec::Kind::holes;
        const std::string which = get_required<std::string>(jm, "mesh", "holes");
        if (which == "five") cfg.mesh.holes = HolesConfig::fiveHoles;
        else if (which == "eight") cfg.mesh.holes = HolesConfig::eightHoles;
        else throw ConfigError("mesh.holes: expected 'five' or 'eight'");
        cfg.mesh.n = get_or<int>(jm, "mesh", "n", 38);
        cfg.mesh.refine = get_or<int>(jm, "mesh", "refine", 0);
    } else {
        cfg.mesh.kind = MeshSpec::Kind::generated;
        cfg.mesh.family = mesh_family_from_string(get_required<std::string>(jm, "mesh", "family"));
        cfg.mesh.n = get_required<int>(jm, "mesh", "n");
        cfg.mesh.seed = get_or<unsigned>(jm, "mesh", "seed", 0);
    }

    cfg.k = get_required<int>(j, "config", "k");
    if (cfg.k < 0 || cfg.k > 4) throw ConfigError("k must lie in [0,4]");

    if (j.contains("material")) {
        const json& mat = j.at("material");
        require_keys(mat, "material", {"c", "alpha"});
        cfg.material.alpha = get_or<double>(mat, "material", "alpha", 1.0);
        if (mat.contains("c")) {
            if (mat.at("c").is_number()) {
                cfg.material.c_by_region = {{0, mat.at("c").get<double>()}};
            } else {
                cfg.material.c_by_region.clear();
                for (const auto& [key, value] : mat.at("c").items())
                    cfg.material.c_by_region[std::stoi(key)] = value.get<double>();
            }
        }
    }

    cfg.boundary = get_or<std::string>(j, "config", "boundary", "dirichlet_all");
    cfg.data = get_or<std::string>(j, "config", "data", "zero");
    find_scenario_data(cfg.data); // validate the registry reference early

    if (j.contains("scheme")) {
        const json& js = j.at("scheme");
        require_keys(js, "scheme", {"type", "theta", "iterative", "tol"});
        const std::string type = get_required<std::string>(js, "scheme", "type");
        if (type == "theta") {
            cfg.stepping.scheme = Scheme::theta;
            cfg.stepping.theta = get_or<double>(js, "scheme", "theta", 0.5);
        } else if (type == "symplectic") {
            cfg.stepping.scheme = Scheme::symplectic;
        } else {
            throw ConfigError("scheme.type: expected 'theta' or 'symplectic'");
        }
        cfg.stepping.use_iterative = get_or<bool>(js, "scheme", "iterative", false);
        cfg.stepping.solver_tol = get_or<double>(js, "scheme", "tol", 1e-12);
    }
    cfg.stepping.tau = get_required<double>(j, "config", "tau");
    cfg.stepping.T = get_required<double>(j, "config", "T");
    if (cfg.stepping.tau <= 0.0) throw ConfigError("tau must be positive");
    cfg.stepping.n_steps(); // validates T = N tau

    if (j.contains("output")) {
        const json& jo = j.at("output");
        require_keys(jo, "output",
                     {"dir", "snapshot_stride", "vtk", "energy_trace", "dump_matrices"});
        cfg.output.dir = get_or<std::string>(jo, "output", "dir", "out");
        cfg.output.snapshot_stride = get_or<int>(jo, "output", "snapshot_stride", 0);
        cfg.output.vtk = get_or<bool>(jo, "output", "vtk", true);
        cfg.output.energy_trace = get_or<bool>(jo, "output", "energy_trace", true);
        cfg.output.dump_matrices = get_or<bool>(jo, "output", "dump_matrices", false);
    }
    cfg.threads = get_or<int>(j, "config", "threads", 1);
    return cfg;
}

inline ScenarioConfig ScenarioConfig::from_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& err) {
        throw ConfigError(std::string("config parse error: ") + err.what());
    }
    return from_json(j);
}

struct RunSummary {
    int steps = 0;
    double final_energy = 0.0;
    double initial_energy = 0.0;
    double reference_energy = 0.0; // projected initial data
    std::optional<ErrorReport> errors;
    double wall_time = 0.0;
    std::vector<std::string> manifest;
    std::vector<double> energy_history;
};

// Assembled discrete problem, reusable across runs on the same mesh.
struct DiscreteProblem {
    PolygonalMesh mesh;
    std::unique_ptr<DofMap> dofmap;
    std::vector<ElementOps> ops;
    GlobalSystem sys;
    MeshQualityReport quality;

    static DiscreteProblem build(const ScenarioConfig& cfg)
    {
        DiscreteProblem pb;
        pb.mesh = cfg.mesh.build();
        apply_boundary_rule(pb.mesh, cfg.boundary);
        pb.quality = validate(pb.mesh);
        pb.dofmap = std::make_unique<DofMap>(pb.mesh, cfg.k);

        std::vector<std::unique_ptr<ElementOps>> slots(pb.mesh.n_cells());
        parallel_for(pb.mesh.n_cells(), cfg.threads, [&](std::size_t c) {
            slots[c] = std::make_unique<ElementOps>(
                ElementGeometry::from_mesh(pb.mesh, static_cast<int>(c)), cfg.k);
        });
        pb.ops.reserve(slots.size());
        for (auto& s : slots) pb.ops.push_back(std::move(*s));

        pb.sys = assemble(pb.mesh, *pb.dofmap, pb.ops, cfg.material);
        return pb;
    }
};

inline RunSummary run_scenario(const ScenarioConfig& cfg, DiscreteProblem* prebuilt = nullptr)
{
    const auto t_start = std::chrono::steady_clock::now();
    std::optional<DiscreteProblem> own;
    if (!prebuilt) {
        own.emplace(DiscreteProblem::build(cfg));
        prebuilt = &*own;
    }
    DiscreteProblem& pb = *prebuilt;
    const ScenarioData& data = find_scenario_data(cfg.data);
    const BoundaryData bdata = BoundaryData::from_scenario(data);

    namespace fs = std::filesystem;
    RunSummary summary;
    const bool want_output = cfg.output.energy_trace || cfg.output.snapshot_stride > 0 ||
                             cfg.output.dump_matrices;
    if (want_output) fs::create_directories(cfg.output.dir);
    if (cfg.output.dump_matrices) {
        dump_system(pb.sys, cfg.output.dir);
        for (const char* m : {"M.mtx", "N.mtx", "B.mtx", "R.mtx"})
            summary.manifest.push_back(cfg.output.dir + "/" + m);
    }

    WaveState state = init_state(pb.mesh, *pb.dofmap, pb.ops, pb.sys, data.u_exact, data.p_exact);
    summary.initial_energy = state.energy;
    summary.reference_energy =
        projected_initial_energy(pb.mesh, pb.ops, cfg.material, data.u_exact, data.p_exact);

    const int n_steps = cfg.stepping.n_steps();
    std::unique_ptr<EnergyTraceWriter> trace;
    if (cfg.output.energy_trace) {
        const std::string path = cfg.output.dir + "/energy.csv";
        trace = std::make_unique<EnergyTraceWriter>(path);
        summary.manifest.push_back(path);
        trace->record(0, state);
    }
    summary.energy_history.push_back(state.energy);

    auto snapshot = [&](int step) {
        if (cfg.output.snapshot_stride <= 0 || !cfg.output.vtk) return;
        if (step % cfg.output.snapshot_stride != 0) return;
        const std::string points =
            cfg.output.dir + "/p_points_" + std::to_string(step) + ".vtk";
        const std::string cells = cfg.output.dir + "/fields_" + std::to_string(step) + ".vtk";
        write_vtk_pressure_points(pb.mesh, *pb.dofmap, pb.ops, state, points);
        write_vtk_cells(pb.mesh, *pb.dofmap, pb.ops, state, cells);
        summary.manifest.push_back(points);
        summary.manifest.push_back(cells);
    };
    snapshot(0);

    auto loads_at = [&](double t) {
        return load_and_boundary(pb.mesh, *pb.dofmap, pb.ops, cfg.material, bdata, t);
    };

    if (cfg.stepping.scheme == Scheme::theta) {
        ThetaStepper stepper(pb.sys, cfg.stepping.theta, cfg.stepping.tau,
                             cfg.stepping.use_iterative, cfg.stepping.solver_tol);
        Loads prev = loads_at(0.0);
        for (int s = 1; s <= n_steps; ++s) {
            Loads next = loads_at(s * cfg.stepping.tau);
            state = stepper.step(state, prev, next);
            prev = std::move(next);
            if (trace) trace->record(s, state);
            summary.energy_history.push_back(state.energy);
            snapshot(s);
        }
    } else {
        SymplecticStepper stepper(pb.sys, cfg.stepping.tau);
        Loads prev = loads_at(0.0);
        for (int s = 1; s <= n_steps; ++s) {
            Loads next = loads_at(s * cfg.stepping.tau);
            state = stepper.step(state, prev, next);
            prev = std::move(next);
            if (trace) trace->record(s, state);
            summary.energy_history.push_back(state.energy);
            snapshot(s);
        }
    }

    summary.steps = n_steps;
    summary.final_energy = state.energy;
    if (data.has_exact) {
        ErrorReport rep = compute_errors(pb.mesh, *pb.dofmap, pb.ops, cfg.material, state,
                                         data.u_exact, data.p_exact);
        rep.h = pb.quality.h;
        summary.errors = rep;
    }
    summary.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    if (want_output) {
        json js;
        js["steps"] = summary.steps;
        js["final_energy"] = summary.final_energy;
        js["initial_energy"] = summary.initial_energy;
        js["reference_energy"] = summary.reference_energy;
        js["wall_time"] = summary.wall_time;
        js["manifest"] = summary.manifest;
        if (summary.errors) {
            js["errors"] = {{"e_u", summary.errors->e_u},
                            {"e_p", summary.errors->e_p},
                            {"e_energy", summary.errors->e_energy},
                            {"h", summary.errors->h}};
        }
        const std::string path = cfg.output.dir + "/summary.json";
        std::ofstream os(path);
        os << js.dump(2) << "\n";
        summary.manifest.push_back(path);
    }
    return summary;
}

// Final state of a run without any file output, for probing tests.
inline WaveState run_to_final_state(const ScenarioConfig& cfg, DiscreteProblem& pb)
{
    const ScenarioData& data = find_scenario_data(cfg.data);
    const BoundaryData bdata = BoundaryData::from_scenario(data);
    WaveState state = init_state(pb.mesh, *pb.dofmap, pb.ops, pb.sys, data.u_exact, data.p_exact);
    const int n_steps = cfg.stepping.n_steps();
    auto loads_at = [&](double t) {
        return load_and_boundary(pb.mesh, *pb.dofmap, pb.ops, cfg.material, bdata, t);
    };
    Loads prev = loads_at(0.0);
    if (cfg.stepping.scheme == Scheme::theta) {
        ThetaStepper stepper(pb.sys, cfg.stepping.theta, cfg.stepping.tau,
                             cfg.stepping.use_iterative, cfg.stepping.solver_tol);
        for (int s = 1; s <= n_steps; ++s) {
            Loads next = loads_at(s * cfg.stepping.tau);
            state = stepper.step(state, prev, next);
            prev = std::move(next);
        }
    } else {
        SymplecticStepper stepper(pb.sys, cfg.stepping.tau);
        for (int s = 1; s <= n_steps; ++s) {
            Loads next = loads_at(s * cfg.stepping.tau);
            state = stepper.step(state, prev, next);
            prev = std::move(next);
        }
    }
    return state;
}

} // namespace polywave
