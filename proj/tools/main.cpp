#include "fsiplate/config.hpp"
#include "fsiplate/elements.hpp"
#include "fsiplate/spectral.hpp"
#include "fsiplate/timestepper.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fsiplate;

namespace {

std::ofstream open_output(const fs::path& path, const std::string& columns,
                          const std::string& hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cli: cannot open output file '" + path.string() + "'");
    out << "# config=" << hash << "\n" << columns << "\n";
    return out;
}

std::string time_label(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

void write_energy_csv(const SimulationResult& sim, const fs::path& dir, const std::string& hash) {
    auto out = open_output(dir / "energy.csv",
                           "t,plate_potential,plate_kinetic,fluid_kinetic,total,dissipation,"
                           "div_residual,es_omega1_drift",
                           hash);
    for (const auto& r : sim.energy)
        out << format_g17(r.t) << ',' << format_g17(r.plate_potential) << ','
            << format_g17(r.plate_kinetic) << ',' << format_g17(r.fluid_kinetic) << ','
            << format_g17(r.total) << ',' << format_g17(r.dissipation) << ','
            << format_g17(r.div_residual) << ',' << format_g17(r.es_omega1_drift) << '\n';
}

void write_snapshots(const SimulationResult& sim, const fs::path& dir, const std::string& hash) {
    const ReducedBlocks& rb = sim.blocks;
    for (size_t i = 0; i < sim.snapshots.size(); ++i) {
        const FsiState& s = sim.snapshots[i];
        const std::string label = time_label(sim.snapshot_times[i]);

        auto plate_out = open_output(dir / ("plate_" + label + ".csv"), "x,w,w_t", hash);
        const Eigen::VectorXd w1_full = rb.R * s.omega1;
        const Eigen::VectorXd w2_full = rb.R * s.omega2;
        const int samples = 201;
        for (int k = 0; k < samples; ++k) {
            const double x = static_cast<double>(k) / (samples - 1);
            plate_out << format_g17(x) << ','
                      << format_g17(evaluate_plate_field(sim.plate, w1_full, x)) << ','
                      << format_g17(evaluate_plate_field(sim.plate, w2_full, x)) << '\n';
        }

        auto fluid_out = open_output(dir / ("fluid_" + label + ".csv"), "x,y,u1,u2,p", hash);
        const Eigen::VectorXd u1 = rb.P * s.alpha1;
        const Eigen::VectorXd u2 = rb.P * s.alpha2 + rb.W * s.omega2;
        Eigen::VectorXd p_vertex = s.q.array() + s.mu;
        for (int id = 0; id < sim.mesh.p2_node_count(); ++id) {
            const Eigen::Vector2d xy = sim.mesh.p2_node(id);
            double p;
            if (id < sim.mesh.vertex_count()) {
                p = p_vertex(id);
            } else {
                const int e = id - sim.mesh.vertex_count();
                p = 0.5 * (p_vertex(sim.mesh.edges(e, 0)) + p_vertex(sim.mesh.edges(e, 1)));
            }
            fluid_out << format_g17(xy.x()) << ',' << format_g17(xy.y()) << ','
                      << format_g17(u1(id)) << ',' << format_g17(u2(id)) << ','
                      << format_g17(p) << '\n';
        }
    }
}

int cmd_simulate(const SimulationConfig& cfg) {
    const std::string hash = config_hash(cfg);
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    const SimulationResult sim = run_simulation(cfg);
    write_energy_csv(sim, dir, hash);
    write_snapshots(sim, dir, hash);
    const EnergyRecord& last = sim.energy.back();
    std::cout << "simulate: n=" << cfg.n << " plate_elements=" << cfg.plate_elements
              << " steps=" << sim.steps << " final_total_energy=" << format_g17(last.total)
              << "\n";
    std::cout << "simulate: wrote energy.csv and " << sim.snapshots.size()
              << " snapshot pair(s) to " << dir.string() << "\n";
    return 0;
}

int cmd_resolvent_sweep(const SimulationConfig& cfg) {
    const std::string hash = config_hash(cfg);
    const fs::path dir(cfg.out);
    fs::create_directories(dir);

    const Mesh2D mesh = build_fluid_mesh(cfg.n);
    const PlateMesh plate = build_plate_mesh(cfg.plate_elements);
    const DofMap dofs = build_dof_map(mesh, plate);
    const ReducedBlocks blocks = apply_constraints(assemble_all(mesh, plate, dofs), dofs);
    const GeneratorSystem gen = build_generator(blocks, cfg.eta);

    const Eigen::VectorXd grid = log_spaced(cfg.beta_min, cfg.beta_max, cfg.beta_count);
    const auto samples = resolvent_sweep(gen, grid, cfg.workers);

    auto sweep_out = open_output(dir / "sweep.csv", "beta,norm", hash);
    for (const auto& s : samples)
        sweep_out << format_g17(s.beta) << ',' << format_g17(s.norm) << '\n';

    const GevreyFit fit = fit_decay_exponent(samples, cfg.beta_min, cfg.beta_max);
    auto fit_out = open_output(dir / "fit.txt", "# key=value", hash);
    fit_out << "alpha_hat=" << format_g17(fit.alpha_hat) << "\n"
            << "delta=" << format_g17(fit.delta) << "\n"
            << "r_squared=" << format_g17(fit.r_squared) << "\n"
            << "beta_min=" << format_g17(fit.beta_min) << "\n"
            << "beta_max=" << format_g17(fit.beta_max) << "\n"
            << "samples_used=" << fit.samples_used << "\n"
            << "eta=" << (cfg.eta ? format_g17(*cfg.eta) : "none") << "\n"
            << "n=" << cfg.n << "\n"
            << "plate_elements=" << cfg.plate_elements << "\n"
            << "note=discrete resolvent tracks the continuous one only below the mesh "
               "frequency cutoff; keep beta_max within the resolved range\n";
    std::cout << "resolvent-sweep: " << samples.size() << " samples, alpha_hat="
              << format_g17(fit.alpha_hat) << " delta=" << format_g17(fit.delta)
              << " r_squared=" << format_g17(fit.r_squared) << "\n";
    std::cout << "resolvent-sweep: wrote sweep.csv and fit.txt to " << dir.string() << "\n";
    return 0;
}

int cmd_mesh_info(const SimulationConfig& cfg) {
    const std::string hash = config_hash(cfg);
    const fs::path dir(cfg.out);
    fs::create_directories(dir);

    const Mesh2D mesh = build_fluid_mesh(cfg.n);
    const PlateMesh plate = build_plate_mesh(cfg.plate_elements);
    const DofMap dofs = build_dof_map(mesh, plate);

    {
        std::ofstream nodes(dir / "nodes.csv");
        write_mesh_nodes_csv(mesh, nodes, "config=" + hash);
        std::ofstream tris(dir / "triangles.csv");
        write_mesh_triangles_csv(mesh, tris, "config=" + hash);
    }
    std::cout << "mesh-info: n=" << cfg.n << " triangles=" << mesh.triangle_count()
              << " vertices=" << mesh.vertex_count() << " edges=" << mesh.edge_count()
              << " p2_nodes=" << mesh.p2_node_count() << "\n";
    std::cout << "mesh-info: plate_elements=" << plate.elements
              << " lagrange_nodes=" << plate.lagrange_count()
              << " plate_dofs=" << plate.dof_count() << "\n";
    std::cout << "mesh-info: interface_nodes=" << dofs.interface_pairs.size()
              << " interior_nodes=" << dofs.n_interior
              << " reduced_system_size=" << dofs.system_size() << "\n";
    std::cout << "mesh-info: wrote nodes.csv and triangles.csv to " << dir.string() << "\n";
    return 0;
}

int cmd_element_oracles(const SimulationConfig& cfg) {
    const std::string hash = config_hash(cfg);
    const fs::path dir(cfg.out);
    fs::create_directories(dir);

    Eigen::Matrix<double, 3, 2> ref;
    ref << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    const TriangleGeometry g = triangle_geometry(ref);

    auto dump = [&](const std::string& name, const Eigen::MatrixXd& A) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cli: cannot open output file '" + name + "'");
        write_coordinate_file(A, out, "config=" + hash);
    };
    dump("p2_mass.txt", p2_element_mass(g));
    dump("p2_stiffness.txt", p2_element_stiffness(g));
    dump("p2_divergence_x.txt", divergence_element(g, 0));
    dump("p2_divergence_y.txt", divergence_element(g, 1));
    dump("hermite_mass.txt", hermite_element_mass(1.0));
    dump("hermite_stiffness.txt", hermite_element_stiffness(1.0));
    dump("hermite_load.txt", hermite_element_load(1.0));
    std::cout << "element-oracles: wrote reference element matrices to " << dir.string() << "\n";
    return 0;
}

void usage(std::ostream& out) {
    out << "usage: fsiplate <simulate|resolvent-sweep|mesh-info|element-oracles> [options]\n\n"
        << config_help();
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        usage(std::cout);
        return args.empty() ? 2 : 0;
    }
    const std::string cmd = args[0];
    std::vector<std::string> rest(args.begin() + 1, args.end());
    if (!rest.empty() && rest[0] == "--help") {
        usage(std::cout);
        return 0;
    }
    try {
        const SimulationConfig cfg = parse_config(rest);
        if (cmd == "simulate") return cmd_simulate(cfg);
        if (cmd == "resolvent-sweep") return cmd_resolvent_sweep(cfg);
        if (cmd == "mesh-info") return cmd_mesh_info(cfg);
        if (cmd == "element-oracles") return cmd_element_oracles(cfg);
        std::cerr << "error: unknown subcommand '" << cmd << "'\n";
        usage(std::cerr);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
