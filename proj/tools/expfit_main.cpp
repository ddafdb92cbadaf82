// Command-line driver: solve, basis, converge, pathdiff, mesh-info.

#include "expfit/analysis.hpp"
#include "expfit/config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace expfit;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

void write_manifest(const RunConfig& cfg) {
    write_file(fs::path(cfg.out_dir) / "run.manifest", serialize_config(cfg));
}

struct CommonFlags {
    std::string config_path;
    std::string out_override;
    int levels_override = -1;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_levels) {
    cmd->add_option("--config", flags.config_path, "configuration file")->required();
    cmd->add_option("--out", flags.out_override, "override output.dir");
    cmd->add_flag("--serial", flags.serial, "deterministic serial mode");
    if (with_levels)
        cmd->add_option("--levels", flags.levels_override, "number of refinement levels");
}

RunConfig load(const CommonFlags& flags, const std::string& command) {
    RunConfig cfg = parse_config_file(flags.config_path);
    cfg.command = command;
    if (!flags.out_override.empty()) cfg.out_dir = flags.out_override;
    if (flags.levels_override > 0) cfg.levels = flags.levels_override;
    if (flags.serial) cfg.serial = true;
    return cfg;
}

// resolve the node-set default so the manifest is fully explicit
void resolve_defaults(RunConfig& cfg) {
    const MethodSetup m = method_from_config(cfg);
    cfg.nodeset = node_set_kind_name(m.nodeset);
}

int cmd_solve(const CommonFlags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load(flags, "solve");
    validate_config(cfg, /*needs_mesh=*/true, /*needs_sources=*/true);
    resolve_defaults(cfg);
    fs::create_directories(cfg.out_dir);

    const Mesh mesh = mesh_from_config(cfg);
    const ProblemSpec problem = problem_from_config(cfg, &mesh);
    const SolveOptions opts{cfg.tol, cfg.max_iter, cfg.dense_threshold};
    const Solution sol = solve(assemble(problem), opts);

    // sample on a grid_n x grid_n lattice over the bounding box
    double xmin = mesh.vertex(0).x(), xmax = xmin, ymin = mesh.vertex(0).y(), ymax = ymin;
    for (int v = 1; v < mesh.num_vertices(); ++v) {
        xmin = std::min(xmin, mesh.vertex(v).x());
        xmax = std::max(xmax, mesh.vertex(v).x());
        ymin = std::min(ymin, mesh.vertex(v).y());
        ymax = std::max(ymax, mesh.vertex(v).y());
    }
    std::string csv = "x,y,rho,u,Jx,Jy\n";
    double max_J = 0.0;
    for (int j = 0; j < cfg.grid_n; ++j)
        for (int i = 0; i < cfg.grid_n; ++i) {
            const Vec2 p(xmin + (xmax - xmin) * i / (cfg.grid_n - 1),
                         ymin + (ymax - ymin) * j / (cfg.grid_n - 1));
            try {
                const Solution::Values v = sol.evaluate(p);
                max_J = std::max(max_J, v.J.norm());
                csv += g17(p.x()) + "," + g17(p.y()) + "," + g17(v.rho) + "," + g17(v.u) + "," +
                       g17(v.J.x()) + "," + g17(v.J.y()) + "\n";
            } catch (const Error&) {
                // lattice point outside the domain
            }
        }
    write_file(fs::path(cfg.out_dir) / "solution.csv", csv);

    std::ostringstream summary;
    summary << "dofs = " << sol.system().dofs.count << "\n"
            << "free_dofs = " << sol.system().dofs.num_free() << "\n"
            << "solver = " << (sol.used_dense_solver() ? "dense_cholesky" : "pcg") << "\n"
            << "iterations = " << sol.iterations() << "\n"
            << "residual = " << g17(sol.residual()) << "\n"
            << "max_J = " << g17(max_J) << "\n";
    write_file(fs::path(cfg.out_dir) / "summary.txt", summary.str());
    write_manifest(cfg);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << summary.str() << "wall_time = " << wall << " s\n";
    return 0;
}

std::string basis_file_header_2d() { return "x,y,rho_j,u_j\n"; }

int cmd_basis(const CommonFlags& flags) {
    RunConfig cfg = load(flags, "basis");
    validate_config(cfg, /*needs_mesh=*/false, /*needs_sources=*/false);
    resolve_defaults(cfg);
    fs::create_directories(cfg.out_dir);

    const MethodSetup m = method_from_config(cfg);
    const Expression phi = Expression::parse(cfg.phi);
    const SegmentRule seg = SegmentRule::gauss(cfg.segment_order);
    const int g = cfg.grid_n;

    if (m.three_d) {
        const FittedBasis3 fb = build_fitted_basis_3d(rt0_basis_3d(), node_set_3d(m.nodeset),
                                                      phi.field3(), cfg.beta, cfg.D, seg, m.shift);
        for (int j = 0; j < fb.size(); ++j) {
            std::string csv = "x,y,z,rho_j,u_j\n";
            for (int c = 0; c < g; ++c)
                for (int b = 0; b < g; ++b)
                    for (int a = 0; a < g; ++a) {
                        const Vec3 p(double(a) / (g - 1), double(b) / (g - 1), double(c) / (g - 1));
                        if (p.sum() > 1.0 + 1e-12) continue;
                        csv += g17(p.x()) + "," + g17(p.y()) + "," + g17(p.z()) + "," +
                               g17(fb.rho(j, p)) + "," + g17(fb.u(j, p)) + "\n";
                    }
            write_file(fs::path(cfg.out_dir) / ("basis_" + std::to_string(j + 1) + ".csv"), csv);
        }
        write_manifest(cfg);
        std::cout << "wrote " << fb.size() << " basis surface files to " << cfg.out_dir << "\n";
        return 0;
    }

    FitSetup setup;
    setup.variant = m.variant;
    setup.path = m.path;
    setup.basis = m.order == 0 ? rt0_basis_2d() : rt1_basis_2d();
    setup.nodes = node_set_2d(m.order, m.nodeset);
    setup.phi = phi.field2();
    setup.beta = cfg.beta;
    setup.D = cfg.D;
    setup.seg = seg;
    setup.shift = m.shift;
    setup.start_override = m.start;

    Eigen::MatrixXd F = assemble_fit_matrix(setup);
    try {
        (void)solve_element_coefficients(F);
    } catch (const SingularMatrixError& e) {
        std::cout << "assembled fit matrix (rows = nodes):\n";
        for (Eigen::Index r = 0; r < F.rows(); ++r) {
            const Vec2& node = setup.nodes.points[static_cast<size_t>(r)];
            std::printf("  node (%g, %g): ", node.x(), node.y());
            for (Eigen::Index c = 0; c < F.cols(); ++c) std::printf(" %12.8f", F(r, c));
            std::printf("\n");
        }
        std::cout << "error: " << e.what() << "\n";
        return 1;
    }

    const FittedBasis fb = build_fitted_basis(setup);
    for (int j = 0; j < fb.size(); ++j) {
        std::string csv = basis_file_header_2d();
        for (int b = 0; b < g; ++b)
            for (int a = 0; a < g; ++a) {
                const Vec2 p(double(a) / (g - 1), double(b) / (g - 1));
                if (p.x() + p.y() > 1.0 + 1e-12) continue;
                csv += g17(p.x()) + "," + g17(p.y()) + "," + g17(fb.rho(j, p)) + "," +
                       g17(fb.u(j, p)) + "\n";
            }
        write_file(fs::path(cfg.out_dir) / ("basis_" + std::to_string(j + 1) + ".csv"), csv);
    }
    write_manifest(cfg);
    std::cout << "wrote " << fb.size() << " basis surface files to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_converge(const CommonFlags& flags) {
    RunConfig cfg = load(flags, "converge");
    validate_config(cfg, /*needs_mesh=*/true, /*needs_sources=*/true);
    if (cfg.unit_square_n <= 0)
        throw ConfigError("convergence studies run on the generated unit square",
                          "mesh.unit_square_n");
    if (cfg.exact_rho.empty()) throw ConfigError("missing required key", "problem.exact_rho");
    if (cfg.exact_grad_rho_x.empty())
        throw ConfigError("missing required key", "problem.exact_grad_rho_x");
    if (cfg.exact_grad_rho_y.empty())
        throw ConfigError("missing required key", "problem.exact_grad_rho_y");
    resolve_defaults(cfg);
    fs::create_directories(cfg.out_dir);

    const ProblemSpec problem = problem_from_config(cfg, nullptr);
    const SolveOptions opts{cfg.tol, cfg.max_iter, cfg.dense_threshold};
    const ErrorReport report =
        convergence_study(problem, cfg.unit_square_n, cfg.dirichlet_sides, cfg.levels, opts);

    write_file(fs::path(cfg.out_dir) / "convergence.csv", report.csv());
    write_manifest(cfg);
    std::cout << report.pretty();
    return 0;
}

int cmd_pathdiff(const CommonFlags& flags) {
    RunConfig cfg = load(flags, "pathdiff");
    validate_config(cfg, /*needs_mesh=*/false, /*needs_sources=*/false);
    const MethodSetup m = method_from_config(cfg);
    if (m.three_d || m.order != 0)
        throw ConfigError("path-difference demo uses the first-order 2-D space", "method.space");
    resolve_defaults(cfg);
    fs::create_directories(cfg.out_dir);

    const Expression phi = Expression::parse(cfg.phi);
    const SegmentRule seg = SegmentRule::gauss(cfg.segment_order);

    auto make = [&](Variant variant, PathRule path) {
        FitSetup s;
        s.variant = variant;
        s.path = path;
        s.basis = rt0_basis_2d();
        s.nodes = node_set_2d(0, m.nodeset);
        s.phi = phi.field2();
        s.beta = cfg.beta;
        s.D = cfg.D;
        s.seg = seg;
        s.shift = m.shift;
        s.start_override = m.start;
        return build_fitted_basis(s);
    };

    struct Case {
        const char* file;
        FittedBasis a, b;
    };
    Case cases[] = {
        {"pathdiff_slotboom.csv", make(Variant::Slotboom, PathRule::XThenY),
         make(Variant::Slotboom, PathRule::YThenX)},
        {"pathdiff_direct.csv", make(Variant::DirectU, PathRule::XThenY),
         make(Variant::DirectU, PathRule::YThenX)},
        {"pathdiff_direct_line.csv", make(Variant::DirectU, PathRule::StraightLine),
         make(Variant::DirectU, PathRule::XThenY)},
    };

    const int g = cfg.grid_n;
    for (const Case& c : cases) {
        std::string csv = "x,y,du1\n";
        double max_diff = 0.0;
        for (int b = 0; b < g; ++b)
            for (int a = 0; a < g; ++a) {
                const Vec2 p(double(a) / (g - 1), double(b) / (g - 1));
                if (p.x() + p.y() > 1.0 + 1e-12) continue;
                const double du = c.a.u(0, p) - c.b.u(0, p);
                max_diff = std::max(max_diff, std::fabs(du));
                csv += g17(p.x()) + "," + g17(p.y()) + "," + g17(du) + "\n";
            }
        double node_diff = 0.0;
        for (int j = 0; j < c.a.size(); ++j) {
            const Vec2& node = c.a.setup().nodes.points[static_cast<size_t>(j)];
            node_diff = std::max(node_diff, std::fabs(c.a.u(0, node) - c.b.u(0, node)));
        }
        write_file(fs::path(cfg.out_dir) / c.file, csv);
        std::printf("%-26s max |du1| = %.6e, at nodes = %.6e\n", c.file, max_diff, node_diff);
    }

    // For a linear potential, compare the averaged construction of u_1
    // against its closed form.
    {
        const double c0 = phi(0.0, 0.0);
        const double a = phi(1.0, 0.0) - c0;
        const double b = phi(0.0, 1.0) - c0;
        bool linear = a != 0.0 && b != 0.0;
        for (int k = 0; k < 20 && linear; ++k) {
            const double x = 0.05 * k, y = 0.05 * (19 - k);
            if (std::fabs(phi(x, y) - (a * x + b * y + c0)) > 1e-12) linear = false;
        }
        if (linear) {
            const FittedBasis avg = make(Variant::DirectU, PathRule::AverageXYYX);
            const double m1 = avg.coeffs()(0, 0), m2 = avg.coeffs()(1, 0);
            const double u0 = avg.constant(0);
            double dev = 0.0, dev_matched = 0.0;
            for (int j = 0; j < 10; ++j)
                for (int i = 0; i < 10; ++i) {
                    const Vec2 p(i / 9.0, j / 9.0);
                    if (p.x() + p.y() > 1.0 + 1e-12) continue;
                    const double uq = avg.u(0, p);
                    dev = std::max(dev, std::fabs(uq - linear_phi_closed_form(
                                                           a, b, cfg.beta, cfg.D, m1, m2, u0,
                                                           p.x(), p.y())));
                    dev_matched = std::max(
                        dev_matched, std::fabs(uq - linear_phi_closed_form_matched(
                                                        a, b, cfg.beta, cfg.D, m1, m2, u0,
                                                        p.x(), p.y())));
                }
            std::printf("linear potential closed form: max |u1 - closed| = %.6e "
                        "(component-matched form: %.6e)\n",
                        dev, dev_matched);
        }
    }
    write_manifest(cfg);
    return 0;
}

int cmd_mesh_info(const CommonFlags& flags) {
    RunConfig cfg = load(flags, "mesh-info");
    const bool file = !cfg.mesh_file.empty();
    const bool square = cfg.unit_square_n > 0;
    if (file == square)
        throw ConfigError("exactly one of mesh.file and mesh.unit_square_n is required", "mesh");
    const Mesh mesh = mesh_from_config(cfg);
    int nd = 0, nn = 0;
    for (int i = 0; i < mesh.num_boundary_edges(); ++i)
        (mesh.boundary_edge(i).marker == Marker::Dirichlet ? nd : nn)++;
    std::cout << "vertices = " << mesh.num_vertices() << "\n"
              << "triangles = " << mesh.num_triangles() << "\n"
              << "edges = " << mesh.num_edges() << "\n"
              << "boundary_edges = " << mesh.num_boundary_edges() << " (D: " << nd
              << ", N: " << nn << ")\n"
              << "h_max = " << g17(mesh.max_edge_length()) << "\n"
              << "total_area = " << g17(mesh.total_area()) << "\n"
              << "conforming = yes\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponentially fitted nonconforming finite elements for the 2-D steady "
                 "drift-diffusion equation"};
    app.require_subcommand(1);

    CommonFlags solve_flags, basis_flags, converge_flags, pathdiff_flags, info_flags;
    add_common(app.add_subcommand("solve", "solve a boundary value problem"), solve_flags, false);
    add_common(app.add_subcommand("basis", "sample fitted basis functions on the reference element"),
               basis_flags, false);
    add_common(app.add_subcommand("converge", "manufactured-solution refinement study"),
               converge_flags, true);
    add_common(app.add_subcommand("pathdiff", "path-dependence of the fitted basis"),
               pathdiff_flags, false);
    add_common(app.add_subcommand("mesh-info", "print mesh statistics"), info_flags, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("solve")) return cmd_solve(solve_flags);
        if (app.got_subcommand("basis")) return cmd_basis(basis_flags);
        if (app.got_subcommand("converge")) return cmd_converge(converge_flags);
        if (app.got_subcommand("pathdiff")) return cmd_pathdiff(pathdiff_flags);
        if (app.got_subcommand("mesh-info")) return cmd_mesh_info(info_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
