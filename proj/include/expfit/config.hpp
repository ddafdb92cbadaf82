#ifndef EXPFIT_CONFIG_HPP
#define EXPFIT_CONFIG_HPP

#include "expfit/assembly.hpp"
#include "expfit/expr.hpp"

#include <string>
#include <vector>

namespace expfit {

/// Parsed INI-style run configuration. Sections: [problem], [mesh],
/// [method], [quad], [solver], [output] and the manifest-only [run].
/// Expression values are plain or double-quoted strings.
struct RunConfig {
    // [problem]
    double D = 0.0;
    double beta = 0.0;
    bool has_D = false, has_beta = false;
    std::string phi, f, g;
    std::string exact_rho, exact_grad_rho_x, exact_grad_rho_y;

    // [mesh]
    std::string mesh_file;
    int unit_square_n = 0;
    std::vector<std::string> dirichlet_sides;

    // [method]
    std::string variant = "slotboom";
    std::string space = "rt0";
    std::string nodeset; // defaults per space when empty
    std::string path = "xy";
    std::string shift = "on";
    std::string start; // optional "x,y"

    // [quad]
    int segment_order = 16;
    int triangle_degree = 8;

    // [solver]
    double tol = 1e-10;
    int max_iter = 10000;
    int dense_threshold = 500;

    // [output]
    std::string out_dir = "out";
    int grid_n = 40;

    // [run] (written into manifests so a rerun needs no extra flags)
    std::string command;
    int levels = 4;
    bool serial = false;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Render the fully resolved configuration; the result parses back via
/// parse_config_text and reproduces the run.
std::string serialize_config(const RunConfig& cfg);

/// Resolved discretization choices.
struct MethodSetup {
    Variant variant = Variant::Slotboom;
    bool three_d = false;
    int order = 0;
    NodeSetKind nodeset = NodeSetKind::Vertices;
    PathRule path = PathRule::XThenY;
    bool shift = true;
    std::optional<Vec2> start;
};

MethodSetup method_from_config(const RunConfig& cfg);

/// Check presence/consistency of the keys a command needs; throws
/// ConfigError naming the offending key. `needs_mesh`/`needs_sources`
/// depend on the subcommand.
void validate_config(const RunConfig& cfg, bool needs_mesh, bool needs_sources);

/// Build the mesh named by [mesh] (file or generated unit square).
Mesh mesh_from_config(const RunConfig& cfg);

/// Assemble a ProblemSpec from the configuration; expressions are parsed
/// here. `mesh` may be null for element-level commands.
ProblemSpec problem_from_config(const RunConfig& cfg, const Mesh* mesh);

} // namespace expfit

#endif
