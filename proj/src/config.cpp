#include "expfit/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace expfit {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value '" + value + "'", key);
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value '" + value + "'", key);
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // comments start with '#' or ';' outside quotes
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            else if (!quoted && (line[i] == '#' || line[i] == ';')) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        const std::string full = section + "." + key;

        if (full == "problem.D") { cfg.D = to_double(full, value); cfg.has_D = true; }
        else if (full == "problem.beta") { cfg.beta = to_double(full, value); cfg.has_beta = true; }
        else if (full == "problem.phi") cfg.phi = value;
        else if (full == "problem.f") cfg.f = value;
        else if (full == "problem.g") cfg.g = value;
        else if (full == "problem.exact_rho") cfg.exact_rho = value;
        else if (full == "problem.exact_grad_rho_x") cfg.exact_grad_rho_x = value;
        else if (full == "problem.exact_grad_rho_y") cfg.exact_grad_rho_y = value;
        else if (full == "mesh.file") cfg.mesh_file = value;
        else if (full == "mesh.unit_square_n") cfg.unit_square_n = to_int(full, value);
        else if (full == "mesh.dirichlet_sides") cfg.dirichlet_sides = split_list(value);
        else if (full == "method.variant") cfg.variant = value;
        else if (full == "method.space") cfg.space = value;
        else if (full == "method.nodeset") cfg.nodeset = value;
        else if (full == "method.path") cfg.path = value;
        else if (full == "method.shift") cfg.shift = value;
        else if (full == "method.start") cfg.start = value;
        else if (full == "quad.segment_order") cfg.segment_order = to_int(full, value);
        else if (full == "quad.triangle_degree") cfg.triangle_degree = to_int(full, value);
        else if (full == "solver.tol") cfg.tol = to_double(full, value);
        else if (full == "solver.max_iter") cfg.max_iter = to_int(full, value);
        else if (full == "solver.dense_threshold") cfg.dense_threshold = to_int(full, value);
        else if (full == "output.dir") cfg.out_dir = value;
        else if (full == "output.grid_n") cfg.grid_n = to_int(full, value);
        else if (full == "run.command") cfg.command = value;
        else if (full == "run.levels") cfg.levels = to_int(full, value);
        else if (full == "run.serial") cfg.serial = (value == "true" || value == "1" || value == "on");
        else throw ConfigError("unknown configuration key", full);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[problem]\n";
    out << "D = " << fmt(cfg.D) << "\n";
    out << "beta = " << fmt(cfg.beta) << "\n";
    out << "phi = \"" << cfg.phi << "\"\n";
    if (!cfg.f.empty()) out << "f = \"" << cfg.f << "\"\n";
    if (!cfg.g.empty()) out << "g = \"" << cfg.g << "\"\n";
    if (!cfg.exact_rho.empty()) out << "exact_rho = \"" << cfg.exact_rho << "\"\n";
    if (!cfg.exact_grad_rho_x.empty())
        out << "exact_grad_rho_x = \"" << cfg.exact_grad_rho_x << "\"\n";
    if (!cfg.exact_grad_rho_y.empty())
        out << "exact_grad_rho_y = \"" << cfg.exact_grad_rho_y << "\"\n";

    out << "\n[mesh]\n";
    if (!cfg.mesh_file.empty()) out << "file = \"" << cfg.mesh_file << "\"\n";
    if (cfg.unit_square_n > 0) out << "unit_square_n = " << cfg.unit_square_n << "\n";
    if (!cfg.dirichlet_sides.empty()) {
        out << "dirichlet_sides = ";
        for (size_t i = 0; i < cfg.dirichlet_sides.size(); ++i)
            out << (i ? "," : "") << cfg.dirichlet_sides[i];
        out << "\n";
    }

    out << "\n[method]\n";
    out << "variant = " << cfg.variant << "\n";
    out << "space = " << cfg.space << "\n";
    if (!cfg.nodeset.empty()) out << "nodeset = " << cfg.nodeset << "\n";
    out << "path = " << cfg.path << "\n";
    out << "shift = " << cfg.shift << "\n";
    if (!cfg.start.empty()) out << "start = " << cfg.start << "\n";

    out << "\n[quad]\n";
    out << "segment_order = " << cfg.segment_order << "\n";
    out << "triangle_degree = " << cfg.triangle_degree << "\n";

    out << "\n[solver]\n";
    out << "tol = " << fmt(cfg.tol) << "\n";
    out << "max_iter = " << cfg.max_iter << "\n";
    out << "dense_threshold = " << cfg.dense_threshold << "\n";

    out << "\n[output]\n";
    out << "dir = \"" << cfg.out_dir << "\"\n";
    out << "grid_n = " << cfg.grid_n << "\n";

    if (!cfg.command.empty()) {
        out << "\n[run]\n";
        out << "command = " << cfg.command << "\n";
        out << "levels = " << cfg.levels << "\n";
        out << "serial = " << (cfg.serial ? "true" : "false") << "\n";
    }
    return out.str();
}

MethodSetup method_from_config(const RunConfig& cfg) {
    MethodSetup m;
    m.variant = parse_variant(cfg.variant);
    if (cfg.space == "rt0") { m.order = 0; m.three_d = false; }
    else if (cfg.space == "rt1") { m.order = 1; m.three_d = false; }
    else if (cfg.space == "rt0_3d") { m.order = 0; m.three_d = true; }
    else throw ConfigError("unknown space '" + cfg.space + "'", "method.space");

    std::string nodeset = cfg.nodeset;
    if (nodeset.empty())
        nodeset = m.three_d ? "tet_vertices" : (m.order == 0 ? "vertices" : "p2");
    try {
        m.nodeset = parse_node_set_kind(nodeset);
        m.path = parse_path_rule(cfg.path);
    } catch (const Error& e) {
        throw ConfigError(e.what(), "method");
    }
    if (cfg.shift == "on") m.shift = true;
    else if (cfg.shift == "off") m.shift = false;
    else throw ConfigError("shift must be 'on' or 'off'", "method.shift");

    if (!cfg.start.empty()) {
        const auto parts = [&] {
            std::vector<double> v;
            std::istringstream ss(cfg.start);
            std::string item;
            while (std::getline(ss, item, ','))
                v.push_back(to_double("method.start", trim(item)));
            return v;
        }();
        if (parts.size() != 2) throw ConfigError("start must be 'x,y'", "method.start");
        m.start = Vec2(parts[0], parts[1]);
    }
    return m;
}

void validate_config(const RunConfig& cfg, bool needs_mesh, bool needs_sources) {
    if (!cfg.has_D) throw ConfigError("missing required key", "problem.D");
    if (!cfg.has_beta) throw ConfigError("missing required key", "problem.beta");
    if (cfg.phi.empty()) throw ConfigError("missing required key", "problem.phi");
    if (!(cfg.D > 0.0)) throw ConfigError("D must be positive", "problem.D");
    if (!(cfg.beta > 0.0)) throw ConfigError("beta must be positive", "problem.beta");
    if (needs_sources) {
        if (cfg.f.empty()) throw ConfigError("missing required key", "problem.f");
        if (cfg.g.empty()) throw ConfigError("missing required key", "problem.g");
    }
    if (needs_mesh) {
        const bool file = !cfg.mesh_file.empty();
        const bool square = cfg.unit_square_n > 0;
        if (file == square)
            throw ConfigError("exactly one of mesh.file and mesh.unit_square_n is required",
                              "mesh");
    }
    if (cfg.segment_order < 1) throw ConfigError("must be >= 1", "quad.segment_order");
    if (cfg.triangle_degree < 1) throw ConfigError("must be >= 1", "quad.triangle_degree");
    if (!(cfg.tol > 0.0)) throw ConfigError("must be positive", "solver.tol");
    if (cfg.max_iter < 1) throw ConfigError("must be >= 1", "solver.max_iter");
    if (cfg.grid_n < 2) throw ConfigError("must be >= 2", "output.grid_n");

    auto check_expr = [](const std::string& key, const std::string& text) {
        if (text.empty()) return;
        try {
            Expression::parse(text);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("expression does not parse: ") + e.what(), key);
        }
    };
    check_expr("problem.phi", cfg.phi);
    check_expr("problem.f", cfg.f);
    check_expr("problem.g", cfg.g);
    check_expr("problem.exact_rho", cfg.exact_rho);
    check_expr("problem.exact_grad_rho_x", cfg.exact_grad_rho_x);
    check_expr("problem.exact_grad_rho_y", cfg.exact_grad_rho_y);

    method_from_config(cfg);
}

Mesh mesh_from_config(const RunConfig& cfg) {
    if (!cfg.mesh_file.empty()) return load_mesh(cfg.mesh_file);
    return generate_unit_square(cfg.unit_square_n, cfg.dirichlet_sides);
}

ProblemSpec problem_from_config(const RunConfig& cfg, const Mesh* mesh) {
    const MethodSetup m = method_from_config(cfg);
    if (m.three_d) throw ConfigError("the 3-D space supports basis construction only",
                                     "method.space");
    ProblemSpec p;
    p.D = cfg.D;
    p.beta = cfg.beta;
    p.phi = Expression::parse(cfg.phi).field2();
    if (!cfg.f.empty()) p.f = Expression::parse(cfg.f).field2();
    if (!cfg.g.empty()) p.g = Expression::parse(cfg.g).field2();
    if (!cfg.exact_rho.empty()) p.exact_rho = Expression::parse(cfg.exact_rho).field2();
    if (!cfg.exact_grad_rho_x.empty() && !cfg.exact_grad_rho_y.empty()) {
        const Expression gx = Expression::parse(cfg.exact_grad_rho_x);
        const Expression gy = Expression::parse(cfg.exact_grad_rho_y);
        p.exact_grad_rho = [gx, gy](double x, double y) { return Vec2(gx(x, y), gy(x, y)); };
    }
    p.mesh = mesh;
    p.variant = m.variant;
    p.order = m.order;
    p.nodeset = m.nodeset;
    p.path = m.path;
    p.shift = m.shift;
    p.start_override = m.start;
    p.seg = SegmentRule::gauss(cfg.segment_order);
    p.tri = TriangleRule::make(cfg.triangle_degree);
    return p;
}

} // namespace expfit
