#include "expfit/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace expfit {

double broken_h1_error(const Solution& sol, const VectorField2& exact_grad) {
    const GlobalSystem& sys = sol.system();
    const auto& quad = sys.problem.tri;
    double sum = 0.0;
    for (int t = 0; t < sys.mesh->num_triangles(); ++t) {
        const AffineMap& map = sys.maps[static_cast<size_t>(t)];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Vec2& xi = quad.points[q];
            const Vec2 p = map.to_physical(xi);
            const Vec2 diff = exact_grad(p.x(), p.y()) - sol.grad_rho_on_element(t, xi);
            sum += quad.weights[q] * map.detB * diff.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

double l2_error(const Solution& sol, const ScalarField2& exact_rho, ErrorField field) {
    const GlobalSystem& sys = sol.system();
    const auto& quad = sys.problem.tri;
    const double beta = sys.problem.beta;
    const ScalarField2& phi = sys.problem.phi;
    double sum = 0.0;
    for (int t = 0; t < sys.mesh->num_triangles(); ++t) {
        const AffineMap& map = sys.maps[static_cast<size_t>(t)];
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const Vec2& xi = quad.points[q];
            const Vec2 p = map.to_physical(xi);
            double diff = exact_rho(p.x(), p.y()) - sol.rho_on_element(t, xi);
            if (field == ErrorField::U) diff *= std::exp(-beta * phi(p.x(), p.y()));
            sum += quad.weights[q] * map.detB * diff * diff;
        }
    }
    return std::sqrt(sum);
}

std::string ErrorReport::csv() const {
    std::ostringstream out;
    out << "h,dofs,err_h1_broken,err_l2_rho,err_l2_u,rate_h1\n";
    char buf[160];
    for (size_t i = 0; i < rows.size(); ++i) {
        const ErrorRow& r = rows[i];
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,", r.h, r.dofs, r.err_h1,
                      r.err_l2_rho, r.err_l2_u);
        out << buf;
        if (i > 0) {
            std::snprintf(buf, sizeof buf, "%.17g", r.rate_h1);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string ErrorReport::pretty() const {
    std::ostringstream out;
    out << "      h      dofs   err_h1_broken    err_l2_rho      err_l2_u   rate_h1\n";
    char buf[160];
    for (size_t i = 0; i < rows.size(); ++i) {
        const ErrorRow& r = rows[i];
        std::snprintf(buf, sizeof buf, "%9.5f %8d   %13.6e %13.6e %13.6e", r.h, r.dofs, r.err_h1,
                      r.err_l2_rho, r.err_l2_u);
        out << buf;
        if (i > 0) {
            std::snprintf(buf, sizeof buf, "   %7.3f", r.rate_h1);
            out << buf;
        } else {
            out << "         -";
        }
        out << '\n';
    }
    return out.str();
}

ErrorReport convergence_study(ProblemSpec problem, int n0,
                              const std::vector<std::string>& dirichlet_sides, int levels,
                              const SolveOptions& opts) {
    if (levels < 2) throw Error("convergence study needs at least two levels");
    if (!problem.exact_rho || !problem.exact_grad_rho)
        throw Error("convergence study requires exact_rho and exact_grad_rho");

    ErrorReport report;
    int n = n0;
    for (int level = 0; level < levels; ++level, n *= 2) {
        const Mesh mesh = generate_unit_square(n, dirichlet_sides);
        problem.mesh = &mesh;
        const Solution sol = solve(assemble(problem), opts);

        ErrorRow row;
        row.h = std::sqrt(2.0) / n;
        row.dofs = sol.system().dofs.count;
        row.err_h1 = broken_h1_error(sol, problem.exact_grad_rho);
        row.err_l2_rho = l2_error(sol, problem.exact_rho, ErrorField::Rho);
        row.err_l2_u = l2_error(sol, problem.exact_rho, ErrorField::U);
        if (!report.rows.empty())
            row.rate_h1 = std::log2(report.rows.back().err_h1 / row.err_h1);
        report.rows.push_back(row);
    }
    problem.mesh = nullptr;
    return report;
}

} // namespace expfit
