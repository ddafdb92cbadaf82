#ifndef EXPFIT_ANALYSIS_HPP
#define EXPFIT_ANALYSIS_HPP

#include "expfit/assembly.hpp"

#include <string>
#include <vector>

namespace expfit {

/// Broken H1 seminorm of (exact - discrete): element-wise gradient
/// differences against the canonical discrete gradients, integrated with
/// the problem's triangle rule.
double broken_h1_error(const Solution& sol, const VectorField2& exact_grad);

enum class ErrorField { Rho, U };

/// L2 norm of (exact - discrete) for rho, or of their density partners
/// when field == U (the exact density is exact_rho * e^{-beta phi}).
double l2_error(const Solution& sol, const ScalarField2& exact_rho, ErrorField field);

struct ErrorRow {
    double h = 0.0;
    int dofs = 0;
    double err_h1 = 0.0;
    double err_l2_rho = 0.0;
    double err_l2_u = 0.0;
    double rate_h1 = 0.0; // log2 ratio against the previous row; 0 in row one
};

struct ErrorReport {
    std::vector<ErrorRow> rows;

    std::string csv() const;
    std::string pretty() const;
};

/// Manufactured-solution refinement study on the unit square: solves on
/// n0, 2 n0, 4 n0, ... cells per side and tabulates errors and observed
/// rates. `problem.mesh` is ignored; exact_rho and exact_grad_rho are
/// required.
ErrorReport convergence_study(ProblemSpec problem, int n0,
                              const std::vector<std::string>& dirichlet_sides, int levels,
                              const SolveOptions& opts = {});

} // namespace expfit

#endif
