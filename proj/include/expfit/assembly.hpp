#ifndef EXPFIT_ASSEMBLY_HPP
#define EXPFIT_ASSEMBLY_HPP

#include "expfit/fitting.hpp"
#include "expfit/mesh.hpp"

#include <Eigen/Sparse>
#include <memory>

namespace expfit {

/// Full description of a boundary value problem instance:
/// -div(D e^{-beta phi} grad rho) = f with rho = g e^{beta phi} on the
/// Dirichlet part of the boundary and natural zero flux elsewhere.
struct ProblemSpec {
    double D = 1.0;
    double beta = 1.0;
    ScalarField2 phi;
    ScalarField2 f;
    ScalarField2 g;

    // optional manufactured-solution data (used by the analysis module)
    ScalarField2 exact_rho;
    VectorField2 exact_grad_rho;

    const Mesh* mesh = nullptr;

    Variant variant = Variant::Slotboom;
    int order = 0; // 0 -> two-member space, 1 -> five-member space
    NodeSetKind nodeset = NodeSetKind::Vertices;
    PathRule path = PathRule::XThenY;
    bool shift = true;
    std::optional<Vec2> start_override;

    SegmentRule seg = SegmentRule::gauss(16);
    TriangleRule tri = TriangleRule::make(8);

    void validate() const;
};

/// Global degree-of-freedom numbering for a node-set kind:
/// one dof per vertex, per edge (midpoints), or both (p2). Dofs sitting
/// on the Dirichlet boundary are flagged constrained.
struct DofTable {
    NodeSetKind kind = NodeSetKind::Vertices;
    int count = 0;
    int local_count = 0; // dofs per element: 3 or 6
    std::vector<bool> constrained;
    std::vector<Vec2> coords;
    std::vector<std::array<int, 6>> element_dofs;

    int num_free() const;
};

DofTable build_dof_table(const Mesh& mesh, NodeSetKind kind);

/// Assembled Galerkin system over all dofs (Dirichlet rows included,
/// untouched); reduction to the free block happens in solve().
struct GlobalSystem {
    const Mesh* mesh = nullptr;
    ProblemSpec problem;
    DofTable dofs;
    Eigen::SparseMatrix<double> A; // symmetric, all dofs
    Eigen::VectorXd b;             // load, all dofs
    Eigen::VectorXd dirichlet;     // g*e^{beta phi} at constrained dofs, 0 elsewhere
    std::vector<FittedBasis> bases;
    std::vector<AffineMap> maps;
};

GlobalSystem assemble(const ProblemSpec& problem);

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    int dense_threshold = 500;
};

/// Nodal solution plus element-wise evaluators.
class Solution {
public:
    Solution(GlobalSystem sys, Eigen::VectorXd rho, double residual, int iterations,
             bool used_dense, std::vector<double> cg_alpha, std::vector<double> cg_beta);

    const GlobalSystem& system() const { return sys_; }
    const Eigen::VectorXd& rho_nodal() const { return rho_; }
    const Eigen::VectorXd& u_nodal() const { return u_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }
    bool used_dense_solver() const { return used_dense_; }
    const std::vector<double>& cg_alpha() const { return cg_alpha_; }
    const std::vector<double>& cg_beta() const { return cg_beta_; }

    struct Values {
        double rho;
        double u;
        Vec2 J;
    };

    /// Evaluate rho_h, u_h and the current J_h at a physical point.
    /// Throws Error when p lies outside the mesh.
    Values evaluate(const Vec2& p) const;

    /// rho_h restricted to element t at reference coordinates xi.
    double rho_on_element(int t, const Vec2& xi) const;
    /// Physical gradient of rho_h on element t at reference coordinates xi.
    Vec2 grad_rho_on_element(int t, const Vec2& xi) const;

private:
    GlobalSystem sys_;
    Eigen::VectorXd rho_;
    Eigen::VectorXd u_;
    double residual_;
    int iterations_;
    bool used_dense_;
    std::vector<double> cg_alpha_, cg_beta_;
    mutable int locate_hint_ = 0;
};

Solution solve(GlobalSystem sys, const SolveOptions& opts = {});

/// Extreme Ritz values of the Jacobi-preconditioned free block,
/// reconstructed from the CG coefficients (empty solve data -> {0,0}).
std::pair<double, double> ritz_extremes(const Solution& sol);

} // namespace expfit

#endif
