#ifndef EXPFIT_FITTING_HPP
#define EXPFIT_FITTING_HPP

#include "expfit/common.hpp"
#include "expfit/quadrature.hpp"
#include "expfit/refspace.hpp"

#include <optional>

namespace expfit {

/// Route of the integration path from the start point to a target point.
/// XThenY and YThenX are exact mirrors of each other under swapping the
/// coordinates of every input.
enum class PathRule { XThenY, YThenX, StraightLine, AverageXYYX };

/// Which per-element construction is used:
///  - Slotboom: fit the rotated gradient of the Slotboom variable; the
///    native interpolative functions are rho_j.
///  - DirectU: fit the density gradient directly; the native
///    interpolative functions are u_j.
enum class Variant { Slotboom, DirectU };

PathRule parse_path_rule(const std::string& name);
std::string path_rule_name(PathRule p);
Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

/// Everything needed to build the fitted basis on one reference element.
/// `phi` is the potential already pulled back to the reference triangle.
struct FitSetup {
    Variant variant = Variant::Slotboom;
    PathRule path = PathRule::XThenY;
    DivFreeBasis basis;
    NodeSet nodes;
    ScalarField2 phi;
    double beta = 1.0;
    double D = 1.0;
    SegmentRule seg = SegmentRule::gauss(16);
    bool shift = true; // factor e^{-beta*phibar} out of the exponentials
    std::optional<Vec2> start_override;

    Vec2 start() const;
};

/// Assemble the (N+1) x (N+1) interpolation system: entry (j,i), i < N,
/// is the weighted path-integral functional of basis member i evaluated
/// at node j; the last column is all ones. Rows for nodes coinciding
/// with the start point are zero apart from the trailing one.
Eigen::MatrixXd assemble_fit_matrix(const FitSetup& s);

/// Solve F * M = I by dense LU with partial pivoting. A pivot smaller
/// than 1e-12 * max|F| raises SingularMatrixError (carrying the rank).
Eigen::MatrixXd solve_element_coefficients(const Eigen::MatrixXd& F);

/// Exponentially fitted interpolative basis on one element.
///
/// Column j of `coeffs` holds the expansion coefficients m_{j,1..N} and
/// the constant value at the start point of basis function j. All
/// evaluation happens on the reference element; physical gradients are
/// obtained by the caller through the inverse-transpose Jacobian.
class FittedBasis {
public:
    FittedBasis(FitSetup setup, double shift_value, Eigen::MatrixXd coeffs);

    int size() const { return static_cast<int>(coeffs_.cols()); }
    int members() const { return setup_.basis.size(); }
    const FitSetup& setup() const { return setup_; }
    const Eigen::MatrixXd& coeffs() const { return coeffs_; }
    double shift() const { return shift_; }
    double constant(int j) const { return coeffs_(coeffs_.rows() - 1, j); }
    /// e^{beta * (phi(node_j) - shift)}
    double node_scale(int j) const { return node_scale_(j); }

    /// Path-integral factors I_i(p), one per basis member, from the start
    /// point to p along the configured path.
    Eigen::VectorXd path_factors(const Vec2& p) const;

    /// Native interpolative function: rho_j for Slotboom, u_j for DirectU.
    double interp(int j, const Vec2& p) const;
    Eigen::VectorXd interp_all(const Vec2& p) const;

    /// Slotboom-variable basis function (interpolative in both variants).
    double rho(int j, const Vec2& p) const;
    /// Density basis function, scaled to be interpolative.
    double u(int j, const Vec2& p) const;

    /// The gradient representation the coefficients were fitted to:
    /// (e^{beta phi}/D) * (sum_i m_ji v_i^y, -sum_i m_ji v_i^x).
    /// Slotboom variant only.
    Vec2 canonical_gradient(int j, const Vec2& p) const;

    /// D e^{-beta phi} * canonical_gradient with the exponentials cancelled
    /// algebraically; a polynomial vector times e^{-beta*shift}.
    Vec2 flux(int j, const Vec2& p) const;

    /// Rotated polynomial (sum_i m_ji v_i^y, -sum_i m_ji v_i^x)(p).
    Vec2 rotated_poly(int j, const Vec2& p) const;

    /// Central-difference gradient of rho along the path representation;
    /// diagnostic only, never used in assembly.
    Vec2 fd_gradient_rho(int j, const Vec2& p, double h = 1e-6) const;

    int element_id = -1;

private:
    FitSetup setup_;
    double shift_ = 0.0;
    Eigen::MatrixXd coeffs_;
    Eigen::VectorXd node_scale_;

    double shifted_phi(const Vec2& p) const { return setup_.phi(p.x(), p.y()) - shift_; }
};

/// Build the fitted basis: assemble the interpolation system and solve it.
FittedBasis build_fitted_basis(const FitSetup& s);

/// First-order construction on the reference tetrahedron, with the
/// three-leg axis-parallel integration path.
class FittedBasis3 {
public:
    FittedBasis3(DivFreeBasis basis, TetNodeSet nodes, ScalarField3 phi, double beta,
                 double D, SegmentRule seg, double shift_value, Eigen::MatrixXd coeffs);

    int size() const { return static_cast<int>(coeffs_.cols()); }
    double constant(int j) const { return coeffs_(coeffs_.rows() - 1, j); }

    Eigen::VectorXd path_factors(const Vec3& p) const;
    /// Native interpolative function u_j.
    double u(int j, const Vec3& p) const;
    /// Slotboom-variable partner, scaled to be interpolative.
    double rho(int j, const Vec3& p) const;
    Eigen::VectorXd u_all(const Vec3& p) const;

    const TetNodeSet& nodes() const { return nodes_; }

private:
    DivFreeBasis basis_;
    TetNodeSet nodes_;
    ScalarField3 phi_;
    double beta_, D_;
    SegmentRule seg_;
    double shift_;
    Eigen::MatrixXd coeffs_;
    Eigen::VectorXd node_scale_;

    double shifted_phi(const Vec3& p) const { return phi_(p.x(), p.y(), p.z()) - shift_; }

    friend FittedBasis3 build_fitted_basis_3d(const DivFreeBasis&, const TetNodeSet&,
                                              const ScalarField3&, double, double,
                                              const SegmentRule&, bool);
};

FittedBasis3 build_fitted_basis_3d(const DivFreeBasis& basis, const TetNodeSet& nodes,
                                   const ScalarField3& phi, double beta, double D,
                                   const SegmentRule& seg = SegmentRule::gauss(16),
                                   bool shift = true);

/// Closed-form density basis function for a linear potential
/// phi = a x + b y + c (a, b != 0), averaged two-leg paths from (0,0),
/// with the first-order two-member basis. This is the contracted formula;
/// see linear_phi_closed_form_matched for the variant whose leg/component
/// pairing matches the quadrature construction on both paths.
double linear_phi_closed_form(double a, double b, double beta, double D, double m1,
                              double m2, double u0, double x, double y);

/// Average of the two path expansions with the x-leg always paired to the
/// first component and the y-leg to the second.
double linear_phi_closed_form_matched(double a, double b, double beta, double D, double m1,
                                      double m2, double u0, double x, double y);

} // namespace expfit

#endif
