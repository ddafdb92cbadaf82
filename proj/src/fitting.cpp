#include "expfit/fitting.hpp"

#include <cmath>

namespace expfit {

PathRule parse_path_rule(const std::string& name) {
    if (name == "xy") return PathRule::XThenY;
    if (name == "yx") return PathRule::YThenX;
    if (name == "line") return PathRule::StraightLine;
    if (name == "avg") return PathRule::AverageXYYX;
    throw Error("unknown path rule '" + name + "'");
}

std::string path_rule_name(PathRule p) {
    switch (p) {
    case PathRule::XThenY: return "xy";
    case PathRule::YThenX: return "yx";
    case PathRule::StraightLine: return "line";
    case PathRule::AverageXYYX: return "avg";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    if (name == "slotboom") return Variant::Slotboom;
    if (name == "direct_u") return Variant::DirectU;
    throw Error("unknown method variant '" + name + "'");
}

std::string variant_name(Variant v) {
    return v == Variant::Slotboom ? "slotboom" : "direct_u";
}

Vec2 FitSetup::start() const {
    if (start_override) return *start_override;
    // the direct construction integrates from a node; the Slotboom
    // construction treats the start as a free reference point
    return variant == Variant::DirectU ? nodes.start : Vec2::Zero();
}

namespace {

// Shared path-integral machinery. All exponentials use the shifted
// potential psi = phi - shift; the shift is reabsorbed by the caller.
struct PathIntegrator {
    const FitSetup& s;
    double shift;

    double psi(double x, double y) const { return s.phi(x, y) - shift; }

    // x-parallel leg at height y, signed by (x1 - x0). Samples v^y for the
    // Slotboom construction (rotated gradient) and v^x for DirectU.
    void leg_x(Eigen::VectorXd& acc, double x0, double x1, double y) const {
        if (x0 == x1) return;
        const int comp = s.variant == Variant::Slotboom ? 1 : 0;
        const int n = s.basis.size();
        for (size_t k = 0; k < s.seg.points.size(); ++k) {
            const double x = x0 + s.seg.points[k] * (x1 - x0);
            const double w = s.seg.weights[k] * std::exp(s.beta * psi(x, y));
            for (int i = 0; i < n; ++i) {
                const auto& c = s.basis.members[static_cast<size_t>(i)];
                acc(i) += w * (c(comp, 0) + c(comp, 1) * x + c(comp, 2) * y);
            }
        }
    }

    void leg_y(Eigen::VectorXd& acc, double y0, double y1, double x) const {
        if (y0 == y1) return;
        const int comp = s.variant == Variant::Slotboom ? 0 : 1;
        const int n = s.basis.size();
        for (size_t k = 0; k < s.seg.points.size(); ++k) {
            const double y = y0 + s.seg.points[k] * (y1 - y0);
            const double w = s.seg.weights[k] * std::exp(s.beta * psi(x, y));
            for (int i = 0; i < n; ++i) {
                const auto& c = s.basis.members[static_cast<size_t>(i)];
                acc(i) += w * (c(comp, 0) + c(comp, 1) * x + c(comp, 2) * y);
            }
        }
    }

    void line(Eigen::VectorXd& acc, const Vec2& a, const Vec2& b) const {
        const double len = (b - a).norm();
        if (len == 0.0) return;
        const Vec2 dir = (b - a) / len;
        const int n = s.basis.size();
        for (size_t k = 0; k < s.seg.points.size(); ++k) {
            const Vec2 p = a + s.seg.points[k] * (b - a);
            const double w = len * s.seg.weights[k] * std::exp(s.beta * psi(p.x(), p.y()));
            for (int i = 0; i < n; ++i) {
                const Vec2 v = s.basis.eval2(i, p);
                const double integrand = s.variant == Variant::Slotboom
                                             ? v.y() * dir.x() - v.x() * dir.y()
                                             : v.dot(dir);
                acc(i) += w * integrand;
            }
        }
    }

    Eigen::VectorXd factors(PathRule path, const Vec2& p) const {
        const Vec2 s0 = s.start();
        const int n = s.basis.size();
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        switch (path) {
        case PathRule::XThenY: {
            Eigen::VectorXd lx = Eigen::VectorXd::Zero(n);
            Eigen::VectorXd ly = Eigen::VectorXd::Zero(n);
            leg_x(lx, s0.x(), p.x(), s0.y());
            leg_y(ly, s0.y(), p.y(), p.x());
            acc = (p.x() - s0.x()) * lx;
            if (s.variant == Variant::Slotboom)
                acc -= (p.y() - s0.y()) * ly;
            else
                acc += (p.y() - s0.y()) * ly;
            break;
        }
        case PathRule::YThenX: {
            Eigen::VectorXd lx = Eigen::VectorXd::Zero(n);
            Eigen::VectorXd ly = Eigen::VectorXd::Zero(n);
            leg_y(ly, s0.y(), p.y(), s0.x());
            leg_x(lx, s0.x(), p.x(), p.y());
            acc = (p.x() - s0.x()) * lx;
            if (s.variant == Variant::Slotboom)
                acc -= (p.y() - s0.y()) * ly;
            else
                acc += (p.y() - s0.y()) * ly;
            break;
        }
        case PathRule::StraightLine:
            line(acc, s0, p);
            break;
        case PathRule::AverageXYYX:
            acc = 0.5 * (factors(PathRule::XThenY, p) + factors(PathRule::YThenX, p));
            break;
        }
        return acc;
    }
};

} // namespace

Eigen::MatrixXd assemble_fit_matrix(const FitSetup& s) {
    const int n = s.basis.size();
    const int rows = s.nodes.size();
    if (rows != n + 1)
        throw Error("node set size " + std::to_string(rows) + " does not match basis size + 1 = " +
                    std::to_string(n + 1));

    double shift = 0.0;
    if (s.shift) {
        shift = -std::numeric_limits<double>::infinity();
        for (const Vec2& p : s.nodes.points) shift = std::max(shift, s.phi(p.x(), p.y()));
    }
    PathIntegrator integ{s, shift};

    Eigen::MatrixXd F(rows, n + 1);
    for (int j = 0; j < rows; ++j) {
        const Vec2& node = s.nodes.points[static_cast<size_t>(j)];
        Eigen::VectorXd I = integ.factors(s.path, node);
        double pref = 1.0 / s.D;
        if (s.variant == Variant::DirectU)
            pref *= std::exp(-s.beta * integ.psi(node.x(), node.y()));
        F.row(j).head(n) = pref * I.transpose();
        F(j, n) = 1.0;
    }
    return F;
}

Eigen::MatrixXd solve_element_coefficients(const Eigen::MatrixXd& F) {
    if (F.rows() != F.cols()) throw Error("fit matrix must be square");
    const double max_abs = F.cwiseAbs().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(F);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot >= 1e-12 * max_abs)) {
        Eigen::FullPivLU<Eigen::MatrixXd> full(F);
        throw SingularMatrixError("singular element fit matrix (rank " +
                                      std::to_string(full.rank()) + " of " +
                                      std::to_string(F.rows()) + ")",
                                  static_cast<int>(full.rank()), static_cast<int>(F.rows()));
    }
    return lu.solve(Eigen::MatrixXd::Identity(F.rows(), F.cols()));
}

FittedBasis build_fitted_basis(const FitSetup& s) {
    Eigen::MatrixXd F = assemble_fit_matrix(s);
    double shift = 0.0;
    if (s.shift) {
        shift = -std::numeric_limits<double>::infinity();
        for (const Vec2& p : s.nodes.points) shift = std::max(shift, s.phi(p.x(), p.y()));
    }
    return FittedBasis(s, shift, solve_element_coefficients(F));
}

FittedBasis::FittedBasis(FitSetup setup, double shift_value, Eigen::MatrixXd coeffs)
    : setup_(std::move(setup)), shift_(shift_value), coeffs_(std::move(coeffs)) {
    const int n = size();
    node_scale_.resize(n);
    for (int j = 0; j < n; ++j) {
        const Vec2& p = setup_.nodes.points[static_cast<size_t>(j)];
        node_scale_(j) = std::exp(setup_.beta * shifted_phi(p));
    }
}

Eigen::VectorXd FittedBasis::path_factors(const Vec2& p) const {
    PathIntegrator integ{setup_, shift_};
    return integ.factors(setup_.path, p);
}

double FittedBasis::interp(int j, const Vec2& p) const {
    const int n = members();
    const Eigen::VectorXd I = path_factors(p);
    double sum = coeffs_.col(j).head(n).dot(I) / setup_.D;
    if (setup_.variant == Variant::DirectU)
        sum *= std::exp(-setup_.beta * shifted_phi(p));
    return constant(j) + sum;
}

Eigen::VectorXd FittedBasis::interp_all(const Vec2& p) const {
    const int n = members();
    const Eigen::VectorXd I = path_factors(p);
    Eigen::VectorXd vals = coeffs_.topRows(n).transpose() * I / setup_.D;
    if (setup_.variant == Variant::DirectU)
        vals *= std::exp(-setup_.beta * shifted_phi(p));
    vals += coeffs_.row(n).transpose();
    return vals;
}

double FittedBasis::rho(int j, const Vec2& p) const {
    const double f = interp(j, p);
    if (setup_.variant == Variant::Slotboom) return f;
    return f * std::exp(setup_.beta * shifted_phi(p)) / node_scale_(j);
}

double FittedBasis::u(int j, const Vec2& p) const {
    const double f = interp(j, p);
    if (setup_.variant == Variant::DirectU) return f;
    return f * node_scale_(j) * std::exp(-setup_.beta * shifted_phi(p));
}

Vec2 FittedBasis::rotated_poly(int j, const Vec2& p) const {
    const int n = members();
    Vec2 w = Vec2::Zero();
    for (int i = 0; i < n; ++i) {
        const Vec2 v = setup_.basis.eval2(i, p);
        w.x() += coeffs_(i, j) * v.y();
        w.y() -= coeffs_(i, j) * v.x();
    }
    return w;
}

Vec2 FittedBasis::canonical_gradient(int j, const Vec2& p) const {
    if (setup_.variant != Variant::Slotboom)
        throw Error("canonical gradient is defined for the Slotboom construction");
    return (std::exp(setup_.beta * shifted_phi(p)) / setup_.D) * rotated_poly(j, p);
}

Vec2 FittedBasis::flux(int j, const Vec2& p) const {
    return std::exp(-setup_.beta * shift_) * rotated_poly(j, p);
}

Vec2 FittedBasis::fd_gradient_rho(int j, const Vec2& p, double h) const {
    const double dx = (rho(j, {p.x() + h, p.y()}) - rho(j, {p.x() - h, p.y()})) / (2 * h);
    const double dy = (rho(j, {p.x(), p.y() + h}) - rho(j, {p.x(), p.y() - h})) / (2 * h);
    return {dx, dy};
}

// ---------------------------------------------------------------------------
// 3-D construction on the reference tetrahedron
// ---------------------------------------------------------------------------

namespace {

// axis legs (x0,y0,z0) -> (x,y0,z0) -> (x,y,z0) -> (x,y,z)
Eigen::VectorXd factors_3d(const DivFreeBasis& basis, const ScalarField3& phi, double beta,
                           double shift, const SegmentRule& seg, const Vec3& s0,
                           const Vec3& p) {
    const int n = basis.size();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    auto psi = [&](double x, double y, double z) { return phi(x, y, z) - shift; };

    auto add_leg = [&](int comp, double t0, double t1, auto point_at) {
        if (t0 == t1) return;
        Eigen::VectorXd leg = Eigen::VectorXd::Zero(n);
        for (size_t k = 0; k < seg.points.size(); ++k) {
            const Vec3 q = point_at(t0 + seg.points[k] * (t1 - t0));
            const double w = seg.weights[k] * std::exp(beta * psi(q.x(), q.y(), q.z()));
            for (int i = 0; i < n; ++i) leg(i) += w * basis.eval3(i, q)(comp);
        }
        acc += (t1 - t0) * leg;
    };

    add_leg(0, s0.x(), p.x(), [&](double t) { return Vec3(t, s0.y(), s0.z()); });
    add_leg(1, s0.y(), p.y(), [&](double t) { return Vec3(p.x(), t, s0.z()); });
    add_leg(2, s0.z(), p.z(), [&](double t) { return Vec3(p.x(), p.y(), t); });
    return acc;
}

} // namespace

FittedBasis3 build_fitted_basis_3d(const DivFreeBasis& basis, const TetNodeSet& nodes,
                                   const ScalarField3& phi, double beta, double D,
                                   const SegmentRule& seg, bool shift) {
    const int n = basis.size();
    if (nodes.size() != n + 1)
        throw Error("3-D node set size does not match basis size + 1");

    double shift_value = 0.0;
    if (shift) {
        shift_value = -std::numeric_limits<double>::infinity();
        for (const Vec3& p : nodes.points)
            shift_value = std::max(shift_value, phi(p.x(), p.y(), p.z()));
    }

    Eigen::MatrixXd F(n + 1, n + 1);
    for (int j = 0; j <= n; ++j) {
        const Vec3& node = nodes.points[static_cast<size_t>(j)];
        const Eigen::VectorXd I = factors_3d(basis, phi, beta, shift_value, seg, nodes.start, node);
        const double pref =
            std::exp(-beta * (phi(node.x(), node.y(), node.z()) - shift_value)) / D;
        F.row(j).head(n) = pref * I.transpose();
        F(j, n) = 1.0;
    }
    return FittedBasis3(basis, nodes, phi, beta, D, seg, shift_value,
                        solve_element_coefficients(F));
}

FittedBasis3::FittedBasis3(DivFreeBasis basis, TetNodeSet nodes, ScalarField3 phi, double beta,
                           double D, SegmentRule seg, double shift_value, Eigen::MatrixXd coeffs)
    : basis_(std::move(basis)), nodes_(std::move(nodes)), phi_(std::move(phi)), beta_(beta),
      D_(D), seg_(std::move(seg)), shift_(shift_value), coeffs_(std::move(coeffs)) {
    const int n = size();
    node_scale_.resize(n);
    for (int j = 0; j < n; ++j)
        node_scale_(j) = std::exp(beta_ * shifted_phi(nodes_.points[static_cast<size_t>(j)]));
}

Eigen::VectorXd FittedBasis3::path_factors(const Vec3& p) const {
    return factors_3d(basis_, phi_, beta_, shift_, seg_, nodes_.start, p);
}

double FittedBasis3::u(int j, const Vec3& p) const {
    const int n = basis_.size();
    const Eigen::VectorXd I = path_factors(p);
    return constant(j) +
           std::exp(-beta_ * shifted_phi(p)) * coeffs_.col(j).head(n).dot(I) / D_;
}

Eigen::VectorXd FittedBasis3::u_all(const Vec3& p) const {
    const int n = basis_.size();
    const Eigen::VectorXd I = path_factors(p);
    Eigen::VectorXd vals =
        std::exp(-beta_ * shifted_phi(p)) * (coeffs_.topRows(n).transpose() * I) / D_;
    vals += coeffs_.row(n).transpose();
    return vals;
}

double FittedBasis3::rho(int j, const Vec3& p) const {
    return u(j, p) * std::exp(beta_ * shifted_phi(p)) / node_scale_(j);
}

// ---------------------------------------------------------------------------
// Closed forms for a linear potential phi = a x + b y + c, averaged paths
// from (0,0). The constant c cancels.
// ---------------------------------------------------------------------------

double linear_phi_closed_form(double a, double b, double beta, double D, double m1, double m2,
                              double u0, double x, double y) {
    if (a * b == 0.0) throw Error("linear-potential closed form requires a != 0 and b != 0");
    const double eby = std::exp(-beta * b * y);
    const double eax = std::exp(-beta * a * x);
    const double eab = std::exp(-beta * (a * x + b * y));
    return u0 + m2 / (2 * beta * D) * (1.0 / a + 1.0 / b) +
           eby * (m1 / (2 * beta * a * D) - m2 / (2 * beta * b * D)) +
           eax * (m1 / (2 * beta * b * D) - m2 / (2 * beta * a * D)) -
           m1 * (1.0 / (2 * beta * b * D) + 1.0 / (2 * beta * a * D)) * eab;
}

double linear_phi_closed_form_matched(double a, double b, double beta, double D, double m1,
                                      double m2, double u0, double x, double y) {
    if (a * b == 0.0) throw Error("linear-potential closed form requires a != 0 and b != 0");
    const double eby = std::exp(-beta * b * y);
    const double eax = std::exp(-beta * a * x);
    const double eab = std::exp(-beta * (a * x + b * y));
    return u0 + m1 / (2 * beta * a * D) * (1.0 - eax + eby - eab) +
           m2 / (2 * beta * b * D) * (1.0 - eby + eax - eab);
}

} // namespace expfit
