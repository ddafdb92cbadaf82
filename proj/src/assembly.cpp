#include "expfit/assembly.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace expfit {

void ProblemSpec::validate() const {
    if (!(D > 0.0)) throw Error("diffusion coefficient D must be positive");
    if (!(beta > 0.0)) throw Error("beta must be positive");
    if (!mesh) throw Error("problem has no mesh");
    if (!phi || !f || !g) throw Error("problem requires phi, f and g");
    if (variant != Variant::Slotboom)
        throw Error("global solves use the Slotboom construction; the direct variant "
                    "is element-level only");
    node_set_2d(order, nodeset); // throws on an invalid pairing
}

int DofTable::num_free() const {
    int n = 0;
    for (bool c : constrained)
        if (!c) ++n;
    return n;
}

DofTable build_dof_table(const Mesh& mesh, NodeSetKind kind) {
    DofTable table;
    table.kind = kind;
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();

    const bool want_vertices = kind == NodeSetKind::Vertices || kind == NodeSetKind::P2;
    const bool want_edges = kind == NodeSetKind::Midpoints || kind == NodeSetKind::P2;
    if (!want_vertices && !want_edges)
        throw Error("node set kind not usable for a 2-D dof table: " + node_set_kind_name(kind));

    const int vertex_base = 0;
    const int edge_base = want_vertices ? nv : 0;
    table.count = (want_vertices ? nv : 0) + (want_edges ? ne : 0);
    table.local_count = (want_vertices ? 3 : 0) + (want_edges ? 3 : 0);
    table.constrained.assign(static_cast<size_t>(table.count), false);
    table.coords.resize(static_cast<size_t>(table.count));

    if (want_vertices)
        for (int v = 0; v < nv; ++v) {
            table.coords[static_cast<size_t>(vertex_base + v)] = mesh.vertex(v);
            table.constrained[static_cast<size_t>(vertex_base + v)] = mesh.vertex_on_dirichlet(v);
        }
    if (want_edges)
        for (int e = 0; e < ne; ++e) {
            const auto& ed = mesh.edge(e);
            table.coords[static_cast<size_t>(edge_base + e)] =
                0.5 * (mesh.vertex(ed.a) + mesh.vertex(ed.b));
            const bool dirichlet = ed.boundary >= 0 &&
                mesh.boundary_edge(ed.boundary).marker == Marker::Dirichlet;
            table.constrained[static_cast<size_t>(edge_base + e)] = dirichlet;
        }

    table.element_dofs.assign(static_cast<size_t>(mesh.num_triangles()), {-1, -1, -1, -1, -1, -1});
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        auto& loc = table.element_dofs[static_cast<size_t>(t)];
        int k = 0;
        if (want_vertices)
            for (int i = 0; i < 3; ++i) loc[static_cast<size_t>(k++)] = vertex_base + mesh.triangle(t)[static_cast<size_t>(i)];
        if (want_edges)
            for (int i = 0; i < 3; ++i)
                loc[static_cast<size_t>(k++)] = edge_base + mesh.triangle_edges(t)[static_cast<size_t>(i)];
    }
    return table;
}

GlobalSystem assemble(const ProblemSpec& problem) {
    problem.validate();
    const Mesh& mesh = *problem.mesh;

    GlobalSystem sys;
    sys.mesh = problem.mesh;
    sys.problem = problem;
    sys.dofs = build_dof_table(mesh, problem.nodeset);

    const DivFreeBasis basis = problem.order == 0 ? rt0_basis_2d() : rt1_basis_2d();
    const NodeSet nodes = node_set_2d(problem.order, problem.nodeset);
    const int nl = sys.dofs.local_count;
    const auto& quad = problem.tri;
    const int nq = static_cast<int>(quad.points.size());

    sys.bases.reserve(static_cast<size_t>(mesh.num_triangles()));
    sys.maps.reserve(static_cast<size_t>(mesh.num_triangles()));
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(mesh.num_triangles()) * static_cast<size_t>(nl * nl));
    sys.b = Eigen::VectorXd::Zero(sys.dofs.count);

    Eigen::MatrixXd Ke(nl, nl);
    Eigen::MatrixXd grads(2, nl);
    Eigen::MatrixXd rho_at_q(nl, nq);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const AffineMap map = affine_map(mesh, t);

        FitSetup setup;
        setup.variant = problem.variant;
        setup.path = problem.path;
        setup.basis = basis;
        setup.nodes = nodes;
        setup.beta = problem.beta;
        setup.D = problem.D;
        setup.seg = problem.seg;
        setup.shift = problem.shift;
        setup.start_override = problem.start_override;
        const ScalarField2 phi = problem.phi;
        const Eigen::Matrix2d B = map.B;
        const Vec2 b0 = map.b;
        setup.phi = [phi, B, b0](double x, double y) {
            const Vec2 p = B * Vec2(x, y) + b0;
            return phi(p.x(), p.y());
        };

        FittedBasis fb = [&]() {
            try {
                return build_fitted_basis(setup);
            } catch (const SingularMatrixError& e) {
                throw SingularMatrixError("element " + std::to_string(t + 1) + ": " + e.what(),
                                          e.rank(), e.size());
            }
        }();
        fb.element_id = t;

        const Eigen::Matrix2d Bit = map.Binv.transpose();
        Ke.setZero();
        for (int q = 0; q < nq; ++q) {
            const Vec2& xi = quad.points[static_cast<size_t>(q)];
            const double w = quad.weights[static_cast<size_t>(q)] * map.detB;
            // the e^{beta phi} of the canonical gradients cancels against
            // D e^{-beta phi}, leaving a single shifted exponential factor
            const double coeff =
                std::exp(problem.beta * (setup.phi(xi.x(), xi.y()) - 2.0 * fb.shift())) /
                problem.D;
            for (int r = 0; r < nl; ++r) grads.col(r) = Bit * fb.rotated_poly(r, xi);
            Ke.noalias() += (w * coeff) * grads.transpose() * grads;

            rho_at_q.col(q) = fb.interp_all(xi);
        }

        const auto& loc = sys.dofs.element_dofs[static_cast<size_t>(t)];
        for (int r = 0; r < nl; ++r)
            for (int c = 0; c < nl; ++c)
                triplets.emplace_back(loc[static_cast<size_t>(r)], loc[static_cast<size_t>(c)], Ke(r, c));

        for (int q = 0; q < nq; ++q) {
            const Vec2 p = map.to_physical(quad.points[static_cast<size_t>(q)]);
            const double wf =
                quad.weights[static_cast<size_t>(q)] * map.detB * problem.f(p.x(), p.y());
            for (int r = 0; r < nl; ++r) sys.b(loc[static_cast<size_t>(r)]) += wf * rho_at_q(r, q);
        }

        sys.bases.push_back(std::move(fb));
        sys.maps.push_back(map);
    }

    sys.A.resize(sys.dofs.count, sys.dofs.count);
    sys.A.setFromTriplets(triplets.begin(), triplets.end());

    sys.dirichlet = Eigen::VectorXd::Zero(sys.dofs.count);
    for (int d = 0; d < sys.dofs.count; ++d)
        if (sys.dofs.constrained[static_cast<size_t>(d)]) {
            const Vec2& p = sys.dofs.coords[static_cast<size_t>(d)];
            sys.dirichlet(d) =
                problem.g(p.x(), p.y()) * std::exp(problem.beta * problem.phi(p.x(), p.y()));
        }
    return sys;
}

namespace {

struct CgResult {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> alpha, beta;
};

CgResult jacobi_pcg(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double tol,
                    int max_iter) {
    CgResult res;
    const Eigen::Index n = A.rows();
    res.x = Eigen::VectorXd::Zero(n);
    const double norm_b = b.norm();
    if (norm_b == 0.0) return res;

    Eigen::VectorXd invdiag(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = A.coeff(i, i);
        if (!(d > 0.0)) throw SolverError("nonpositive diagonal entry: system is not SPD");
        invdiag(i) = 1.0 / d;
    }

    Eigen::VectorXd r = b;
    Eigen::VectorXd z = invdiag.asDiagonal() * r;
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    double res_norm = r.norm();

    while (res_norm > tol * norm_b) {
        if (res.iterations >= max_iter)
            throw SolverError("conjugate gradient did not converge in " +
                              std::to_string(max_iter) + " iterations (relative residual " +
                              std::to_string(res_norm / norm_b) + ")");
        const Eigen::VectorXd Ap = A * p;
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0))
            throw SolverError("negative curvature direction met: system is not SPD");
        const double alpha = rz / pAp;
        res.x += alpha * p;
        r -= alpha * Ap;
        z = invdiag.asDiagonal() * r;
        const double rz_new = r.dot(z);
        const double beta = rz_new / rz;
        rz = rz_new;
        p = z + beta * p;
        res.alpha.push_back(alpha);
        res.beta.push_back(beta);
        res_norm = r.norm();
        ++res.iterations;
    }
    res.residual = res_norm / norm_b;
    return res;
}

} // namespace

Solution solve(GlobalSystem sys, const SolveOptions& opts) {
    const int n = sys.dofs.count;
    std::vector<int> free_index(static_cast<size_t>(n), -1);
    int nfree = 0;
    for (int d = 0; d < n; ++d)
        if (!sys.dofs.constrained[static_cast<size_t>(d)]) free_index[static_cast<size_t>(d)] = nfree++;

    // reduced system: A_ff x = b_f - A_fc g_c
    Eigen::VectorXd rhs(nfree);
    {
        Eigen::VectorXd lifted = sys.b - sys.A * sys.dirichlet;
        int k = 0;
        for (int d = 0; d < n; ++d)
            if (free_index[static_cast<size_t>(d)] >= 0) rhs(k++) = lifted(d);
    }
    Eigen::SparseMatrix<double> Aff(nfree, nfree);
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<size_t>(sys.A.nonZeros()));
        for (int col = 0; col < n; ++col) {
            const int fc = free_index[static_cast<size_t>(col)];
            if (fc < 0) continue;
            for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, col); it; ++it) {
                const int fr = free_index[static_cast<size_t>(it.row())];
                if (fr >= 0) trip.emplace_back(fr, fc, it.value());
            }
        }
        Aff.setFromTriplets(trip.begin(), trip.end());
    }

    Eigen::VectorXd xfree;
    double residual = 0.0;
    int iterations = 0;
    bool used_dense = false;
    std::vector<double> cg_alpha, cg_beta;

    if (nfree == 0) {
        xfree.resize(0);
    } else if (nfree <= opts.dense_threshold) {
        used_dense = true;
        Eigen::MatrixXd dense(Aff);
        Eigen::LLT<Eigen::MatrixXd> llt(dense);
        if (llt.info() != Eigen::Success)
            throw SolverError("dense Cholesky failed: free block is not positive definite");
        xfree = llt.solve(rhs);
        const double nb = rhs.norm();
        residual = nb > 0.0 ? (rhs - Aff * xfree).norm() / nb : 0.0;
    } else {
        CgResult cg = jacobi_pcg(Aff, rhs, opts.tol, opts.max_iter);
        xfree = std::move(cg.x);
        residual = cg.residual;
        iterations = cg.iterations;
        cg_alpha = std::move(cg.alpha);
        cg_beta = std::move(cg.beta);
    }

    Eigen::VectorXd rho = sys.dirichlet;
    for (int d = 0; d < n; ++d)
        if (free_index[static_cast<size_t>(d)] >= 0) rho(d) = xfree(free_index[static_cast<size_t>(d)]);

    return Solution(std::move(sys), std::move(rho), residual, iterations, used_dense,
                    std::move(cg_alpha), std::move(cg_beta));
}

Solution::Solution(GlobalSystem sys, Eigen::VectorXd rho, double residual, int iterations,
                   bool used_dense, std::vector<double> cg_alpha, std::vector<double> cg_beta)
    : sys_(std::move(sys)), rho_(std::move(rho)), residual_(residual), iterations_(iterations),
      used_dense_(used_dense), cg_alpha_(std::move(cg_alpha)), cg_beta_(std::move(cg_beta)) {
    u_.resize(rho_.size());
    for (Eigen::Index d = 0; d < rho_.size(); ++d) {
        const Vec2& p = sys_.dofs.coords[static_cast<size_t>(d)];
        u_(d) = rho_(d) * std::exp(-sys_.problem.beta * sys_.problem.phi(p.x(), p.y()));
    }
}

double Solution::rho_on_element(int t, const Vec2& xi) const {
    const FittedBasis& fb = sys_.bases[static_cast<size_t>(t)];
    const auto& loc = sys_.dofs.element_dofs[static_cast<size_t>(t)];
    const Eigen::VectorXd vals = fb.interp_all(xi);
    double sum = 0.0;
    for (int r = 0; r < sys_.dofs.local_count; ++r) sum += rho_(loc[static_cast<size_t>(r)]) * vals(r);
    return sum;
}

Vec2 Solution::grad_rho_on_element(int t, const Vec2& xi) const {
    const FittedBasis& fb = sys_.bases[static_cast<size_t>(t)];
    const auto& loc = sys_.dofs.element_dofs[static_cast<size_t>(t)];
    Vec2 g = Vec2::Zero();
    for (int r = 0; r < sys_.dofs.local_count; ++r)
        g += rho_(loc[static_cast<size_t>(r)]) * fb.canonical_gradient(r, xi);
    return sys_.maps[static_cast<size_t>(t)].Binv.transpose() * g;
}

Solution::Values Solution::evaluate(const Vec2& p) const {
    const int t = sys_.mesh->locate(p, locate_hint_);
    if (t < 0) throw Error("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                           ") lies outside the mesh");
    locate_hint_ = t;
    const Vec2 xi = sys_.maps[static_cast<size_t>(t)].to_reference(p);

    Values out;
    out.rho = rho_on_element(t, xi);
    out.u = out.rho * std::exp(-sys_.problem.beta * sys_.problem.phi(p.x(), p.y()));

    const FittedBasis& fb = sys_.bases[static_cast<size_t>(t)];
    const auto& loc = sys_.dofs.element_dofs[static_cast<size_t>(t)];
    Vec2 w = Vec2::Zero();
    for (int r = 0; r < sys_.dofs.local_count; ++r)
        w += rho_(loc[static_cast<size_t>(r)]) * fb.flux(r, xi);
    out.J = sys_.maps[static_cast<size_t>(t)].Binv.transpose() * w;
    return out;
}

std::pair<double, double> ritz_extremes(const Solution& sol) {
    const auto& a = sol.cg_alpha();
    const auto& b = sol.cg_beta();
    const int m = static_cast<int>(a.size());
    if (m == 0) return {0.0, 0.0};
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        T(k, k) = 1.0 / a[static_cast<size_t>(k)];
        if (k > 0) T(k, k) += b[static_cast<size_t>(k - 1)] / a[static_cast<size_t>(k - 1)];
        if (k + 1 < m) {
            const double off = std::sqrt(b[static_cast<size_t>(k)]) / a[static_cast<size_t>(k)];
            T(k, k + 1) = off;
            T(k + 1, k) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

} // namespace expfit
