#include "expfit/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace expfit {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = -z;
        x[static_cast<size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<size_t>(i)] = wi;
        w[static_cast<size_t>(n - 1 - i)] = wi;
    }
}

} // namespace

SegmentRule SegmentRule::gauss(int n) {
    if (n < 1) throw Error("segment rule needs at least one point");
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    SegmentRule rule;
    rule.degree = 2 * n - 1;
    rule.points.resize(x.size());
    rule.weights.resize(w.size());
    for (size_t i = 0; i < x.size(); ++i) {
        rule.points[i] = 0.5 * (x[i] + 1.0);
        rule.weights[i] = 0.5 * w[i];
    }
    return rule;
}

TriangleRule TriangleRule::make(int degree) {
    if (degree < 1) degree = 1;
    // Collapse [0,1]^2 onto the triangle via (u, v(1-u)); the extra factor
    // (1-u) raises the u-degree by one.
    const int nu = (degree + 3) / 2; // 2*nu-1 >= degree+1
    const int nv = (degree + 2) / 2; // 2*nv-1 >= degree
    const SegmentRule gu = SegmentRule::gauss(nu);
    const SegmentRule gv = SegmentRule::gauss(nv);

    TriangleRule rule;
    rule.degree = degree;
    rule.points.reserve(static_cast<size_t>(nu * nv));
    rule.weights.reserve(static_cast<size_t>(nu * nv));
    for (int i = 0; i < nu; ++i) {
        const double u = gu.points[static_cast<size_t>(i)];
        for (int j = 0; j < nv; ++j) {
            const double v = gv.points[static_cast<size_t>(j)];
            rule.points.emplace_back(u, v * (1.0 - u));
            rule.weights.push_back(gu.weights[static_cast<size_t>(i)] *
                                   gv.weights[static_cast<size_t>(j)] * (1.0 - u));
        }
    }
    return rule;
}

double integrate_segment(const std::function<double(Vec2)>& f, Vec2 a, Vec2 b,
                         const SegmentRule& rule) {
    const double length = (b - a).norm();
    if (length == 0.0) return 0.0;
    double sum = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k) {
        const Vec2 p = a + rule.points[k] * (b - a);
        sum += rule.weights[k] * f(p);
    }
    return sum * length;
}

double integrate_interval(const std::function<double(double)>& g, double t0, double t1,
                          const SegmentRule& rule) {
    if (t0 == t1) return 0.0;
    double sum = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k)
        sum += rule.weights[k] * g(t0 + rule.points[k] * (t1 - t0));
    return sum * (t1 - t0);
}

double integrate_triangle(const std::function<double(Vec2)>& f, const TriangleRule& rule) {
    double sum = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k)
        sum += rule.weights[k] * f(rule.points[k]);
    return sum;
}

double integrate_triangle_mapped(const std::function<double(Vec2)>& f,
                                 const Eigen::Matrix2d& B, const Vec2& b,
                                 const TriangleRule& rule) {
    double sum = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k)
        sum += rule.weights[k] * f(B * rule.points[k] + b);
    return sum * B.determinant();
}

} // namespace expfit
