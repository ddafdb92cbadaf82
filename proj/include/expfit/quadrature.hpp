#ifndef EXPFIT_QUADRATURE_HPP
#define EXPFIT_QUADRATURE_HPP

#include "expfit/common.hpp"

#include <vector>

namespace expfit {

/// Gauss-Legendre rule on [0,1]. `n` points integrate polynomials of
/// degree <= 2n-1 exactly; weights are positive and sum to 1.
struct SegmentRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0; // exactness degree 2n-1

    static SegmentRule gauss(int n);
};

/// Quadrature on the reference triangle (0,0),(1,0),(0,1), built as a
/// collapsed tensor-product Gauss rule so the stated exactness degree
/// holds to machine precision. Weights are positive and sum to 1/2.
struct TriangleRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree = 0;

    static TriangleRule make(int degree);
};

/// Arc-length integral of f along the segment a -> b. Returns 0 for a == b.
double integrate_segment(const std::function<double(Vec2)>& f, Vec2 a, Vec2 b,
                         const SegmentRule& rule);

/// Signed 1-D integral of g over [t0, t1] (negative orientation allowed).
double integrate_interval(const std::function<double(double)>& g, double t0, double t1,
                          const SegmentRule& rule);

/// Integral of f over the reference triangle.
double integrate_triangle(const std::function<double(Vec2)>& f, const TriangleRule& rule);

/// Integral over a physical triangle: f takes physical coordinates
/// T(xi) = B*xi + b and the result is scaled by det(B).
double integrate_triangle_mapped(const std::function<double(Vec2)>& f,
                                 const Eigen::Matrix2d& B, const Vec2& b,
                                 const TriangleRule& rule);

} // namespace expfit

#endif
