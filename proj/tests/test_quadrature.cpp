#include "expfit/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace expfit;

TEST_SUITE_BEGIN("quadrature");

namespace {

// closed form: int over the reference triangle of x^a y^b = a! b! / (a+b+2)!
double monomial_integral(int a, int b) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return fact(a) * fact(b) / fact(a + b + 2);
}

} // namespace

TEST_CASE("segment rule basics") {
    for (int n : {1, 2, 4, 8, 16, 32}) {
        const SegmentRule rule = SegmentRule::gauss(n);
        REQUIRE(rule.points.size() == static_cast<size_t>(n));
        double wsum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        // exact for s^p up to p = 2n-1
        for (int p = 0; p <= rule.degree; ++p) {
            double sum = 0.0;
            for (size_t k = 0; k < rule.points.size(); ++k)
                sum += rule.weights[k] * std::pow(rule.points[k], p);
            CHECK(sum == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
        }
    }
}

TEST_CASE("segment integration") {
    const SegmentRule rule = SegmentRule::gauss(16);
    CHECK(integrate_segment([](Vec2) { return 1.0; }, {0, 0}, {1, 0}, rule) == doctest::Approx(1.0));
    CHECK(integrate_segment([](Vec2 p) { return std::exp(p.x()); }, {0, 0}, {1, 0}, rule) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(integrate_segment([](Vec2) { return 42.0; }, {0.3, 0.4}, {0.3, 0.4}, rule) == 0.0);
    // diagonal segment: arc-length measure
    CHECK(integrate_segment([](Vec2) { return 1.0; }, {0, 0}, {1, 1}, rule) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    // signed interval integration
    CHECK(integrate_interval([](double t) { return t; }, 1.0, 0.0, rule) ==
          doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("triangle rule exactness") {
    for (int degree : {1, 2, 4, 6, 8, 10}) {
        const TriangleRule rule = TriangleRule::make(degree);
        double wsum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
        for (int a = 0; a + 0 <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                const double val = integrate_triangle(
                    [a, b](Vec2 p) { return std::pow(p.x(), a) * std::pow(p.y(), b); }, rule);
                CHECK(val == doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
            }
    }
}

TEST_CASE("triangle integration examples") {
    CHECK(integrate_triangle([](Vec2) { return 1.0; }, TriangleRule::make(2)) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrate_triangle([](Vec2 p) { return p.x(); }, TriangleRule::make(2)) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const double v = integrate_triangle(
        [](Vec2 p) { return p.x() * p.x() * p.y() * p.y(); }, TriangleRule::make(6));
    CHECK(std::fabs(v - 1.0 / 180.0) < 1e-15);
}

TEST_CASE("mapped triangle integration") {
    // triangle (0,0),(2,0),(0,2): area 2, map B = 2 I
    Eigen::Matrix2d B = 2.0 * Eigen::Matrix2d::Identity();
    const double area =
        integrate_triangle_mapped([](Vec2) { return 1.0; }, B, Vec2(0, 0), TriangleRule::make(2));
    CHECK(area == doctest::Approx(2.0).epsilon(1e-14));
    // int x over that triangle = 4/3
    const double ix =
        integrate_triangle_mapped([](Vec2 p) { return p.x(); }, B, Vec2(0, 0), TriangleRule::make(2));
    CHECK(ix == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("order doubling changes fitted-path integrands below 1e-10") {
    const SegmentRule r16 = SegmentRule::gauss(16);
    const SegmentRule r32 = SegmentRule::gauss(32);
    const double beta = 4.0;
    auto phis = {
        +[](Vec2 p) { return std::exp(-2.0 * p.norm()); },
        +[](Vec2 p) { return 4.0 * std::exp(-2.0 * p.norm()); },
        +[](Vec2 p) { return p.x() + p.y(); },
        +[](Vec2 p) { return 0.0 * p.x(); },
    };
    const Vec2 legs[][2] = {{{0, 0}, {1, 0}}, {{0, 0}, {0.5, 0.5}}, {{1, 0}, {0, 1}}};
    for (auto phi : phis)
        for (const auto& leg : legs) {
            auto f = [&](Vec2 p) { return std::exp(beta * phi(p)); };
            const double a = integrate_segment(f, leg[0], leg[1], r16);
            const double b = integrate_segment(f, leg[0], leg[1], r32);
            CHECK(std::fabs(a - b) < 1e-10);
        }
}

TEST_SUITE_END();
