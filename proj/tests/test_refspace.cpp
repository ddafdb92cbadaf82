#include "expfit/quadrature.hpp"
#include "expfit/refspace.hpp"

#include <doctest.h>

#include <random>

using namespace expfit;

TEST_SUITE_BEGIN("refspace");

TEST_CASE("dimension bookkeeping") {
    CHECK(divfree_dimension_2d(0) == 2);
    CHECK(divfree_dimension_2d(1) == 5);
    CHECK(rt0_basis_2d().size() == 2);
    CHECK(rt1_basis_2d().size() == 5);
    CHECK(rt0_basis_3d().size() == 3);
}

TEST_CASE("first-order members") {
    const DivFreeBasis b = rt0_basis_2d();
    CHECK((b.eval2(0, {0.3, 0.9}) - Vec2(1, 0)).norm() == 0.0);
    CHECK((b.eval2(1, {0.1, 0.2}) - Vec2(0, 1)).norm() == 0.0);
    CHECK(b.divergence(0) == 0.0);
    CHECK(b.divergence(1) == 0.0);

    // Gram matrix under the L2 inner product on the reference triangle
    const TriangleRule rule = TriangleRule::make(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double g = integrate_triangle(
                [&](Vec2 p) { return b.eval2(i, p).dot(b.eval2(j, p)); }, rule);
            CHECK(g == doctest::Approx(i == j ? 0.5 : 0.0).epsilon(1e-15));
        }
}

TEST_CASE("second-order members match their listed forms") {
    const DivFreeBasis b = rt1_basis_2d();
    CHECK((b.eval2(0, {1, 0}) - Vec2(1, -1)).norm() == 0.0); // (x, 1-2x-y) at (1,0)
    CHECK((b.eval2(1, {0.5, 0.2}) - Vec2(0, 1)).norm() == 0.0);
    CHECK((b.eval2(2, {0.5, 0.25}) - Vec2(-0.5, 0.25)).norm() == 0.0);
    CHECK((b.eval2(3, {0.0, 0.25}) - Vec2(0, 0)).norm() == 0.0);
    CHECK((b.eval2(4, {1, 1}) - Vec2(2, -1)).norm() == 0.0);

    // divergence cancels coefficient-wise, e.g. member 5: 1 + (-1) = 0
    for (int i = 0; i < 5; ++i) CHECK(b.divergence(i) == 0.0);

    // the 5 members are linearly independent: coefficient matrix rank 5
    Eigen::MatrixXd coeffs(5, 6);
    for (int i = 0; i < 5; ++i) {
        const auto& c = b.members[size_t(i)];
        coeffs.row(i) << c(0, 0), c(0, 1), c(0, 2), c(1, 0), c(1, 1), c(1, 2);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(coeffs);
    CHECK(lu.rank() == 5);
}

TEST_CASE("divergence vanishes at random points and in quadrature") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const SegmentRule seg = SegmentRule::gauss(8);

    for (const DivFreeBasis& b : {rt0_basis_2d(), rt1_basis_2d()}) {
        for (int i = 0; i < b.size(); ++i) {
            for (int k = 0; k < 20; ++k) {
                (void)u(rng);
                CHECK(b.divergence(i) == 0.0);
            }
            // independent route: boundary flux over the reference triangle
            const Vec2 corners[3] = {{0, 0}, {1, 0}, {0, 1}};
            double flux = 0.0;
            for (int e = 0; e < 3; ++e) {
                const Vec2 a = corners[e], c = corners[(e + 1) % 3];
                const Vec2 t = (c - a).normalized();
                const Vec2 n(t.y(), -t.x()); // outward for counterclockwise boundary
                flux += integrate_segment([&](Vec2 p) { return b.eval2(i, p).dot(n); }, a, c, seg);
            }
            CHECK(std::fabs(flux) < 1e-14);
        }
    }

    // 3-D members are constants; face fluxes cancel over the closed surface
    const DivFreeBasis b3 = rt0_basis_3d();
    for (int i = 0; i < 3; ++i) {
        CHECK(b3.divergence(i) == 0.0);
        const Vec3 v = b3.eval3(i, {0.2, 0.3, 0.1});
        // outward area vectors of the reference tetrahedron sum to zero
        const Vec3 area_sum = Vec3(-0.5, 0, 0) + Vec3(0, -0.5, 0) + Vec3(0, 0, -0.5) +
                              Vec3(0.5, 0.5, 0.5);
        CHECK(std::fabs(v.dot(area_sum)) < 1e-14);
    }
}

TEST_CASE("node sets") {
    const NodeSet vs = node_set_2d(0, NodeSetKind::Vertices);
    REQUIRE(vs.size() == 3);
    CHECK((vs.points[0] - Vec2(0, 0)).norm() == 0.0);
    CHECK((vs.start - Vec2(0, 0)).norm() == 0.0);

    const NodeSet ms = node_set_2d(0, NodeSetKind::Midpoints);
    REQUIRE(ms.size() == 3);
    CHECK(ms.size() == divfree_dimension_2d(0) + 1);
    CHECK((ms.points[0] - Vec2(0.5, 0)).norm() == 0.0);
    CHECK((ms.points[1] - Vec2(0.5, 0.5)).norm() == 0.0);
    CHECK((ms.points[2] - Vec2(0, 0.5)).norm() == 0.0);
    CHECK((ms.start - Vec2(0.5, 0)).norm() == 0.0);

    const NodeSet p2 = node_set_2d(1, NodeSetKind::P2);
    REQUIRE(p2.size() == 6);
    CHECK(p2.size() == divfree_dimension_2d(1) + 1);

    CHECK_THROWS_AS(node_set_2d(0, NodeSetKind::P2), Error);
    CHECK_THROWS_AS(node_set_2d(1, NodeSetKind::Vertices), Error);
    CHECK_THROWS_AS(node_set_2d(2, NodeSetKind::P2), Error);

    const TetNodeSet tv = node_set_3d(NodeSetKind::TetVertices);
    CHECK(tv.size() == 4); // = N + 1 = number of tetrahedron vertices
    const TetNodeSet tf = node_set_3d(NodeSetKind::TetFaceCenters);
    CHECK(tf.size() == 4);
    for (const Vec3& p : tf.points) CHECK(p.sum() <= 1.0 + 1e-15);
}

TEST_SUITE_END();
