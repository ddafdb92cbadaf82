#include "expfit/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

using namespace expfit;

TEST_SUITE_BEGIN("mesh");

namespace {

const std::vector<std::string> all_sides = {"left", "right", "bottom", "top"};

// brute-force edge census, independent of the mesh's own edge table
std::map<std::pair<int, int>, int> edge_census(const Mesh& m) {
    std::map<std::pair<int, int>, int> count;
    for (int t = 0; t < m.num_triangles(); ++t)
        for (int i = 0; i < 3; ++i) {
            int a = m.triangle(t)[size_t(i)];
            int b = m.triangle(t)[size_t((i + 1) % 3)];
            if (a > b) std::swap(a, b);
            count[{a, b}]++;
        }
    return count;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

std::vector<std::pair<double, double>> coordinate_multiset(const Mesh& m) {
    std::vector<std::pair<double, double>> pts;
    for (int v = 0; v < m.num_vertices(); ++v)
        pts.emplace_back(m.vertex(v).x(), m.vertex(v).y());
    std::sort(pts.begin(), pts.end());
    return pts;
}

} // namespace

TEST_CASE("unit square generator counts") {
    const Mesh m1 = generate_unit_square(1, all_sides);
    CHECK(m1.num_vertices() == 4);
    CHECK(m1.num_triangles() == 2);
    CHECK(m1.num_boundary_edges() == 4);
    for (int i = 0; i < m1.num_boundary_edges(); ++i)
        CHECK(m1.boundary_edge(i).marker == Marker::Dirichlet);

    const Mesh m2 = generate_unit_square(2, all_sides);
    CHECK(m2.num_vertices() == 9);
    CHECK(m2.num_triangles() == 8);
    CHECK(m2.max_edge_length() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
}

TEST_CASE("interior edges shared by exactly two triangles") {
    const Mesh m = generate_unit_square(4, all_sides);
    const auto census = edge_census(m);
    int boundary = 0;
    for (const auto& [edge, count] : census) {
        CHECK((count == 1 || count == 2));
        if (count == 1) ++boundary;
    }
    CHECK(boundary == m.num_boundary_edges());
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("positive orientation everywhere") {
    const Mesh m = generate_unit_square(3, {"left"});
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.triangle_area(t) > 0.0);
}

TEST_CASE("refinement") {
    const Mesh m = generate_unit_square(1, all_sides);
    const Mesh r = refine_uniform(m);
    CHECK(r.num_triangles() == 8);
    CHECK(r.total_area() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.max_edge_length() == doctest::Approx(m.max_edge_length() / 2).epsilon(1e-15));

    // refining twice reproduces the 4n structured mesh up to numbering
    const Mesh rr = refine_uniform(r);
    const Mesh direct = generate_unit_square(4, all_sides);
    CHECK(rr.num_triangles() == direct.num_triangles());
    CHECK(rr.num_vertices() == direct.num_vertices());
    const auto a = coordinate_multiset(rr);
    const auto b = coordinate_multiset(direct);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == doctest::Approx(b[i].first).epsilon(1e-14));
        CHECK(a[i].second == doctest::Approx(b[i].second).epsilon(1e-14));
    }

    // markers inherited
    int dcount = 0;
    for (int i = 0; i < r.num_boundary_edges(); ++i)
        if (r.boundary_edge(i).marker == Marker::Dirichlet) ++dcount;
    CHECK(dcount == r.num_boundary_edges());

    Mesh many = generate_unit_square(2, all_sides);
    for (int k = 0; k < 3; ++k) many = refine_uniform(many);
    CHECK(many.total_area() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("save/load round trip") {
    const Mesh m = generate_unit_square(2, {"left", "top"});
    const auto path = temp_file("expfit_mesh_roundtrip.txt");
    save_mesh(m, path.string());
    const Mesh loaded = load_mesh(path.string());
    REQUIRE(loaded.num_vertices() == m.num_vertices());
    REQUIRE(loaded.num_triangles() == m.num_triangles());
    REQUIRE(loaded.num_boundary_edges() == m.num_boundary_edges());
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(loaded.vertex(v).x() == m.vertex(v).x());
        CHECK(loaded.vertex(v).y() == m.vertex(v).y());
    }
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(loaded.triangle(t) == m.triangle(t));
    std::filesystem::remove(path);
}

TEST_CASE("loader rejects malformed files") {
    const auto path = temp_file("expfit_mesh_bad.txt");

    // triangle referencing a nonexistent vertex: the error names the line
    std::ofstream(path) << "3 1 3\n1 0 0\n2 1 0\n3 0 1\n1 1 2 9\n1 2 D\n2 3 D\n3 1 D\n";
    try {
        load_mesh(path.string());
        CHECK(false);
    } catch (const MeshError& e) {
        CHECK(e.line() == 5);
    }

    // unknown marker
    std::ofstream(path) << "3 1 3\n1 0 0\n2 1 0\n3 0 1\n1 1 2 3\n1 2 D\n2 3 Q\n3 1 D\n";
    CHECK_THROWS_AS(load_mesh(path.string()), MeshError);

    // marker on a nonexistent edge -> nonconforming
    std::ofstream(path) << "4 2 4\n1 0 0\n2 1 0\n3 1 1\n4 0 1\n1 1 2 3\n2 1 3 4\n"
                           "1 2 D\n2 3 D\n3 4 D\n2 4 D\n";
    CHECK_THROWS_AS(load_mesh(path.string()), MeshError);

    // missing marker for a boundary edge
    std::ofstream(path) << "3 1 3\n1 0 0\n2 1 0\n3 0 1\n1 1 2 3\n1 2 D\n2 3 D\n2 3 N\n";
    CHECK_THROWS_AS(load_mesh(path.string()), MeshError);

    std::filesystem::remove(path);
}

TEST_CASE("loader reorients clockwise triangles") {
    const auto path = temp_file("expfit_mesh_cw.txt");
    // triangle listed clockwise: (0,0),(0,1),(1,0)
    std::ofstream(path) << "3 1 3\n1 0 0\n2 1 0\n3 0 1\n1 1 3 2\n1 2 D\n2 3 D\n3 1 D\n";
    const Mesh m = load_mesh(path.string());
    CHECK(m.triangle_area(0) > 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("affine maps") {
    // identity on the reference triangle itself
    {
        std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}};
        std::vector<std::array<int, 3>> t = {{0, 1, 2}};
        std::vector<Mesh::BoundaryEdge> b = {{0, 1, Marker::Dirichlet},
                                             {1, 2, Marker::Dirichlet},
                                             {2, 0, Marker::Dirichlet}};
        const Mesh m(v, t, b);
        const AffineMap map = affine_map(m, 0);
        CHECK((map.B - Eigen::Matrix2d::Identity()).norm() == 0.0);
        CHECK(map.b.norm() == 0.0);
        CHECK(map.detB == 1.0);
    }
    // scaling triangle
    {
        std::vector<Vec2> v = {{0, 0}, {2, 0}, {0, 2}};
        std::vector<std::array<int, 3>> t = {{0, 1, 2}};
        std::vector<Mesh::BoundaryEdge> b = {{0, 1, Marker::Dirichlet},
                                             {1, 2, Marker::Dirichlet},
                                             {2, 0, Marker::Dirichlet}};
        const Mesh m(v, t, b);
        const AffineMap map = affine_map(m, 0);
        CHECK((map.B - 2.0 * Eigen::Matrix2d::Identity()).norm() == 0.0);
        CHECK(map.detB == 4.0);
        // vertices map in stored order
        CHECK((map.to_physical({0, 0}) - Vec2(0, 0)).norm() == 0.0);
        CHECK((map.to_physical({1, 0}) - Vec2(2, 0)).norm() == 0.0);
        CHECK((map.to_physical({0, 1}) - Vec2(0, 2)).norm() == 0.0);
    }
    // random nondegenerate triangle: map(inverse(p)) = p
    {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        Vec2 a, b, c;
        do {
            a = {u(rng), u(rng)};
            b = {u(rng), u(rng)};
            c = {u(rng), u(rng)};
        } while (((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x()) < 0.5);
        std::vector<Vec2> v = {a, b, c};
        std::vector<std::array<int, 3>> t = {{0, 1, 2}};
        std::vector<Mesh::BoundaryEdge> be = {{0, 1, Marker::Dirichlet},
                                              {1, 2, Marker::Dirichlet},
                                              {2, 0, Marker::Dirichlet}};
        const Mesh m(v, t, be);
        const AffineMap map = affine_map(m, 0);
        for (int k = 0; k < 100; ++k) {
            const Vec2 p(u(rng), u(rng));
            CHECK((map.to_physical(map.to_reference(p)) - p).norm() < 1e-13);
        }
        // map and inverse compose to the identity on the three vertices
        for (const Vec2& q : {a, b, c})
            CHECK((map.to_physical(map.to_reference(q)) - q).norm() < 1e-14);
    }
    // degenerate triangle
    {
        CHECK_THROWS_AS((Mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {})), MeshError);
    }
}

TEST_CASE("point location by walking") {
    const Mesh m = generate_unit_square(8, all_sides);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int hint = 0;
    for (int k = 0; k < 200; ++k) {
        const Vec2 p(u(rng), u(rng));
        const int t = m.locate(p, hint);
        REQUIRE(t >= 0);
        hint = t;
        // verify membership via barycentric coordinates
        const AffineMap map = affine_map(m, t);
        const Vec2 xi = map.to_reference(p);
        CHECK(xi.x() >= -1e-12);
        CHECK(xi.y() >= -1e-12);
        CHECK(xi.x() + xi.y() <= 1.0 + 1e-12);
    }
    CHECK(m.locate({2.0, 0.5}) == -1);
    CHECK(m.locate({1.0, 1.0}) >= 0); // corner point still found
}

TEST_CASE("marker partition on mixed boundaries") {
    const Mesh m = generate_unit_square(3, {"left", "right"});
    int nd = 0, nn = 0;
    for (int i = 0; i < m.num_boundary_edges(); ++i)
        (m.boundary_edge(i).marker == Marker::Dirichlet ? nd : nn)++;
    CHECK(nd == 6);
    CHECK(nn == 6);
}

TEST_SUITE_END();
