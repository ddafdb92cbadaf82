#ifndef EXPFIT_MESH_HPP
#define EXPFIT_MESH_HPP

#include "expfit/common.hpp"

#include <array>
#include <string>
#include <vector>

namespace expfit {

enum class Marker { Dirichlet, Neumann };

/// Affine map T(xi) = B*xi + b from the reference triangle
/// (0,0),(1,0),(0,1) onto a physical triangle; det(B) > 0.
struct AffineMap {
    Eigen::Matrix2d B;
    Vec2 b;
    double detB = 0.0;
    Eigen::Matrix2d Binv;

    Vec2 to_physical(const Vec2& xi) const { return B * xi + b; }
    Vec2 to_reference(const Vec2& x) const { return Binv * (x - b); }
};

/// Conforming triangulation of a polygonal 2-D domain.
///
/// Triangles are stored counterclockwise with 0-based vertex indices
/// (file I/O uses 1-based ids). Construction validates conformity:
/// every edge belongs to one or two triangles, and each single-triangle
/// edge carries exactly one boundary marker.
class Mesh {
public:
    struct BoundaryEdge {
        int a, b; // vertex indices
        Marker marker;
    };
    struct Edge {
        int a, b;         // sorted vertex indices, a < b
        int tri[2] = {-1, -1};
        int boundary = -1; // index into boundary_ when on the boundary
    };

    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
         std::vector<BoundaryEdge> boundary);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_boundary_edges() const { return static_cast<int>(boundary_.size()); }

    const Vec2& vertex(int v) const { return vertices_[static_cast<size_t>(v)]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[static_cast<size_t>(t)]; }
    const BoundaryEdge& boundary_edge(int i) const { return boundary_[static_cast<size_t>(i)]; }
    const Edge& edge(int e) const { return edges_[static_cast<size_t>(e)]; }

    /// Index of the undirected edge between vertices a and b, or -1.
    int find_edge(int a, int b) const;

    /// Edge ids of triangle t; local edge i joins local vertices i and (i+1)%3.
    const std::array<int, 3>& triangle_edges(int t) const {
        return tri_edges_[static_cast<size_t>(t)];
    }

    /// Neighbor of t across its local edge i (-1 on the boundary).
    int neighbor(int t, int i) const;

    double triangle_area(int t) const;
    double max_edge_length() const;
    double total_area() const;

    /// Midpoint of local edge i of triangle t (edge from vertex i to (i+1)%3).
    Vec2 edge_midpoint(int t, int i) const;

    bool vertex_on_dirichlet(int v) const { return vertex_dirichlet_[static_cast<size_t>(v)]; }

    /// Locate the triangle containing p (walking search with exhaustive
    /// fallback); returns -1 if p lies outside the mesh. `hint` seeds the walk.
    int locate(const Vec2& p, int hint = 0) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    std::vector<bool> vertex_dirichlet_;

    void build_edges();
};

/// Structured mesh of the unit square with n cells per side, each cell
/// split along its lower-left -> upper-right diagonal. Sides listed in
/// `dirichlet_sides` ("left","right","bottom","top") get Dirichlet
/// markers, the rest Neumann. Mesh size h = sqrt(2)/n.
Mesh generate_unit_square(int n, const std::vector<std::string>& dirichlet_sides);

/// Uniform refinement: every triangle splits into four via edge
/// midpoints; boundary markers are inherited.
Mesh refine_uniform(const Mesh& m);

Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& m, const std::string& path);

AffineMap affine_map(const Mesh& m, int t);

} // namespace expfit

#endif
