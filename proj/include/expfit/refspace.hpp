#ifndef EXPFIT_REFSPACE_HPP
#define EXPFIT_REFSPACE_HPP

#include "expfit/common.hpp"

#include <vector>

namespace expfit {

/// Divergence-free vector polynomial basis on the reference element.
///
/// Members have components linear in the coordinates, stored as
/// coefficients over the monomials {1, x, y, z}; the polynomial
/// divergence of every member vanishes coefficient-wise. In 2-D the
/// space for order k has dimension (k+1)(k+4)/2.
struct DivFreeBasis {
    int order = 0;     // k
    int space_dim = 2; // 2 or 3

    // rows: vector components; columns: monomials {1, x, y, z}
    std::vector<Eigen::Matrix<double, 3, 4>> members;

    int size() const { return static_cast<int>(members.size()); }

    Vec2 eval2(int i, const Vec2& p) const {
        const auto& c = members[static_cast<size_t>(i)];
        return Vec2(c(0, 0) + c(0, 1) * p.x() + c(0, 2) * p.y(),
                    c(1, 0) + c(1, 1) * p.x() + c(1, 2) * p.y());
    }

    Vec3 eval3(int i, const Vec3& p) const {
        const auto& c = members[static_cast<size_t>(i)];
        Vec3 v;
        for (int r = 0; r < 3; ++r)
            v(r) = c(r, 0) + c(r, 1) * p.x() + c(r, 2) * p.y() + c(r, 3) * p.z();
        return v;
    }

    /// Constant polynomial divergence of member i (exact coefficient sum).
    double divergence(int i) const {
        const auto& c = members[static_cast<size_t>(i)];
        return c(0, 1) + c(1, 2) + c(2, 3);
    }
};

/// dim RT_k^0 = dim P_{k+1} - 1 = (k+1)(k+4)/2 in 2-D.
constexpr int divfree_dimension_2d(int k) { return (k + 1) * (k + 4) / 2; }

/// span{(1,0), (0,1)} on the reference triangle.
DivFreeBasis rt0_basis_2d();

/// The five linear divergence-free members on the reference triangle,
/// in a fixed order: (x, 1-2x-y), (0, -1+4x), (-x, y), (1-4y, 0),
/// (-1+x+2y, -y).
DivFreeBasis rt1_basis_2d();

/// span{e1, e2, e3} on the reference tetrahedron.
DivFreeBasis rt0_basis_3d();

enum class NodeSetKind { Vertices, Midpoints, P2, TetVertices, TetFaceCenters };

NodeSetKind parse_node_set_kind(const std::string& name);
std::string node_set_kind_name(NodeSetKind kind);

/// Points on the reference triangle where the interpolative constraints
/// are enforced, plus the designated start point of the integration
/// paths. Cardinality is always N_k + 1.
struct NodeSet {
    NodeSetKind kind = NodeSetKind::Vertices;
    std::vector<Vec2> points;
    Vec2 start = Vec2::Zero();

    int size() const { return static_cast<int>(points.size()); }
};

/// 3-D analogue on the reference tetrahedron.
struct TetNodeSet {
    NodeSetKind kind = NodeSetKind::TetVertices;
    std::vector<Vec3> points;
    Vec3 start = Vec3::Zero();

    int size() const { return static_cast<int>(points.size()); }
};

/// Node set for order k; valid pairings are (0, Vertices), (0, Midpoints)
/// and (1, P2). Throws on anything else.
NodeSet node_set_2d(int k, NodeSetKind kind);

/// Node set on the reference tetrahedron (TetVertices or TetFaceCenters).
TetNodeSet node_set_3d(NodeSetKind kind);

} // namespace expfit

#endif
