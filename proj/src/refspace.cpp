#include "expfit/refspace.hpp"

namespace expfit {

namespace {

Eigen::Matrix<double, 3, 4> member2(double ax0, double ax1, double ax2, //
                                    double ay0, double ay1, double ay2) {
    Eigen::Matrix<double, 3, 4> c = Eigen::Matrix<double, 3, 4>::Zero();
    c(0, 0) = ax0; c(0, 1) = ax1; c(0, 2) = ax2;
    c(1, 0) = ay0; c(1, 1) = ay1; c(1, 2) = ay2;
    return c;
}

} // namespace

DivFreeBasis rt0_basis_2d() {
    DivFreeBasis b;
    b.order = 0;
    b.space_dim = 2;
    b.members.push_back(member2(1, 0, 0, /**/ 0, 0, 0));
    b.members.push_back(member2(0, 0, 0, /**/ 1, 0, 0));
    return b;
}

DivFreeBasis rt1_basis_2d() {
    DivFreeBasis b;
    b.order = 1;
    b.space_dim = 2;
    b.members.push_back(member2(0, 1, 0, /**/ 1, -2, -1));  // (x, 1-2x-y)
    b.members.push_back(member2(0, 0, 0, /**/ -1, 4, 0));   // (0, -1+4x)
    b.members.push_back(member2(0, -1, 0, /**/ 0, 0, 1));   // (-x, y)
    b.members.push_back(member2(1, 0, -4, /**/ 0, 0, 0));   // (1-4y, 0)
    b.members.push_back(member2(-1, 1, 2, /**/ 0, 0, -1));  // (-1+x+2y, -y)
    return b;
}

DivFreeBasis rt0_basis_3d() {
    DivFreeBasis b;
    b.order = 0;
    b.space_dim = 3;
    for (int i = 0; i < 3; ++i) {
        Eigen::Matrix<double, 3, 4> c = Eigen::Matrix<double, 3, 4>::Zero();
        c(i, 0) = 1.0;
        b.members.push_back(c);
    }
    return b;
}

NodeSetKind parse_node_set_kind(const std::string& name) {
    if (name == "vertices") return NodeSetKind::Vertices;
    if (name == "midpoints") return NodeSetKind::Midpoints;
    if (name == "p2") return NodeSetKind::P2;
    if (name == "tet_vertices") return NodeSetKind::TetVertices;
    if (name == "tet_face_centers") return NodeSetKind::TetFaceCenters;
    throw Error("unknown node set kind '" + name + "'");
}

std::string node_set_kind_name(NodeSetKind kind) {
    switch (kind) {
    case NodeSetKind::Vertices: return "vertices";
    case NodeSetKind::Midpoints: return "midpoints";
    case NodeSetKind::P2: return "p2";
    case NodeSetKind::TetVertices: return "tet_vertices";
    case NodeSetKind::TetFaceCenters: return "tet_face_centers";
    }
    return "?";
}

NodeSet node_set_2d(int k, NodeSetKind kind) {
    const Vec2 v1(0, 0), v2(1, 0), v3(0, 1);
    // midpoint i joins vertex i and vertex (i mod 3)+1
    const Vec2 m1(0.5, 0), m2(0.5, 0.5), m3(0, 0.5);

    NodeSet ns;
    ns.kind = kind;
    if (k == 0 && kind == NodeSetKind::Vertices) {
        ns.points = {v1, v2, v3};
        ns.start = v1;
    } else if (k == 0 && kind == NodeSetKind::Midpoints) {
        ns.points = {m1, m2, m3};
        ns.start = m1;
    } else if (k == 1 && kind == NodeSetKind::P2) {
        ns.points = {v1, v2, v3, m1, m2, m3};
        ns.start = v1;
    } else {
        throw Error("invalid node set pairing: k=" + std::to_string(k) + ", kind=" +
                    node_set_kind_name(kind));
    }
    return ns;
}

TetNodeSet node_set_3d(NodeSetKind kind) {
    const Vec3 v1(0, 0, 0), v2(1, 0, 0), v3(0, 1, 0), v4(0, 0, 1);
    TetNodeSet ns;
    ns.kind = kind;
    if (kind == NodeSetKind::TetVertices) {
        ns.points = {v1, v2, v3, v4};
        ns.start = v1;
    } else if (kind == NodeSetKind::TetFaceCenters) {
        // face center i is the centroid of the face opposite vertex i
        const Vec3 c1 = (v2 + v3 + v4) / 3.0;
        const Vec3 c2 = (v1 + v3 + v4) / 3.0;
        const Vec3 c3 = (v1 + v2 + v4) / 3.0;
        const Vec3 c4 = (v1 + v2 + v3) / 3.0;
        ns.points = {c1, c2, c3, c4};
        ns.start = c1;
    } else {
        throw Error("invalid 3-D node set kind: " + node_set_kind_name(kind));
    }
    return ns;
}

} // namespace expfit
