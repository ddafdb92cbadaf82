#include "expfit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace expfit {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)),
      boundary_(std::move(boundary)) {
    const int nv = num_vertices();
    for (size_t t = 0; t < triangles_.size(); ++t) {
        for (int v : triangles_[t])
            if (v < 0 || v >= nv)
                throw MeshError("triangle " + std::to_string(t + 1) +
                                " references nonexistent vertex " + std::to_string(v + 1));
        const auto& tri = triangles_[t];
        if (signed_area(vertices_[size_t(tri[0])], vertices_[size_t(tri[1])],
                        vertices_[size_t(tri[2])]) <= 0.0)
            throw MeshError("triangle " + std::to_string(t + 1) +
                            " is degenerate or clockwise");
    }
    for (const auto& e : boundary_)
        if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv || e.a == e.b)
            throw MeshError("boundary edge references nonexistent vertex");
    build_edges();
}

void Mesh::build_edges() {
    std::map<std::pair<int, int>, int> index;
    edges_.clear();
    tri_edges_.assign(triangles_.size(), {-1, -1, -1});

    for (size_t t = 0; t < triangles_.size(); ++t) {
        for (int i = 0; i < 3; ++i) {
            int a = triangles_[t][size_t(i)];
            int b = triangles_[t][size_t((i + 1) % 3)];
            if (a > b) std::swap(a, b);
            auto [it, inserted] = index.try_emplace({a, b}, static_cast<int>(edges_.size()));
            if (inserted) {
                Edge e;
                e.a = a;
                e.b = b;
                edges_.push_back(e);
            }
            Edge& e = edges_[size_t(it->second)];
            if (e.tri[0] == -1)
                e.tri[0] = static_cast<int>(t);
            else if (e.tri[1] == -1)
                e.tri[1] = static_cast<int>(t);
            else
                throw MeshError("nonconforming mesh: edge shared by more than two triangles");
            tri_edges_[t][size_t(i)] = it->second;
        }
    }

    // Boundary markers must cover exactly the single-triangle edges.
    std::vector<bool> marked(edges_.size(), false);
    for (size_t i = 0; i < boundary_.size(); ++i) {
        int a = boundary_[i].a, b = boundary_[i].b;
        if (a > b) std::swap(a, b);
        auto it = index.find({a, b});
        if (it == index.end())
            throw MeshError("nonconforming mesh: boundary edge (" + std::to_string(a + 1) +
                            "," + std::to_string(b + 1) + ") is not a mesh edge");
        Edge& e = edges_[size_t(it->second)];
        if (e.tri[1] != -1)
            throw MeshError("nonconforming mesh: interior edge carries a boundary marker");
        if (marked[size_t(it->second)])
            throw MeshError("nonconforming mesh: boundary edge has two markers");
        marked[size_t(it->second)] = true;
        e.boundary = static_cast<int>(i);
    }
    for (size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].tri[1] == -1 && !marked[e])
            throw MeshError("nonconforming mesh: boundary edge (" + std::to_string(edges_[e].a + 1) +
                            "," + std::to_string(edges_[e].b + 1) + ") has no marker");

    vertex_dirichlet_.assign(vertices_.size(), false);
    for (const auto& be : boundary_)
        if (be.marker == Marker::Dirichlet) {
            vertex_dirichlet_[size_t(be.a)] = true;
            vertex_dirichlet_[size_t(be.b)] = true;
        }
}

int Mesh::find_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].a == a && edges_[e].b == b) return static_cast<int>(e);
    return -1;
}

int Mesh::neighbor(int t, int i) const {
    const Edge& e = edges_[size_t(tri_edges_[size_t(t)][size_t(i)])];
    return e.tri[0] == t ? e.tri[1] : e.tri[0];
}

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles_[size_t(t)];
    return signed_area(vertices_[size_t(tri[0])], vertices_[size_t(tri[1])],
                       vertices_[size_t(tri[2])]);
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& e : edges_)
        h = std::max(h, (vertices_[size_t(e.a)] - vertices_[size_t(e.b)]).norm());
    return h;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < num_triangles(); ++t) a += triangle_area(t);
    return a;
}

Vec2 Mesh::edge_midpoint(int t, int i) const {
    const auto& tri = triangles_[size_t(t)];
    return 0.5 * (vertices_[size_t(tri[size_t(i)])] + vertices_[size_t(tri[size_t((i + 1) % 3)])]);
}

int Mesh::locate(const Vec2& p, int hint) const {
    const double tol = 1e-12;
    int t = (hint >= 0 && hint < num_triangles()) ? hint : 0;
    // walk: step across the edge with the most negative barycentric coordinate
    for (int step = 0; step < 2 * num_triangles() + 8; ++step) {
        const auto& tri = triangles_[size_t(t)];
        const Vec2& a = vertices_[size_t(tri[0])];
        const Vec2& b = vertices_[size_t(tri[1])];
        const Vec2& c = vertices_[size_t(tri[2])];
        const double area = signed_area(a, b, c);
        const double l0 = signed_area(p, b, c) / area;
        const double l1 = signed_area(a, p, c) / area;
        const double l2 = signed_area(a, b, p) / area;
        if (l0 >= -tol && l1 >= -tol && l2 >= -tol) return t;
        // barycentric l0 opposes local edge 1 (vertices 1-2), etc.
        int worst_edge = 1;
        double worst = l0;
        if (l1 < worst) { worst = l1; worst_edge = 2; }
        if (l2 < worst) { worst = l2; worst_edge = 0; }
        const int next = neighbor(t, worst_edge);
        if (next < 0) break;
        t = next;
    }
    // fallback: exhaustive scan (robust near nonconvex boundaries)
    for (int s = 0; s < num_triangles(); ++s) {
        const auto& tri = triangles_[size_t(s)];
        const Vec2& a = vertices_[size_t(tri[0])];
        const Vec2& b = vertices_[size_t(tri[1])];
        const Vec2& c = vertices_[size_t(tri[2])];
        const double area = signed_area(a, b, c);
        if (signed_area(p, b, c) / area >= -tol && signed_area(a, p, c) / area >= -tol &&
            signed_area(a, b, p) / area >= -tol)
            return s;
    }
    return -1;
}

Mesh generate_unit_square(int n, const std::vector<std::string>& dirichlet_sides) {
    if (n < 1) throw MeshError("unit-square resolution must be >= 1");
    auto listed = [&](const std::string& s) {
        return std::find(dirichlet_sides.begin(), dirichlet_sides.end(), s) !=
               dirichlet_sides.end();
    };
    const Marker left = listed("left") ? Marker::Dirichlet : Marker::Neumann;
    const Marker right = listed("right") ? Marker::Dirichlet : Marker::Neumann;
    const Marker bottom = listed("bottom") ? Marker::Dirichlet : Marker::Neumann;
    const Marker top = listed("top") ? Marker::Dirichlet : Marker::Neumann;

    const int m = n + 1;
    std::vector<Vec2> verts;
    verts.reserve(size_t(m) * size_t(m));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            verts.emplace_back(double(i) / n, double(j) / n);
    auto vid = [m](int i, int j) { return j * m + i; };

    std::vector<std::array<int, 3>> tris;
    tris.reserve(2u * size_t(n) * size_t(n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            // diagonal from the cell's lower-left to upper-right corner
            tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }

    std::vector<Mesh::BoundaryEdge> bnd;
    for (int i = 0; i < n; ++i) {
        bnd.push_back({vid(i, 0), vid(i + 1, 0), bottom});
        bnd.push_back({vid(i, n), vid(i + 1, n), top});
        bnd.push_back({vid(0, i), vid(0, i + 1), left});
        bnd.push_back({vid(n, i), vid(n, i + 1), right});
    }
    return Mesh(std::move(verts), std::move(tris), std::move(bnd));
}

Mesh refine_uniform(const Mesh& m) {
    std::vector<Vec2> verts;
    verts.reserve(size_t(m.num_vertices()) + size_t(m.num_edges()));
    for (int v = 0; v < m.num_vertices(); ++v) verts.push_back(m.vertex(v));
    // one new vertex per edge
    std::vector<int> edge_mid(size_t(m.num_edges()));
    for (int e = 0; e < m.num_edges(); ++e) {
        edge_mid[size_t(e)] = static_cast<int>(verts.size());
        verts.push_back(0.5 * (m.vertex(m.edge(e).a) + m.vertex(m.edge(e).b)));
    }

    std::vector<std::array<int, 3>> tris;
    tris.reserve(4u * size_t(m.num_triangles()));
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangle(t);
        const auto& te = m.triangle_edges(t);
        const int m01 = edge_mid[size_t(te[0])];
        const int m12 = edge_mid[size_t(te[1])];
        const int m20 = edge_mid[size_t(te[2])];
        tris.push_back({tri[0], m01, m20});
        tris.push_back({m01, tri[1], m12});
        tris.push_back({m20, m12, tri[2]});
        tris.push_back({m01, m12, m20});
    }

    std::vector<Mesh::BoundaryEdge> bnd;
    for (int i = 0; i < m.num_boundary_edges(); ++i) {
        const auto& be = m.boundary_edge(i);
        const int e = m.find_edge(be.a, be.b);
        const int mid = edge_mid[size_t(e)];
        bnd.push_back({be.a, mid, be.marker});
        bnd.push_back({mid, be.b, be.marker});
    }
    return Mesh(std::move(verts), std::move(tris), std::move(bnd));
}

namespace {

// next content line (comments stripped); returns false at EOF
bool next_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (!blank) return true;
    }
    return false;
}

} // namespace

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file '" + path + "'");
    std::string line;
    int lineno = 0;

    if (!next_line(in, line, lineno)) throw MeshError("empty mesh file", lineno);
    int nv = 0, nt = 0, nb = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> nv >> nt >> nb) || nv < 3 || nt < 1 || nb < 3)
            throw MeshError("malformed mesh header", lineno);
    }

    std::vector<Vec2> verts(static_cast<size_t>(nv), Vec2::Zero());
    std::vector<bool> seen(static_cast<size_t>(nv), false);
    for (int k = 0; k < nv; ++k) {
        if (!next_line(in, line, lineno)) throw MeshError("unexpected end of vertex list", lineno);
        std::istringstream ss(line);
        int id;
        double x, y;
        if (!(ss >> id >> x >> y) || id < 1 || id > nv)
            throw MeshError("malformed vertex line", lineno);
        verts[static_cast<size_t>(id - 1)] = Vec2(x, y);
        seen[static_cast<size_t>(id - 1)] = true;
    }
    for (int v = 0; v < nv; ++v)
        if (!seen[static_cast<size_t>(v)])
            throw MeshError("vertex " + std::to_string(v + 1) + " missing from file");

    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<size_t>(nt));
    for (int k = 0; k < nt; ++k) {
        if (!next_line(in, line, lineno)) throw MeshError("unexpected end of triangle list", lineno);
        std::istringstream ss(line);
        int id, a, b, c;
        if (!(ss >> id >> a >> b >> c) || id < 1 || id > nt)
            throw MeshError("malformed triangle line", lineno);
        if (a < 1 || a > nv || b < 1 || b > nv || c < 1 || c > nv)
            throw MeshError("triangle references nonexistent vertex", lineno);
        std::array<int, 3> tri = {a - 1, b - 1, c - 1};
        // reorient clockwise input
        if (signed_area(verts[size_t(tri[0])], verts[size_t(tri[1])], verts[size_t(tri[2])]) < 0.0)
            std::swap(tri[1], tri[2]);
        tris.push_back(tri);
    }

    std::vector<Mesh::BoundaryEdge> bnd;
    bnd.reserve(static_cast<size_t>(nb));
    for (int k = 0; k < nb; ++k) {
        if (!next_line(in, line, lineno)) throw MeshError("unexpected end of boundary list", lineno);
        std::istringstream ss(line);
        int a, b;
        std::string marker;
        if (!(ss >> a >> b >> marker) || a < 1 || a > nv || b < 1 || b > nv)
            throw MeshError("malformed boundary line", lineno);
        Marker mk;
        if (marker == "D") mk = Marker::Dirichlet;
        else if (marker == "N") mk = Marker::Neumann;
        else throw MeshError("unknown boundary marker '" + marker + "'", lineno);
        bnd.push_back({a - 1, b - 1, mk});
    }
    return Mesh(std::move(verts), std::move(tris), std::move(bnd));
}

void save_mesh(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file '" + path + "'");
    out << m.num_vertices() << ' ' << m.num_triangles() << ' ' << m.num_boundary_edges() << '\n';
    char buf[80];
    for (int v = 0; v < m.num_vertices(); ++v) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", v + 1, m.vertex(v).x(), m.vertex(v).y());
        out << buf;
    }
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangle(t);
        out << t + 1 << ' ' << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << '\n';
    }
    for (int i = 0; i < m.num_boundary_edges(); ++i) {
        const auto& be = m.boundary_edge(i);
        out << be.a + 1 << ' ' << be.b + 1 << ' '
            << (be.marker == Marker::Dirichlet ? 'D' : 'N') << '\n';
    }
    if (!out) throw MeshError("failed writing mesh file '" + path + "'");
}

AffineMap affine_map(const Mesh& m, int t) {
    const auto& tri = m.triangle(t);
    const Vec2& p1 = m.vertex(tri[0]);
    const Vec2& p2 = m.vertex(tri[1]);
    const Vec2& p3 = m.vertex(tri[2]);
    AffineMap map;
    map.B.col(0) = p2 - p1;
    map.B.col(1) = p3 - p1;
    map.b = p1;
    map.detB = map.B.determinant();
    if (map.detB <= 0.0)
        throw MeshError("degenerate triangle " + std::to_string(t + 1));
    map.Binv = map.B.inverse();
    return map;
}

} // namespace expfit
