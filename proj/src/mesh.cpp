#include "nkcert/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "nkcert/error.hpp"

namespace nkcert {

Mesh Mesh::build_uniform(int N) {
    NKCERT_REQUIRE(N >= 1, "Mesh::build_uniform: N must be >= 1, got " + std::to_string(N));

    Mesh m;
    m.n_ = N;
    const std::size_t nv1 = static_cast<std::size_t>(N) + 1;
    const auto vid = [nv1](std::size_t i, std::size_t j) { return j * nv1 + i; };

    m.vertices_.reserve(nv1 * nv1);
    m.vertex_boundary_.reserve(nv1 * nv1);
    for (std::size_t j = 0; j < nv1; ++j) {
        for (std::size_t i = 0; i < nv1; ++i) {
            m.vertices_.emplace_back(static_cast<double>(i) / N, static_cast<double>(j) / N);
            m.vertex_boundary_.push_back(i == 0 || j == 0 || i == nv1 - 1 || j == nv1 - 1);
        }
    }

    m.triangles_.reserve(2 * static_cast<std::size_t>(N) * N);
    for (std::size_t j = 0; j < static_cast<std::size_t>(N); ++j) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(N); ++i) {
            const std::size_t v00 = vid(i, j), v10 = vid(i + 1, j);
            const std::size_t v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.triangles_.push_back({v00, v10, v11});
            m.triangles_.push_back({v00, v11, v01});
        }
    }

    m.geometry_.reserve(m.triangles_.size());
    for (const auto& tri : m.triangles_) {
        const Point& a = m.vertices_[tri[0]];
        const Point& b = m.vertices_[tri[1]];
        const Point& c = m.vertices_[tri[2]];
        const Point e1 = b - a, e2 = c - a;
        ElementGeometry g;
        g.area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
        NKCERT_REQUIRE(g.area > 0.0, "Mesh::build_uniform: non-positive triangle orientation");
        g.diameter = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
        g.barycenter = (a + b + c) / 3.0;
        m.geometry_.push_back(g);
    }

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_to_face;
    m.element_faces_.resize(m.triangles_.size());
    for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
        const auto& tri = m.triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const std::size_t a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            if (it == edge_to_face.end()) {
                Face f;
                f.vertices = {a, b};
                f.plus = t;
                const Point& pa = m.vertices_[a];
                const Point& pb = m.vertices_[b];
                const Point edge = pb - pa;
                f.length = edge.norm();
                f.barycenter = 0.5 * (pa + pb);
                // Counterclockwise triangle: (a -> b) rotated clockwise points outward.
                f.normal = Point(edge.y(), -edge.x()) / f.length;
                edge_to_face.emplace(key, m.faces_.size());
                m.element_faces_[t][k] = m.faces_.size();
                m.faces_.push_back(f);
            } else {
                Face& f = m.faces_[it->second];
                NKCERT_REQUIRE(f.minus == kBoundary, "Mesh::build_uniform: face shared by more than two elements");
                f.minus = t;
                m.element_faces_[t][k] = it->second;
            }
        }
    }

    m.free_index_.assign(m.vertices_.size(), kBoundary);
    for (std::size_t v = 0; v < m.vertices_.size(); ++v) {
        if (!m.vertex_boundary_[v]) {
            m.free_index_[v] = m.free_vertices_.size();
            m.free_vertices_.push_back(v);
        }
    }
    m.interior_face_index_.assign(m.faces_.size(), kBoundary);
    for (std::size_t f = 0; f < m.faces_.size(); ++f) {
        if (!m.faces_[f].on_boundary()) {
            m.interior_face_index_[f] = m.interior_faces_.size();
            m.interior_faces_.push_back(f);
        }
    }
    return m;
}

double Mesh::face_sign(std::size_t t, int k) const {
    return faces_[element_faces_[t][k]].plus == t ? 1.0 : -1.0;
}

std::array<Point, 3> Mesh::barycentric_gradients(std::size_t t) const {
    const auto& tri = triangles_[t];
    const double twice_area = 2.0 * geometry_[t].area;
    std::array<Point, 3> g;
    for (int k = 0; k < 3; ++k) {
        // grad(lambda_k) is the inward normal of the opposite edge scaled by |F|/(2|T|).
        const Point& a = vertices_[tri[(k + 1) % 3]];
        const Point& b = vertices_[tri[(k + 2) % 3]];
        g[k] = Point(a.y() - b.y(), b.x() - a.x()) / twice_area;
    }
    return g;
}

Point Mesh::map_to_physical(std::size_t t, const std::array<double, 3>& lambda) const {
    const auto& tri = triangles_[t];
    return lambda[0] * vertices_[tri[0]] + lambda[1] * vertices_[tri[1]] + lambda[2] * vertices_[tri[2]];
}

FacePatch Mesh::face_patch(std::size_t f) const {
    NKCERT_REQUIRE(f < faces_.size(), "Mesh::face_patch: face index " + std::to_string(f) + " out of range");
    const Face& face = faces_[f];
    FacePatch p{face.plus, std::nullopt, face.normal, face.barycenter, face.length};
    if (!face.on_boundary()) p.minus = face.minus;
    return p;
}

void Mesh::dump(std::ostream& os) const {
    os << "vertices " << vertices_.size() << '\n';
    for (const auto& v : vertices_) os << v.x() << ' ' << v.y() << '\n';
    os << "triangles " << triangles_.size() << '\n';
    for (const auto& t : triangles_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "faces " << faces_.size() << '\n';
    for (const auto& f : faces_) {
        os << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.plus << ' ';
        if (f.on_boundary()) os << "boundary";
        else os << f.minus;
        os << ' ' << f.normal.x() << ' ' << f.normal.y() << '\n';
    }
}

}  // namespace nkcert
