#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace nkcert {

using Point = Eigen::Vector2d;

/// Marker for the missing neighbour of a boundary face.
inline constexpr std::size_t kBoundary = static_cast<std::size_t>(-1);

struct Face {
    std::array<std::size_t, 2> vertices;
    std::size_t plus = 0;            ///< T+ (first adjacent element in enumeration order)
    std::size_t minus = kBoundary;   ///< T- or kBoundary
    Point normal;                    ///< unit normal from T+ into T- (outward on the boundary)
    Point barycenter;
    double length = 0.0;

    bool on_boundary() const { return minus == kBoundary; }
};

struct ElementGeometry {
    double area = 0.0;
    double diameter = 0.0;
    Point barycenter;
};

struct FacePatch {
    std::size_t plus;
    std::optional<std::size_t> minus;
    Point normal;
    Point barycenter;
    double length;
};

/// Uniform conforming triangulation of the unit square. Every N x N cell is
/// split along its lower-left to upper-right diagonal; vertices are numbered
/// row-major, triangles cell by cell (lower, upper), faces in first-seen order
/// while sweeping the triangles. Immutable after construction.
class Mesh {
public:
    static Mesh build_uniform(int N);

    int subdivisions() const { return n_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    std::size_t num_faces() const { return faces_.size(); }

    const Point& vertex(std::size_t v) const { return vertices_[v]; }
    const std::array<std::size_t, 3>& triangle(std::size_t t) const { return triangles_[t]; }
    const Face& face(std::size_t f) const { return faces_[f]; }
    const ElementGeometry& geometry(std::size_t t) const { return geometry_[t]; }
    bool vertex_on_boundary(std::size_t v) const { return vertex_boundary_[v]; }

    /// Local face k of triangle t is opposite local vertex k.
    std::size_t element_face(std::size_t t, int k) const { return element_faces_[t][k]; }
    /// +1 if the face normal points out of t, -1 otherwise.
    double face_sign(std::size_t t, int k) const;

    /// Outward unit normal of local face k of triangle t.
    Point outward_normal(std::size_t t, int k) const { return face_sign(t, k) * faces_[element_faces_[t][k]].normal; }

    /// Gradients of the three barycentric coordinates on triangle t.
    std::array<Point, 3> barycentric_gradients(std::size_t t) const;
    Point map_to_physical(std::size_t t, const std::array<double, 3>& lambda) const;

    FacePatch face_patch(std::size_t f) const;

    /// Interior vertices in increasing index order, and the inverse map.
    const std::vector<std::size_t>& free_vertices() const { return free_vertices_; }
    /// Index into free_vertices(), or kBoundary for boundary vertices.
    std::size_t free_index(std::size_t v) const { return free_index_[v]; }

    const std::vector<std::size_t>& interior_faces() const { return interior_faces_; }
    std::size_t interior_face_index(std::size_t f) const { return interior_face_index_[f]; }

    /// Plain-text debugging dump with `vertices`, `triangles`, `faces` sections.
    void dump(std::ostream& os) const;

private:
    int n_ = 0;
    std::vector<Point> vertices_;
    std::vector<std::array<std::size_t, 3>> triangles_;
    std::vector<Face> faces_;
    std::vector<ElementGeometry> geometry_;
    std::vector<bool> vertex_boundary_;
    std::vector<std::array<std::size_t, 3>> element_faces_;
    std::vector<std::size_t> free_vertices_;
    std::vector<std::size_t> free_index_;
    std::vector<std::size_t> interior_faces_;
    std::vector<std::size_t> interior_face_index_;
};

}  // namespace nkcert
