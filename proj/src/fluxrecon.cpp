#include "nkcert/fluxrecon.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCore>

#include "nkcert/error.hpp"

namespace nkcert {

Point CRFunction::gradient(std::size_t t) const {
    const auto g = mesh->barycentric_gradients(t);
    Point grad = Point::Zero();
    for (int k = 0; k < 3; ++k) grad -= 2.0 * face_values[mesh->element_face(t, k)] * g[k];
    return grad;
}

Point RT0Flux::evaluate(std::size_t t, const Point& x) const {
    const auto& tri = mesh->triangle(t);
    const auto g = mesh->barycentric_gradients(t);
    const Point& p0 = mesh->vertex(tri[0]);
    for (int k = 0; k < 3; ++k) {
        const double lambda = (k == 0 ? 1.0 : 0.0) + g[k].dot(x - p0);
        NKCERT_REQUIRE(lambda >= -1e-12, "RT0Flux::evaluate: point outside element " + std::to_string(t));
    }
    const double area = mesh->geometry(t).area;
    Point sigma = Point::Zero();
    for (int k = 0; k < 3; ++k) {
        const double outward = mesh->face_sign(t, k) * face_fluxes[mesh->element_face(t, k)];
        sigma += outward / (2.0 * area) * (x - mesh->vertex(tri[k]));
    }
    return sigma;
}

double RT0Flux::divergence(std::size_t t) const {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += mesh->face_sign(t, k) * face_fluxes[mesh->element_face(t, k)];
    return sum / mesh->geometry(t).area;
}

PiecewiseConstantField project_elementwise(const Mesh& mesh, const ElementSource& s, const QuadratureRule& rule) {
    PiecewiseConstantField r{&mesh, std::vector<double>(mesh.num_triangles())};
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        double mean = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) mean += rule.weights[q] * s(t, rule.points[q]);
        r.values[t] = mean;
    }
    return r;
}

PiecewiseConstantField project_source(const P1Function& u, const ScalarField& f, const QuadratureRule& rule) {
    const Mesh& mesh = u.mesh();
    return project_elementwise(
        mesh,
        [&](std::size_t t, const std::array<double, 3>& l) {
            const double uq = u.value(t, l);
            return uq * uq * uq - f(mesh.map_to_physical(t, l));
        },
        rule);
}

namespace {

struct CRSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd load;
};

CRSystem assemble_cr(const PiecewiseConstantField& r) {
    const Mesh& mesh = *r.mesh;
    NKCERT_REQUIRE(r.values.size() == mesh.num_triangles(), "solve_cr: field size does not match element count");
    const auto n = static_cast<Eigen::Index>(mesh.interior_faces().size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * mesh.num_triangles());
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = mesh.barycentric_gradients(t);
        const double area = mesh.geometry(t).area;
        for (int a = 0; a < 3; ++a) {
            const std::size_t ia = mesh.interior_face_index(mesh.element_face(t, a));
            if (ia == kBoundary) continue;
            load[ia] -= r.values[t] * area / 3.0;
            for (int b = 0; b < 3; ++b) {
                const std::size_t ib = mesh.interior_face_index(mesh.element_face(t, b));
                if (ib == kBoundary) continue;
                trip.emplace_back(ia, ib, 4.0 * area * g[a].dot(g[b]));
            }
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return {std::move(A), std::move(load)};
}

}  // namespace

CRFunction solve_cr(const PiecewiseConstantField& r) {
    const Mesh& mesh = *r.mesh;
    CRSystem sys = assemble_cr(r);
    const Eigen::VectorXd x = solve_spd(SparseSymMatrix(std::move(sys.matrix)), sys.load);
    CRFunction u{&mesh, std::vector<double>(mesh.num_faces(), 0.0)};
    const auto& faces = mesh.interior_faces();
    for (std::size_t i = 0; i < faces.size(); ++i) u.face_values[faces[i]] = x[i];
    return u;
}

Eigen::VectorXd cr_residual(const CRFunction& ucr, const PiecewiseConstantField& r) {
    const Mesh& mesh = *r.mesh;
    CRSystem sys = assemble_cr(r);
    const auto& faces = mesh.interior_faces();
    Eigen::VectorXd x(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) x[i] = ucr.face_values[faces[i]];
    return sys.matrix * x - sys.load;
}

double marini_face_flux(const Mesh& mesh, const CRFunction& ucr, const PiecewiseConstantField& r, std::size_t t,
                        std::size_t f) {
    const Face& face = mesh.face(f);
    const Point corrector = (r.values[t] / 2.0) * (face.barycenter - mesh.geometry(t).barycenter);
    return face.length * (ucr.gradient(t) + corrector).dot(face.normal);
}

Reconstruction reconstruct_rt0(const CRFunction& ucr, const PiecewiseConstantField& r, double tolerance) {
    const Mesh& mesh = *r.mesh;
    NKCERT_REQUIRE(ucr.mesh == r.mesh, "reconstruct_rt0: CR function and source live on different meshes");
    Reconstruction out{RT0Flux{&mesh, std::vector<double>(mesh.num_faces())}, {}};
    auto& audit = out.audit;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const double value = marini_face_flux(mesh, ucr, r, mesh.face(f).plus, f);
        out.flux.face_fluxes[f] = value;
        audit.face_scale = std::max(audit.face_scale, std::abs(value));
    }
    for (std::size_t f : mesh.interior_faces()) {
        const double other = marini_face_flux(mesh, ucr, r, mesh.face(f).minus, f);
        const double mismatch = std::abs(other - out.flux.face_fluxes[f]);
        if (mismatch > audit.max_face_mismatch) {
            audit.max_face_mismatch = mismatch;
            audit.worst_face = f;
        }
    }
    if (audit.max_face_mismatch > tolerance * std::max(1.0, audit.face_scale)) {
        std::ostringstream msg;
        msg << "reconstruct_rt0: conservation audit failed on face " << audit.worst_face << " (mismatch "
            << audit.max_face_mismatch << ", scale " << audit.face_scale << ")";
        throw Error(msg.str());
    }
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double defect = std::abs(out.flux.divergence(t) - r.values[t]) / (1.0 + std::abs(r.values[t]));
        audit.max_divergence_defect = std::max(audit.max_divergence_defect, defect);
    }
    NKCERT_REQUIRE(audit.max_divergence_defect <= tolerance, "reconstruct_rt0: divergence audit failed");
    return out;
}

}  // namespace nkcert
