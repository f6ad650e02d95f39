#include "nkcert/fem.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "nkcert/error.hpp"

namespace nkcert {

P1Function::P1Function(const Mesh& mesh) : mesh_(&mesh), coeffs_(Eigen::VectorXd::Zero(mesh.num_vertices())) {}

P1Function P1Function::from_coefficients(const Mesh& mesh, Eigen::VectorXd coefficients, DirichletPolicy policy) {
    NKCERT_REQUIRE(static_cast<std::size_t>(coefficients.size()) == mesh.num_vertices(),
                   "P1Function: coefficient count does not match vertex count");
    if (policy == DirichletPolicy::kEnforce) {
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
            NKCERT_REQUIRE(!mesh.vertex_on_boundary(v) || coefficients[v] == 0.0,
                           "P1Function: nonzero boundary coefficient at vertex " + std::to_string(v));
        }
    }
    P1Function u(mesh);
    u.coeffs_ = std::move(coefficients);
    return u;
}

P1Function P1Function::from_free_values(const Mesh& mesh, const Eigen::VectorXd& free_values) {
    NKCERT_REQUIRE(static_cast<std::size_t>(free_values.size()) == mesh.free_vertices().size(),
                   "P1Function: free value count does not match interior vertex count");
    P1Function u(mesh);
    const auto& fv = mesh.free_vertices();
    for (std::size_t i = 0; i < fv.size(); ++i) u.coeffs_[fv[i]] = free_values[i];
    return u;
}

P1Function P1Function::interpolate(const Mesh& mesh, const ScalarField& f) {
    P1Function u(mesh);
    for (std::size_t v : mesh.free_vertices()) u.coeffs_[v] = f(mesh.vertex(v));
    return u;
}

Eigen::VectorXd P1Function::free_values() const {
    const auto& fv = mesh_->free_vertices();
    Eigen::VectorXd out(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) out[i] = coeffs_[fv[i]];
    return out;
}

double P1Function::value(std::size_t t, const std::array<double, 3>& lambda) const {
    const auto& tri = mesh_->triangle(t);
    return lambda[0] * coeffs_[tri[0]] + lambda[1] * coeffs_[tri[1]] + lambda[2] * coeffs_[tri[2]];
}

Point P1Function::gradient(std::size_t t) const {
    const auto& tri = mesh_->triangle(t);
    const auto g = mesh_->barycentric_gradients(t);
    return coeffs_[tri[0]] * g[0] + coeffs_[tri[1]] * g[1] + coeffs_[tri[2]] * g[2];
}

double SparseSymMatrix::symmetry_defect() const {
    const Eigen::SparseMatrix<double> d = m_ - Eigen::SparseMatrix<double>(m_.transpose());
    double dmax = 0.0, amax = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
    for (int k = 0; k < m_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m_, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
    return amax > 0.0 ? dmax / amax : 0.0;
}

void NewtonSettings::validate() const {
    NKCERT_REQUIRE(tol > 0.0, "NewtonSettings: tol must be positive");
    NKCERT_REQUIRE(max_iterations >= 1, "NewtonSettings: max_iterations must be >= 1");
    rule_for_degree(quadrature_degree);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_stiffness(const Mesh& mesh, std::size_t t, Triplets& trip) {
    const auto& tri = mesh.triangle(t);
    const auto g = mesh.barycentric_gradients(t);
    const double area = mesh.geometry(t).area;
    for (int a = 0; a < 3; ++a) {
        const std::size_t ia = mesh.free_index(tri[a]);
        if (ia == kBoundary) continue;
        for (int b = 0; b < 3; ++b) {
            const std::size_t ib = mesh.free_index(tri[b]);
            if (ib == kBoundary) continue;
            trip.emplace_back(ia, ib, area * g[a].dot(g[b]));
        }
    }
}

SparseSymMatrix from_triplets(const Mesh& mesh, const Triplets& trip) {
    const auto n = static_cast<Eigen::Index>(mesh.free_vertices().size());
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return SparseSymMatrix(std::move(A));
}

}  // namespace

SparseSymMatrix assemble_stiffness(const Mesh& mesh) {
    Triplets trip;
    trip.reserve(9 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) add_stiffness(mesh, t, trip);
    return from_triplets(mesh, trip);
}

SparseSymMatrix assemble_stiffness_plus_mass(
    const Mesh& mesh, const std::function<double(std::size_t, const std::array<double, 3>&)>& weight,
    const QuadratureRule& rule) {
    Triplets trip;
    trip.reserve(18 * mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        add_stiffness(mesh, t, trip);
        const auto& tri = mesh.triangle(t);
        const double area = mesh.geometry(t).area;
        double m[3][3] = {};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const double w = rule.weights[q] * area * weight(t, l);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) m[a][b] += w * l[a] * l[b];
        }
        for (int a = 0; a < 3; ++a) {
            const std::size_t ia = mesh.free_index(tri[a]);
            if (ia == kBoundary) continue;
            for (int b = 0; b < 3; ++b) {
                const std::size_t ib = mesh.free_index(tri[b]);
                if (ib == kBoundary) continue;
                trip.emplace_back(ia, ib, m[a][b]);
            }
        }
    }
    return from_triplets(mesh, trip);
}

Eigen::VectorXd assemble_residual(const P1Function& u, const ScalarField& f, const QuadratureRule& rule) {
    const Mesh& mesh = u.mesh();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const auto g = mesh.barycentric_gradients(t);
        const double area = mesh.geometry(t).area;
        const Point grad_u = u.gradient(t);
        double local[3];
        for (int a = 0; a < 3; ++a) local[a] = area * grad_u.dot(g[a]);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const double uq = u.value(t, l);
            const double s = uq * uq * uq - f(mesh.map_to_physical(t, l));
            const double w = rule.weights[q] * area * s;
            for (int a = 0; a < 3; ++a) local[a] += w * l[a];
        }
        for (int a = 0; a < 3; ++a) full[tri[a]] += local[a];
    }
    const auto& fv = mesh.free_vertices();
    Eigen::VectorXd out(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) out[i] = full[fv[i]];
    return out;
}

SparseSymMatrix assemble_jacobian(const P1Function& u, const QuadratureRule& rule) {
    return assemble_stiffness_plus_mass(
        u.mesh(),
        [&u](std::size_t t, const std::array<double, 3>& l) {
            const double uq = u.value(t, l);
            return 3.0 * uq * uq;
        },
        rule);
}

namespace {

Eigen::VectorXd load_from(const Mesh& mesh, const QuadratureRule& rule,
                          const std::function<double(std::size_t, const std::array<double, 3>&)>& psi) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double area = mesh.geometry(t).area;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const double w = rule.weights[q] * area * psi(t, l);
            for (int a = 0; a < 3; ++a) full[tri[a]] += w * l[a];
        }
    }
    const auto& fv = mesh.free_vertices();
    Eigen::VectorXd out(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) out[i] = full[fv[i]];
    return out;
}

}  // namespace

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& psi, const QuadratureRule& rule) {
    return load_from(mesh, rule, [&](std::size_t t, const std::array<double, 3>& l) {
        return psi(mesh.map_to_physical(t, l));
    });
}

Eigen::VectorXd assemble_load(const P1Function& w, const QuadratureRule& rule) {
    return load_from(w.mesh(), rule, [&](std::size_t t, const std::array<double, 3>& l) { return w.value(t, l); });
}

Eigen::VectorXd solve_spd(const SparseSymMatrix& A, const Eigen::VectorXd& b) {
    NKCERT_REQUIRE(A.rows() == b.size(), "solve_spd: dimension mismatch");
    if (A.rows() == 0) return Eigen::VectorXd(0);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A.matrix());
    NKCERT_REQUIRE(ldlt.info() == Eigen::Success, "solve_spd: LDL^T factorization failed");
    const Eigen::VectorXd diag = ldlt.vectorD();
    NKCERT_REQUIRE((diag.array() > 0.0).all(), "solve_spd: matrix is not positive definite");
    Eigen::VectorXd x = ldlt.solve(b);
    NKCERT_REQUIRE(ldlt.info() == Eigen::Success, "solve_spd: triangular solve failed");
    // Iterative refinement; keeps the residual near round-off on fine meshes.
    Eigen::VectorXd res = b - A.matrix() * x;
    double res_norm = res.norm();
    for (int it = 0; it < 3 && res_norm > 0.0; ++it) {
        const Eigen::VectorXd x_new = x + ldlt.solve(res);
        const Eigen::VectorXd res_new = b - A.matrix() * x_new;
        if (!(res_new.norm() < res_norm)) break;
        x = x_new;
        res = res_new;
        res_norm = res.norm();
    }
    return x;
}

NewtonResult newton_solve(const Mesh& mesh, const ScalarField& f, const NewtonSettings& settings) {
    settings.validate();
    const SparseSymMatrix stiffness = assemble_stiffness(mesh);
    const QuadratureRule& rule = rule_for_degree(settings.quadrature_degree);
    NewtonResult result{P1Function(mesh), {}, false};
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.free_vertices().size()));
    for (int k = 0; k < settings.max_iterations; ++k) {
        const P1Function uk = P1Function::from_free_values(mesh, u);
        const Eigen::VectorXd F = assemble_residual(uk, f, rule);
        const SparseSymMatrix J = assemble_jacobian(uk, rule);
        const Eigen::VectorXd du = solve_spd(J, -F);
        u += du;
        const double inc = std::sqrt(std::max(0.0, stiffness.quadratic_form(du)));
        result.increment_norms.push_back(inc);
        if (inc <= settings.tol) {
            result.converged = true;
            break;
        }
    }
    result.solution = P1Function::from_free_values(mesh, u);
    return result;
}

double energy_norm(const P1Function& v) {
    const Mesh& mesh = v.mesh();
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) sum += mesh.geometry(t).area * v.gradient(t).squaredNorm();
    return std::sqrt(sum);
}

double l2_norm(const P1Function& v, const QuadratureRule& rule) {
    const Mesh& mesh = v.mesh();
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        double local = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double vq = v.value(t, rule.points[q]);
            local += rule.weights[q] * vq * vq;
        }
        sum += mesh.geometry(t).area * local;
    }
    return std::sqrt(sum);
}

double l2_norm(const Mesh& mesh, const ScalarField& f, const QuadratureRule& rule) {
    return std::sqrt(integrate_domain(rule, mesh, [&f](const Point& x) {
        const double v = f(x);
        return v * v;
    }));
}

double energy_error_vs(const P1Function& v, const ExactField& w, const QuadratureRule& rule) {
    const Mesh& mesh = v.mesh();
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const Point gv = v.gradient(t);
        sum += integrate(rule, mesh, t, [&](const Point& x) { return (gv - w.gradient(x)).squaredNorm(); });
    }
    return std::sqrt(sum);
}

}  // namespace nkcert
