#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nkcert/mesh.hpp"
#include "nkcert/quadrature.hpp"

namespace nkcert {

/// A scalar field together with its gradient, for error norms against exact solutions.
struct ExactField {
    ScalarField value;
    std::function<Point(const Point&)> gradient;
};

enum class DirichletPolicy { kEnforce, kIgnore };

/// Continuous piecewise-linear function, one coefficient per mesh vertex.
/// Boundary coefficients are zero unless built with DirichletPolicy::kIgnore
/// (test fixtures only). Holds a non-owning reference to its mesh.
class P1Function {
public:
    explicit P1Function(const Mesh& mesh);

    static P1Function from_coefficients(const Mesh& mesh, Eigen::VectorXd coefficients,
                                        DirichletPolicy policy = DirichletPolicy::kEnforce);
    static P1Function from_free_values(const Mesh& mesh, const Eigen::VectorXd& free_values);
    /// Nodal interpolant with boundary values forced to zero.
    static P1Function interpolate(const Mesh& mesh, const ScalarField& f);

    const Mesh& mesh() const { return *mesh_; }
    const Eigen::VectorXd& coefficients() const { return coeffs_; }
    Eigen::VectorXd free_values() const;

    double value(std::size_t t, const std::array<double, 3>& lambda) const;
    Point gradient(std::size_t t) const;

private:
    const Mesh* mesh_;
    Eigen::VectorXd coeffs_;
};

/// Symmetric sparse matrix over the free (interior) vertices.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;
    explicit SparseSymMatrix(Eigen::SparseMatrix<double> m) : m_(std::move(m)) {}

    const Eigen::SparseMatrix<double>& matrix() const { return m_; }
    Eigen::Index rows() const { return m_.rows(); }
    double quadratic_form(const Eigen::VectorXd& v) const { return v.dot(m_ * v); }
    /// max |A - A^T| / max |A|.
    double symmetry_defect() const;

private:
    Eigen::SparseMatrix<double> m_;
};

struct NewtonSettings {
    double tol = 1e-12;
    int max_iterations = 25;
    int quadrature_degree = 5;  ///< rule for residual and Jacobian assembly

    void validate() const;
};

struct NewtonResult {
    P1Function solution;
    std::vector<double> increment_norms;  ///< energy norm of every increment
    bool converged = false;
    int iterations() const { return static_cast<int>(increment_norms.size()); }
};

/// <F(u), phi_i> for every interior vertex i of -Laplace(u) + u^3 = f.
Eigen::VectorXd assemble_residual(const P1Function& u, const ScalarField& f,
                                  const QuadratureRule& rule = rule_degree5());

/// Stiffness plus the reaction mass matrix weighted by 3 u^2.
SparseSymMatrix assemble_jacobian(const P1Function& u, const QuadratureRule& rule = rule_degree5());

SparseSymMatrix assemble_stiffness(const Mesh& mesh);

/// Stiffness plus the mass matrix weighted by `weight` at quadrature points of each element.
SparseSymMatrix assemble_stiffness_plus_mass(
    const Mesh& mesh, const std::function<double(std::size_t, const std::array<double, 3>&)>& weight,
    const QuadratureRule& rule = rule_degree5());

/// (int psi phi_i)_i over interior vertices.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& psi,
                              const QuadratureRule& rule = rule_degree5());
/// (int w phi_i)_i over interior vertices for a P1 weight w.
Eigen::VectorXd assemble_load(const P1Function& w, const QuadratureRule& rule = rule_degree5());

/// Direct sparse LDL^T solve of an SPD system.
Eigen::VectorXd solve_spd(const SparseSymMatrix& A, const Eigen::VectorXd& b);

NewtonResult newton_solve(const Mesh& mesh, const ScalarField& f, const NewtonSettings& settings = {});

double energy_norm(const P1Function& v);
double l2_norm(const P1Function& v, const QuadratureRule& rule = rule_degree5());
double l2_norm(const Mesh& mesh, const ScalarField& f, const QuadratureRule& rule = rule_degree5());
/// || grad(v) - grad(w) ||_{L^2}, integrated with the degree-7 rule by default.
double energy_error_vs(const P1Function& v, const ExactField& w, const QuadratureRule& rule = rule_degree7());

}  // namespace nkcert
