#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nkcert/fem.hpp"
#include "nkcert/mesh.hpp"
#include "nkcert/quadrature.hpp"

namespace nkcert {

/// One value per element.
struct PiecewiseConstantField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;
};

/// Crouzeix-Raviart function stored by face means; boundary faces are zero.
struct CRFunction {
    const Mesh* mesh = nullptr;
    std::vector<double> face_values;

    /// Broken gradient on element t.
    Point gradient(std::size_t t) const;
};

/// Lowest-order Raviart-Thomas field stored as oriented face fluxes
/// int_F sigma . n_F ds. A single value per face makes the normal component
/// continuous by construction.
struct RT0Flux {
    const Mesh* mesh = nullptr;
    std::vector<double> face_fluxes;

    /// Field value on element t at point x (must lie in t).
    Point evaluate(std::size_t t, const Point& x) const;
    /// Constant divergence on element t: (1/|T|) sum of outward face fluxes.
    double divergence(std::size_t t) const;
};

/// Pointwise source s(t, lambda) on element t at barycentric point lambda.
using ElementSource = std::function<double(std::size_t, const std::array<double, 3>&)>;

/// Elementwise mean of s.
PiecewiseConstantField project_elementwise(const Mesh& mesh, const ElementSource& s,
                                           const QuadratureRule& rule = rule_degree5());

/// r|_T = (1/|T|) int_T (u^3 - f).
PiecewiseConstantField project_source(const P1Function& u, const ScalarField& f,
                                      const QuadratureRule& rule = rule_degree5());

/// CR solution of sum_T int_T grad u . grad v = -int r v over all CR test functions.
CRFunction solve_cr(const PiecewiseConstantField& r);

/// Residual of the CR system at ucr, one entry per interior face.
Eigen::VectorXd cr_residual(const CRFunction& ucr, const PiecewiseConstantField& r);

struct ReconstructionAudit {
    double max_face_mismatch = 0.0;      ///< two-sided face flux discrepancy
    double face_scale = 0.0;             ///< max |face flux| used to scale the mismatch
    std::size_t worst_face = 0;
    double max_divergence_defect = 0.0;  ///< max |div sigma - r| / (1 + |r|)
};

struct Reconstruction {
    RT0Flux flux;
    ReconstructionAudit audit;
};

/// Face flux computed from sigma_T* of element T on face F with normal n_F.
double marini_face_flux(const Mesh& mesh, const CRFunction& ucr, const PiecewiseConstantField& r, std::size_t t,
                        std::size_t f);

/// Marini-type RT0 flux with div sigma = r elementwise. Face values come from
/// T+ and are audited against T-; a mismatch above `tolerance * max(1, scale)`
/// throws, naming the face.
Reconstruction reconstruct_rt0(const CRFunction& ucr, const PiecewiseConstantField& r, double tolerance = 1e-10);

}  // namespace nkcert
