#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nkcert/fem.hpp"
#include "nkcert/fluxrecon.hpp"

namespace nkcert {

/// Sharp L2 embedding constant of H^1_0((0,1)^2): 1 / sqrt(2 pi^2).
inline constexpr double kDefaultC2 = 0.22507907903927652;
/// Upper endpoint of the verified inclusion for the L4 embedding constant of the unit square.
inline constexpr double kDefaultC4 = 0.28524446071929;

/// Inputs of the Newton-Kantorovich conditions with L(rho) = L0 + L1 rho.
struct CertConstants {
    double r_bound = 0.0;  ///< residual dual-norm bound
    double alpha = 1.0;    ///< stability lower bound
    double eta = 0.0;      ///< r_bound / alpha
    double L0 = 0.0;
    double L1 = 0.0;
    double C2 = kDefaultC2;
    double C4 = kDefaultC4;
    double alpha0 = 1.0;

    static CertConstants make(double r_bound, double alpha, double L0, double L1, double C2 = kDefaultC2,
                              double C4 = kDefaultC4, double alpha0 = 1.0);
    void validate() const;
    double lipschitz(double rho) const { return L0 + L1 * rho; }
};

struct ResidualBound {
    double r_bound = 0.0;
    double eta_mis = 0.0;
    double eta_osc = 0.0;
};

/// Dual-norm bound ||sigma - grad w|| + alpha0^{-1/2} (sum (h_T/pi)^2 ||s - div sigma||_T^2)^{1/2}
/// for a flux that passed its reconstruction audits.
ResidualBound equilibrated_bound(const P1Function& w, const Reconstruction& rec, const ElementSource& source,
                                 double alpha0 = 1.0, const QuadratureRule& rule = rule_degree5());

/// Primal residual bound with source s = u^3 - f.
ResidualBound residual_bound(const P1Function& u, const Reconstruction& rec, const ScalarField& f,
                             double alpha0 = 1.0, const QuadratureRule& rule = rule_degree5());

struct StabilityCertificate {
    double alpha = 1.0;
    std::string justification;
};

/// alpha = 1 from monotone coercivity (3u^2 >= 0, A0 = A = I).
StabilityCertificate stability_constant(const P1Function& u);

struct AffineLipschitz {
    double L0 = 0.0;
    double L1 = 0.0;
};

/// L(rho) = 6 C4^4 (||u||_V + rho).
AffineLipschitz lipschitz_affine(const P1Function& u, double C4);

struct PQ {
    double p = 0.0;
    double q = 0.0;
    bool admissible() const { return p <= 0.0 && q < 1.0; }
};

/// p = eta + L(rho) rho^2 / (2 alpha) - rho, q = L(rho) rho / alpha.
PQ pq(const CertConstants& c, double rho);

enum class SearchPath { kAcceptedInitial, kBracketedBisected, kFail };
std::string to_string(SearchPath path);

struct RadiusProbe {
    double rho;
    double p;
    double q;
};

struct NKReport {
    double rho = 0.0;
    double p = 0.0;
    double q = 0.0;
    bool admissible = false;
    SearchPath path = SearchPath::kFail;
    std::vector<RadiusProbe> trace;
    double sanity_delta = 1e-3;
    double p_below = 0.0;  ///< p((1 - delta) rho)
    double p_above = 0.0;  ///< p((1 + delta) rho)
    double bracket_width = 0.0;  ///< final rho_up - rho_low when bisected
};

inline constexpr int kDefaultShrinkSteps = 60;
inline constexpr int kDefaultBisectionSteps = 60;

/// Radius search: accept 2 eta, else shrink dyadically to an admissible
/// lower end and bisect towards the admissibility threshold.
NKReport select_radius(const CertConstants& c, int j_max = kDefaultShrinkSteps, int k_max = kDefaultBisectionSteps);

/// Bisection phase alone, from a bracket with Adm(rho_low) true and Adm(rho_up) false.
NKReport bisect_radius(const CertConstants& c, double rho_low, double rho_up, int k_max = kDefaultBisectionSteps);

/// Brute-force admissibility on the grid rho_i = i * step, i = 1 .. floor(rho_max / step).
struct AdmissibleScan {
    double step = 0.0;
    std::vector<std::size_t> indices;  ///< admissible grid indices, increasing

    double radius(std::size_t i) const { return static_cast<double>(i) * step; }
    /// Number of maximal runs of consecutive admissible indices.
    std::size_t runs() const;
};

AdmissibleScan scan_admissible(const CertConstants& c, double step, double rho_max);

}  // namespace nkcert
