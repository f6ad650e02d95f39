#include "nkcert/certify.hpp"

#include <cmath>
#include <numbers>

#include "nkcert/error.hpp"

namespace nkcert {

CertConstants CertConstants::make(double r_bound, double alpha, double L0, double L1, double C2, double C4,
                                  double alpha0) {
    CertConstants c;
    c.r_bound = r_bound;
    c.alpha = alpha;
    c.eta = r_bound / alpha;
    c.L0 = L0;
    c.L1 = L1;
    c.C2 = C2;
    c.C4 = C4;
    c.alpha0 = alpha0;
    c.validate();
    return c;
}

void CertConstants::validate() const {
    const auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    NKCERT_REQUIRE(ok(r_bound) && ok(eta) && ok(L0) && ok(L1) && ok(C2) && ok(C4),
                   "CertConstants: constants must be finite and nonnegative");
    NKCERT_REQUIRE(std::isfinite(alpha) && alpha > 0.0, "CertConstants: alpha must be positive");
    NKCERT_REQUIRE(std::isfinite(alpha0) && alpha0 > 0.0, "CertConstants: alpha0 must be positive");
    NKCERT_REQUIRE(L0 > 0.0 || L1 > 0.0, "CertConstants: L0 and L1 cannot both vanish");
    NKCERT_REQUIRE(std::abs(eta - r_bound / alpha) <= 1e-15 * std::abs(eta), "CertConstants: eta != r_bound / alpha");
}

ResidualBound equilibrated_bound(const P1Function& w, const Reconstruction& rec, const ElementSource& source,
                                 double alpha0, const QuadratureRule& rule) {
    const Mesh& mesh = w.mesh();
    NKCERT_REQUIRE(rec.flux.mesh == &mesh, "equilibrated_bound: flux lives on a different mesh");
    NKCERT_REQUIRE(rec.audit.max_divergence_defect <= 1e-10 &&
                       rec.audit.max_face_mismatch <= 1e-10 * std::max(1.0, rec.audit.face_scale),
                   "equilibrated_bound: flux failed its reconstruction audits");
    NKCERT_REQUIRE(alpha0 > 0.0, "equilibrated_bound: alpha0 must be positive");
    double mis2 = 0.0, osc2 = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& geo = mesh.geometry(t);
        const Point grad_w = w.gradient(t);
        const double div = rec.flux.divergence(t);
        double mis_t = 0.0, osc_t = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            const Point x = mesh.map_to_physical(t, l);
            mis_t += rule.weights[q] * (rec.flux.evaluate(t, x) - grad_w).squaredNorm();
            const double res = source(t, l) - div;
            osc_t += rule.weights[q] * res * res;
        }
        const double poincare = geo.diameter / std::numbers::pi;
        mis2 += geo.area * mis_t;
        osc2 += poincare * poincare * geo.area * osc_t;
    }
    ResidualBound b;
    b.eta_mis = std::sqrt(mis2);
    b.eta_osc = std::sqrt(osc2);
    b.r_bound = b.eta_mis + b.eta_osc / std::sqrt(alpha0);
    return b;
}

ResidualBound residual_bound(const P1Function& u, const Reconstruction& rec, const ScalarField& f, double alpha0,
                             const QuadratureRule& rule) {
    const Mesh& mesh = u.mesh();
    return equilibrated_bound(
        u, rec,
        [&](std::size_t t, const std::array<double, 3>& l) {
            const double uq = u.value(t, l);
            return uq * uq * uq - f(mesh.map_to_physical(t, l));
        },
        alpha0, rule);
}

StabilityCertificate stability_constant(const P1Function& u) {
    // The reaction derivative 3u^2 is a square, so B(v, v) >= ||v||_V^2 for A0 = A = I.
    for (Eigen::Index i = 0; i < u.coefficients().size(); ++i)
        NKCERT_REQUIRE(std::isfinite(u.coefficients()[i]), "stability_constant: non-finite state");
    return {1.0, "monotone reaction: d/ds (s^3) = 3 s^2 >= 0 and A0 = A = I give B(v,v) >= ||v||_V^2"};
}

AffineLipschitz lipschitz_affine(const P1Function& u, double C4) {
    NKCERT_REQUIRE(C4 > 0.0, "lipschitz_affine: C4 must be positive");
    const double c = 6.0 * std::pow(C4, 4);
    return {c * energy_norm(u), c};
}

PQ pq(const CertConstants& c, double rho) {
    NKCERT_REQUIRE(rho > 0.0, "pq: rho must be positive");
    const double L = c.lipschitz(rho);
    return {c.eta + (L / (2.0 * c.alpha)) * rho * rho - rho, (L / c.alpha) * rho};
}

std::string to_string(SearchPath path) {
    switch (path) {
        case SearchPath::kAcceptedInitial: return "accepted-initial";
        case SearchPath::kBracketedBisected: return "bracketed+bisected";
        case SearchPath::kFail: return "fail";
    }
    return "unknown";
}

namespace {

bool probe(const CertConstants& c, double rho, NKReport& report) {
    const PQ v = pq(c, rho);
    report.trace.push_back({rho, v.p, v.q});
    return v.admissible();
}

void finish(const CertConstants& c, double rho, NKReport& report) {
    const PQ v = pq(c, rho);
    report.rho = rho;
    report.p = v.p;
    report.q = v.q;
    report.admissible = v.admissible();
    report.p_below = pq(c, (1.0 - report.sanity_delta) * rho).p;
    report.p_above = pq(c, (1.0 + report.sanity_delta) * rho).p;
}

void bisect(const CertConstants& c, double lo, double up, int k_max, NKReport& report) {
    for (int k = 0; k < k_max; ++k) {
        const double mid = 0.5 * (lo + up);
        if (probe(c, mid, report)) lo = mid;
        else up = mid;
    }
    report.bracket_width = up - lo;
    report.path = SearchPath::kBracketedBisected;
    finish(c, lo, report);
}

}  // namespace

NKReport select_radius(const CertConstants& c, int j_max, int k_max) {
    c.validate();
    NKCERT_REQUIRE(j_max >= 1 && k_max >= 1, "select_radius: j_max and k_max must be >= 1");
    NKReport report;
    // An exact discrete zero needs no radius; the dyadic search is undefined there.
    NKCERT_REQUIRE(c.eta > 0.0, "select_radius: eta is zero, the radius search is undefined");
    const double initial = 2.0 * c.eta;
    if (probe(c, initial, report)) {
        report.path = SearchPath::kAcceptedInitial;
        finish(c, initial, report);
        return report;
    }
    double up = initial;
    double low = initial;
    bool found = false;
    for (int j = 1; j <= j_max; ++j) {
        low = up / 2.0;
        if (probe(c, low, report)) {
            found = true;
            break;
        }
        up = low;
    }
    if (!found) {
        report.path = SearchPath::kFail;
        report.admissible = false;
        report.rho = low;
        const PQ v = pq(c, low);
        report.p = v.p;
        report.q = v.q;
        return report;
    }
    bisect(c, low, up, k_max, report);
    return report;
}

NKReport bisect_radius(const CertConstants& c, double rho_low, double rho_up, int k_max) {
    c.validate();
    NKCERT_REQUIRE(0.0 < rho_low && rho_low < rho_up, "bisect_radius: need 0 < rho_low < rho_up");
    NKCERT_REQUIRE(pq(c, rho_low).admissible(), "bisect_radius: rho_low is not admissible");
    NKCERT_REQUIRE(!pq(c, rho_up).admissible(), "bisect_radius: rho_up is admissible");
    NKReport report;
    bisect(c, rho_low, rho_up, k_max, report);
    return report;
}

std::size_t AdmissibleScan::runs() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < indices.size(); ++k)
        if (k == 0 || indices[k] != indices[k - 1] + 1) ++n;
    return n;
}

AdmissibleScan scan_admissible(const CertConstants& c, double step, double rho_max) {
    NKCERT_REQUIRE(step > 0.0 && rho_max > 0.0, "scan_admissible: step and rho_max must be positive");
    AdmissibleScan scan;
    scan.step = step;
    const auto n = static_cast<std::size_t>(std::floor(rho_max / step + 1e-9));
    for (std::size_t i = 1; i <= n; ++i)
        if (pq(c, scan.radius(i)).admissible()) scan.indices.push_back(i);
    return scan;
}

}  // namespace nkcert
