#include "sme/correction.hpp"

#include <algorithm>
#include <cmath>

namespace sme {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Measurement Measurement::make(Vec f, double lower, double upper) {
    if (f.size() == 0 || f.norm() == 0.0) throw InvalidBounds("measurement direction is zero");
    if (std::isnan(lower) || std::isnan(upper)) throw InvalidBounds("NaN bound");
    if (lower > upper) throw InvalidBounds("lower > upper");
    if (std::isinf(lower) && std::isinf(upper)) throw InvalidBounds("both bounds infinite");
    if (lower == kInf || upper == -kInf) throw InvalidBounds("bound has the wrong sign of inf");
    return Measurement{std::move(f), lower, upper};
}

MeasurementKind Measurement::kind() const {
    if (lower == upper) return MeasurementKind::Hyperplane;
    if (lower == -kInf) return MeasurementKind::UpperHalfspace;
    if (upper == kInf) return MeasurementKind::LowerHalfspace;
    return MeasurementKind::Strip;
}

FusionGeometry fusion_geometry(const Ellipsoid& e, const Measurement& m, const Tolerances& tol) {
    FusionGeometry g;
    g.phi = e.shape.mat() * m.direction;
    const double raw_theta = m.direction.dot(g.phi);
    g.theta = std::max(0.0, raw_theta);
    const double threshold =
        tol.eps_rank * m.direction.squaredNorm() * e.shape.mat().norm();
    g.alpha = g.theta > threshold ? 1.0 / g.theta : 0.0;
    if (g.alpha == 0.0) g.theta = 0.0;
    g.eta = std::sqrt(e.scale * g.theta);
    const double fc = m.direction.dot(e.center);
    g.rho_bar = g.eta + fc;
    g.rho_low = 2.0 * g.eta - g.rho_bar;  // -rho_low = fc - eta
    g.y_bar = std::min(m.upper, g.rho_bar);
    g.y_low = std::max(m.lower, -g.rho_low);
    g.delta = 0.5 * (g.y_bar + g.y_low - g.rho_bar + g.rho_low);
    g.gamma = std::max(0.0, 0.5 * (g.y_bar - g.y_low));
    return g;
}

CaseLabel classify_case(const FusionGeometry& g, const Measurement& m, const Ellipsoid& e,
                        const Tolerances& tol) {
    const double eps = g.case_eps(tol.eps_case);
    // Case 1: the raw bounds certify an empty intersection.
    if (m.upper < -g.rho_low - eps || m.lower > g.rho_bar + eps) return {CaseKind::Empty, {}};
    // Case 2: no usable direction, or clipping brings no strict improvement.
    if (g.alpha == 0.0) return {CaseKind::NoOp, {}};
    if (g.y_low <= -g.rho_low + eps && g.y_bar >= g.rho_bar - eps) return {CaseKind::NoOp, {}};
    // Case 3: the clipped bounds pin a tangency point.
    if (g.hyperplane_branch(tol.eps_case)) {
        const Vec step = std::sqrt(e.scale / g.theta) * g.phi;
        if (std::abs(g.y_bar - g.rho_bar) <= eps) return {CaseKind::Point, e.center + step};
        if (std::abs(g.y_low + g.rho_low) <= eps) return {CaseKind::Point, e.center - step};
    }
    return {CaseKind::Fuse, {}};
}

double beta_sigma(double gamma, double delta) {
    if (gamma < 0.0) throw ValidationError("gamma must be nonnegative");
    const double ad = std::abs(delta);
    return ad > gamma ? 1.0 - gamma / ad : 0.0;
}

namespace {

// Scale of the fused ellipsoid as a function of beta (Eq family).
double sigma_of_beta(double sigma, double alpha, double gamma, double delta, double beta) {
    return sigma + alpha * beta * (gamma * gamma / (1.0 - beta) - delta * delta);
}

}  // namespace

double beta_volume(int q, double alpha, double gamma, double delta, double sigma,
                   const Tolerances& tol) {
    if (q < 1) throw ValidationError("beta_volume requires rank >= 1");
    if (alpha <= 0.0) throw ValidationError("beta_volume requires alpha > 0");
    const double a0 = q * alpha * (gamma * gamma - delta * delta) - sigma;
    if (a0 >= 0.0) return 0.0;
    const double a1 = (2.0 * q + 1.0) * alpha * delta * delta + sigma - gamma * gamma * alpha;
    const double a2 = -(q + 1.0) * alpha * delta * delta;

    const double hi = 1.0 - tol.eps_beta;
    std::vector<double> candidates;
    auto admit = [&](double root) {
        if (!std::isfinite(root)) return;
        if (root < -1e-9 || root > 1.0 + 1e-9) return;
        candidates.push_back(std::clamp(root, 0.0, hi));
    };
    if (std::abs(a2) <= tol.eps_poly * std::max({std::abs(a0), std::abs(a1), 1.0})) {
        if (a1 != 0.0) admit(-a0 / a1);
    } else {
        // Algorithm and appendix disagree on the root sign; evaluate both.
        const double disc = a1 * a1 - 4.0 * a0 * a2;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            admit((-a1 + sq) / (2.0 * a2));
            admit((-a1 - sq) / (2.0 * a2));
        }
    }
    auto objective = [&](double b) {
        const double sd = sigma_of_beta(sigma, alpha, gamma, delta, b);
        return std::pow(sd, q) * (1.0 - b);
    };
    if (q == 1) {
        // Thm 4.3.2 assumes q > 1; fall back to a dense grid of the same
        // objective for rank-one shapes.
        for (int i = 0; i <= 10000; ++i) candidates.push_back(hi * i / 10000.0);
    }
    if (candidates.empty()) throw NoRootInUnit("beta_volume: a0 < 0 but no root in [0,1)");
    double best = candidates.front();
    for (double b : candidates)
        if (objective(b) < objective(best)) best = b;
    return best;
}

double beta_ssal(double trP, double nu, double alpha, double gamma, double delta, double sigma,
                 const Tolerances& tol) {
    if (trP <= 0.0 || nu <= 0.0) throw ValidationError("beta_ssal requires trP, nu > 0");
    if (alpha <= 0.0) throw ValidationError("beta_ssal requires alpha > 0");
    const double g2 = gamma * gamma, d2 = delta * delta;
    const double b0 = trP * (g2 - d2) - nu * sigma;
    if (b0 >= 0.0) return 0.0;
    const double b1 = 2.0 * (nu * sigma + trP * d2 + alpha * nu * (d2 - g2));
    const double b2 = alpha * nu * (g2 - 4.0 * d2) - nu * sigma - trP * d2;
    const double b3 = 2.0 * alpha * nu * d2;

    const double hi = 1.0 - tol.eps_beta;
    std::vector<double> candidates;
    auto admit = [&](double root) {
        if (!std::isfinite(root)) return;
        if (root < 1e-12 || root > 1.0 + 1e-9) return;
        candidates.push_back(std::clamp(root, 0.0, hi));
    };
    const double scale = std::max({std::abs(b0), std::abs(b1), std::abs(b2), std::abs(b3)});
    if (std::abs(b3) <= tol.eps_poly * scale) {
        // delta ~ 0 degenerates to a quadratic in beta.
        if (std::abs(b2) <= tol.eps_poly * scale) {
            if (b1 != 0.0) admit(-b0 / b1);
        } else {
            const double disc = b1 * b1 - 4.0 * b0 * b2;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                admit((-b1 + sq) / (2.0 * b2));
                admit((-b1 - sq) / (2.0 * b2));
            }
        }
    } else {
        for (double root : solve_cubic(b3, b2, b1, b0, tol).roots) admit(root);
    }
    if (candidates.empty()) throw NoRootInUnit("beta_ssal: b0 < 0 but no root in (0,1)");
    auto objective = [&](double b) {
        return sigma_of_beta(sigma, alpha, gamma, delta, b) * (trP - alpha * b * nu);
    };
    double best = candidates.front();
    for (double b : candidates)
        if (objective(b) < objective(best)) best = b;
    return best;
}

Ellipsoid apply_fusion(const Ellipsoid& e, const FusionGeometry& g, double beta,
                       bool sigma_min_form, const Tolerances& tol) {
    if (g.alpha <= 0.0) throw ValidationError("apply_fusion requires alpha > 0");
    if (beta < 0.0 || beta > 1.0) throw ValidationError("beta out of [0,1]");
    const bool hyper = g.hyperplane_branch(tol.eps_case);
    if (beta == 1.0 && !hyper) throw ValidationError("beta = 1 outside the hyperplane branch");

    Ellipsoid out;
    const double ab = g.alpha * beta;
    out.center = e.center + ab * g.delta * g.phi;
    out.shape = SymMatrix(e.shape.mat() - ab * (g.phi * g.phi.transpose()));
    double sigma;
    if (hyper || sigma_min_form || beta == 0.0) {
        sigma = e.scale - ab * beta * g.delta * g.delta;
    } else {
        sigma = e.scale + ab * (g.gamma * g.gamma / (1.0 - beta) - g.delta * g.delta);
    }
    if (sigma < -tol.eps_case * std::max(1.0, e.scale))
        throw NonPositiveScale("fused scale " + std::to_string(sigma));
    out.scale = std::max(0.0, sigma);
    out.rank = e.rank - ((beta == 1.0) ? 1 : 0);
    return out;
}

CorrectionResult correct(const Ellipsoid& e, const std::vector<Measurement>& measurements,
                         CorrectionCriterion criterion, InconsistencyPolicy policy,
                         const Tolerances& tol) {
    CorrectionResult out;
    out.ellipsoid = e;
    out.labels.reserve(measurements.size());
    for (const Measurement& m : measurements) {
        const FusionGeometry g = fusion_geometry(out.ellipsoid, m, tol);
        CaseLabel label = classify_case(g, m, out.ellipsoid, tol);
        out.labels.push_back(label);
        if (label.kind == CaseKind::Empty) {
            if (policy == InconsistencyPolicy::Abort)
                throw InconsistentMeasurement("bounds outside the ellipsoid support range");
            continue;  // skip emits beta = 0
        }
        if (label.kind == CaseKind::NoOp) continue;

        double beta;
        bool sigma_form = false;
        if (g.hyperplane_branch(tol.eps_case)) {
            beta = 1.0;
        } else {
            const Ellipsoid& cur = out.ellipsoid;
            switch (criterion.variant) {
                case CorrectionVariant::SigmaMin:
                    beta = beta_sigma(g.gamma, g.delta);
                    sigma_form = true;
                    break;
                case CorrectionVariant::VolumeMin:
                    beta = beta_volume(cur.rank, g.alpha, g.gamma, g.delta, cur.scale, tol);
                    break;
                case CorrectionVariant::SsalMin:
                    beta = beta_ssal(cur.shape.trace(), g.phi.squaredNorm(), g.alpha, g.gamma,
                                     g.delta, cur.scale, tol);
                    break;
                default:
                    throw ValidationError("unknown correction criterion");
            }
        }
        out.ellipsoid = apply_fusion(out.ellipsoid, g, beta, sigma_form, tol);
        out.fusions.push_back(FusionTrace{g.phi, g.alpha, beta, beta == 1.0});
    }
    return out;
}

}  // namespace sme
