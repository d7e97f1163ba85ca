#include "sme/prediction.hpp"

#include <cmath>
#include <limits>

namespace sme {

void ProcessModel::validate(double eps_rank) {
    const int n = dim();
    if (A.rows() != A.cols()) throw ValidationError("A must be square");
    if (!A.allFinite()) throw ValidationError("A has non-finite entries");
    if (B.size() > 0 && B.rows() != n) throw ValidationError("B row count mismatch");
    if (!B.allFinite()) throw ValidationError("B has non-finite entries");
    if (tau.size() != B.cols()) throw ValidationError("tau length must match B columns");
    if (!tau.allFinite()) throw ValidationError("tau has non-finite entries");
    if (noise.generator_count() > 0 && noise.generators.rows() != n)
        throw ValidationError("noise generator row count mismatch");
    if (!noise.generators.allFinite()) throw ValidationError("R has non-finite entries");
    for (int j = 0; j < noise.generator_count(); ++j)
        if (noise.generators.col(j).norm() <= eps_rank * std::max(1.0, noise.generators.norm()))
            throw ValidationError("noise generator column " + std::to_string(j) + " is zero");
    rank_A = numeric_rank_general(A, eps_rank);
}

Ellipsoid minkowski_segment(const Ellipsoid& e, const Vec& r, double mu) {
    if (mu <= 0.0) throw ValidationError("mu must be positive");
    if (r.norm() == 0.0) throw ValidationError("segment generator is zero");
    Ellipsoid out = e;
    out.shape = SymMatrix(
        (1.0 + mu) * (e.shape.mat() + (r * r.transpose()) / (mu * e.scale)));
    out.rank = numeric_rank(out.shape, 1e-10);
    return out;
}

double mu_volume(int q, double h, bool v_is_zero) {
    if (q < 1) throw ValidationError("mu_volume requires rank >= 1");
    if (!v_is_zero) return 1.0 / q;
    if (h <= 0.0) throw DegenerateDirection("h = " + std::to_string(h) + " with v = 0");
    const double qm1 = q - 1.0;
    return (std::sqrt(qm1 * qm1 * h * h + 4.0 * q * h) - qm1 * h) / (2.0 * q);
}

double mu_trace(double trQ, double rCr, double sigma) {
    if (trQ <= 0.0) throw ZeroTrace("tr(Q) = " + std::to_string(trQ));
    return std::sqrt(rCr / (sigma * trQ));
}

namespace {

Vec propagate_center(const Ellipsoid& e, const ProcessModel& m) {
    Vec c = m.A * e.center;
    if (m.B.size() > 0) c += m.B * m.tau;
    return c;
}

}  // namespace

PredictionResult predict_volume_min(const Ellipsoid& e, const ProcessModel& model,
                                    const PredictionScratch& scratch, const Tolerances& tol) {
    const int n = e.dim();
    PredictionResult out;
    out.ellipsoid.center = propagate_center(e, model);
    out.ellipsoid.scale = e.scale;

    SymMatrix Q(model.A * e.shape.mat() * model.A.transpose());
    const bool a_full = model.rank_A == n;
    int q = a_full ? e.rank : numeric_rank(Q, tol.eps_rank);

    SymMatrix theta;
    double pdet;
    // The carried pseudo-inverse transforms through the state map only in the
    // invertible/full-rank regime; anything else falls back to a fresh
    // decomposition, as does an invalidated scratch.
    if (scratch.valid && a_full && e.rank == n) {
        Eigen::PartialPivLU<Mat> lu(model.A);
        // theta <- A^-T theta A^-1 via two transposed solves.
        const Mat y = lu.transpose().solve(scratch.theta.mat());
        theta = SymMatrix(lu.transpose().solve(y.transpose()));
        const double da = lu.determinant();
        pdet = scratch.pdet * da * da;
    } else {
        Spectral spec(Q);
        theta = spec.pinv(tol.eps_rank);
        pdet = spec.pdet(tol.eps_rank);
        if (!a_full) q = spec.rank(tol.eps_rank);
    }

    const double sigma = e.scale;
    const int m = model.generator_count();
    out.mus.reserve(m);
    for (int i = 0; i < m; ++i) {
        const Vec r = model.noise.generators.col(i);
        if (q == 0) {
            // Zero shape: the Minkowski bound is exact in the limit, the
            // segment itself is the sum. No finite mu minimizes here.
            Q = SymMatrix(Mat((r * r.transpose()) / sigma));
            theta = SymMatrix(Mat(sigma / (r.squaredNorm() * r.squaredNorm()) *
                                  (r * r.transpose())));
            pdet = r.squaredNorm() / sigma;
            q = 1;
            out.mus.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const Vec u = theta.mat() * r;
        const Vec v = r - Q.mat() * u;
        const bool v_zero = v.norm() <= tol.eps_rank * r.norm();
        const double rtu = r.dot(u);
        const double mu = mu_volume(q, v_zero ? rtu / sigma : 0.0, v_zero);
        const double a = 1.0 / (mu * sigma);
        const double b = 1.0 + mu;
        const double c = sigma * mu + rtu;
        if (v_zero) {
            pdet = detail::pdet_rank_one_in_range(pdet, q, a, b, rtu);
            theta = detail::pinv_rank_one_in_range(theta, u, b, c);
        } else {
            pdet = detail::pdet_rank_one_rank_up(pdet, q, a, b, v.squaredNorm());
            theta = detail::pinv_rank_one_rank_up(theta, u, v, r, b, c);
            ++q;
        }
        Q = SymMatrix(b * (Q.mat() + a * (r * r.transpose())));
        out.mus.push_back(mu);
    }

    out.ellipsoid.shape = Q;
    out.ellipsoid.rank = q;
    out.scratch = PredictionScratch{theta, pdet, q, true};
    return out;
}

PredictionResult predict_trace_min(const Ellipsoid& e, const ProcessModel& model,
                                   const std::optional<Mat>& weight, const Tolerances& tol) {
    const int n = e.dim();
    PredictionResult out;
    out.ellipsoid.center = propagate_center(e, model);
    out.ellipsoid.scale = e.scale;

    SymMatrix Q0(model.A * e.shape.mat() * model.A.transpose());
    const int m = model.generator_count();
    const bool a_full = model.rank_A == n;

    if (m == 0) {
        out.ellipsoid.shape = Q0;
        out.ellipsoid.rank =
            (a_full && e.rank == n) ? n : numeric_rank(Q0, tol.eps_rank);
        return out;
    }

    const double sigma = e.scale;
    auto weighted_trace = [&](const Mat& q) {
        return weight ? (*weight * q * weight->transpose()).trace() : q.trace();
    };
    auto weighted_norm = [&](const Vec& r) { return weight ? (*weight * r).norm() : r.norm(); };

    const double tr0 = weighted_trace(Q0.mat());
    if (tr0 <= 0.0) throw ZeroTrace("tr(Q0) = " + std::to_string(tr0) + " with m > 0");
    const double vartheta = std::sqrt(sigma * tr0);

    double varpi = 0.0;
    Mat M = Mat::Zero(n, n);
    double tr_running = tr0;
    for (int i = 0; i < m; ++i) {
        const Vec r = model.noise.generators.col(i);
        const double cnorm = weighted_norm(r);
        if (cnorm <= tol.eps_rank * std::max(1.0, r.norm()))
            throw ValidationError("weighted generator C r_" + std::to_string(i) + " is zero");
        varpi += cnorm;
        M += (r * r.transpose()) / cnorm;
        // The per-generator mu values of the sequential recursion, kept for
        // diagnostics; the shape itself comes from the closed form.
        const double mu = mu_trace(tr_running, cnorm * cnorm, sigma);
        tr_running = (1.0 + mu) * (tr_running + cnorm * cnorm / (mu * sigma));
        out.mus.push_back(mu);
    }

    out.ellipsoid.shape =
        SymMatrix((1.0 + varpi / vartheta) * (Q0.mat() + (vartheta / sigma) * M));
    out.ellipsoid.rank = (a_full && e.rank == n) ? n
                                                 : numeric_rank(out.ellipsoid.shape, tol.eps_rank);
    return out;
}

}  // namespace sme
