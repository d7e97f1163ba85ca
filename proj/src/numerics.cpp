#include "sme/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace sme {

Spectral::Spectral(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m.mat());
    if (es.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed");
    evecs_ = es.eigenvectors();
    evals_ = es.eigenvalues();
    lambda_max_ = evals_.size() == 0 ? 0.0 : evals_.cwiseAbs().maxCoeff();
}

int Spectral::rank(double rel_tol) const {
    if (lambda_max_ == 0.0) return 0;
    const double cut = rel_tol * lambda_max_;
    int r = 0;
    for (int i = 0; i < evals_.size(); ++i)
        if (std::abs(evals_[i]) > cut) ++r;
    return r;
}

double Spectral::pdet(double rel_tol) const {
    const double cut = rel_tol * lambda_max_;
    double p = 1.0;
    for (int i = 0; i < evals_.size(); ++i) {
        const double s = std::abs(evals_[i]);
        if (s > cut) p *= s;
    }
    return p;
}

SymMatrix Spectral::pinv(double rel_tol) const {
    const double cut = rel_tol * lambda_max_;
    Vec inv = Vec::Zero(evals_.size());
    for (int i = 0; i < evals_.size(); ++i)
        if (std::abs(evals_[i]) > cut) inv[i] = 1.0 / evals_[i];
    return SymMatrix(evecs_ * inv.asDiagonal() * evecs_.transpose());
}

SymMatrix Spectral::sqrt(double rel_tol, double eps_sym) const {
    const double neg_cut = -eps_sym * std::max(1.0, lambda_max_);
    const double cut = rel_tol * lambda_max_;
    Vec s = Vec::Zero(evals_.size());
    for (int i = 0; i < evals_.size(); ++i) {
        const double ev = evals_[i];
        if (ev < neg_cut) throw NotSpsd("eigenvalue " + std::to_string(ev) + " below tolerance");
        // Zero out sub-tolerance eigenvalues so rank(sqrt) == rank(input).
        s[i] = ev > cut ? std::sqrt(ev) : 0.0;
    }
    return SymMatrix(evecs_ * s.asDiagonal() * evecs_.transpose());
}

int numeric_rank(const SymMatrix& m, double rel_tol) { return Spectral(m).rank(rel_tol); }

SymMatrix pseudo_inverse(const SymMatrix& m, double rel_tol) { return Spectral(m).pinv(rel_tol); }

double pseudo_det(const SymMatrix& m, double rel_tol) { return Spectral(m).pdet(rel_tol); }

SymMatrix sqrt_spsd(const SymMatrix& m, const Tolerances& tol) {
    return Spectral(m).sqrt(tol.eps_rank, tol.eps_sym);
}

double pseudo_det_general(const Mat& m, double rel_tol) {
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 1.0;
    const double cut = rel_tol * sv[0];
    double p = 1.0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) p *= sv[i];
    return p;
}

int numeric_rank_general(const Mat& m, double rel_tol) {
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    const double cut = rel_tol * sv[0];
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++r;
    return r;
}

namespace detail {

double pdet_rank_one_in_range(double pdetQ, int q, double a, double b, double rtu) {
    const double factor = 1.0 + a * rtu;
    if (factor <= 0.0)
        throw NonPositivePdet("1 + a r^T u = " + std::to_string(factor) + " with r in range(Q)");
    return std::pow(b, q) * pdetQ * factor;
}

double pdet_rank_one_rank_up(double pdetQ, int q, double a, double b, double vtv) {
    return std::pow(b, q + 1) * pdetQ * a * vtv;
}

SymMatrix pinv_rank_one_in_range(const SymMatrix& Qpinv, const Vec& u, double b, double c) {
    Mat out = (Qpinv.mat() - (u * u.transpose()) / c) / b;
    return SymMatrix(std::move(out));
}

SymMatrix pinv_rank_one_rank_up(const SymMatrix& Qpinv, const Vec& u, const Vec& v, const Vec& r,
                                double b, double c) {
    const double rr = r.squaredNorm();
    Mat delta = (c / rr) * (v * v.transpose()) - u * v.transpose() - v * u.transpose();
    Mat out = (Qpinv.mat() + delta / rr) / b;
    return SymMatrix(std::move(out));
}

}  // namespace detail

RankOneUpdate pdet_rank_one(const SymMatrix& Q, double pdetQ, int q, const Vec& r, double a,
                            double b, const SymMatrix& Qpinv, double eps_rank) {
    const Vec u = Qpinv.mat() * r;
    const Vec v = r - Q.mat() * u;
    RankOneUpdate out;
    out.v_is_zero = v.norm() <= eps_rank * r.norm();
    if (out.v_is_zero) {
        out.pdet = detail::pdet_rank_one_in_range(pdetQ, q, a, b, r.dot(u));
        out.rank = q;
    } else {
        out.pdet = detail::pdet_rank_one_rank_up(pdetQ, q, a, b, v.squaredNorm());
        out.rank = q + 1;
    }
    return out;
}

SymMatrix pinv_rank_one(const SymMatrix& Q, const SymMatrix& Qpinv, const Vec& r, double a,
                        double b, double eps_rank) {
    const Vec u = Qpinv.mat() * r;
    const Vec v = r - Q.mat() * u;
    const double c = (1.0 + a * r.dot(u)) / a;
    if (v.norm() <= eps_rank * r.norm())
        return detail::pinv_rank_one_in_range(Qpinv, u, b, c);
    return detail::pinv_rank_one_rank_up(Qpinv, u, v, r, b, c);
}

namespace {

double eval_cubic(double b3, double b2, double b1, double b0, double x) {
    return ((b3 * x + b2) * x + b1) * x + b0;
}

double newton_polish(double b3, double b2, double b1, double b0, double x) {
    for (int it = 0; it < 2; ++it) {
        const double f = eval_cubic(b3, b2, b1, b0, x);
        const double df = (3.0 * b3 * x + 2.0 * b2) * x + b1;
        if (df == 0.0) break;
        const double step = f / df;
        const double xn = x - step;
        if (!std::isfinite(xn)) break;
        if (std::abs(eval_cubic(b3, b2, b1, b0, xn)) < std::abs(f)) x = xn;
    }
    return x;
}

}  // namespace

CubicRealRoots solve_cubic(double b3, double b2, double b1, double b0, const Tolerances& tol) {
    const double scale =
        std::max({std::abs(b3), std::abs(b2), std::abs(b1), std::abs(b0)});
    if (std::abs(b3) <= tol.eps_poly * scale)
        throw DegenerateLeadingCoefficient("|b3| = " + std::to_string(std::abs(b3)));

    // Monic form, then the reduced cubic x = y - b/3.
    const double b = b2 / b3;
    const double c = b1 / b3;
    const double d = b0 / b3;
    const double s = c - b * b / 3.0;
    const double t = d - b * c / 3.0 + 2.0 * b * b * b / 27.0;

    // Discriminant of the reduced (equals the general one by translation
    // invariance of root differences): -4 s^3 - 27 t^2.
    const double disc = -4.0 * s * s * s - 27.0 * t * t;
    const double u = std::pow(s / 3.0, 3) + (t / 2.0) * (t / 2.0);

    CubicRealRoots out;
    out.discriminant = disc;

    const double shift = b / 3.0;
    if (disc > 0.0) {
        // Three distinct real roots; u < 0 and the Cardano pair is conjugate.
        const std::complex<double> su = std::sqrt(std::complex<double>(u, 0.0));
        const std::complex<double> v = std::pow(-t / 2.0 + su, 1.0 / 3.0);
        const std::complex<double> omega(-0.5, 0.5 * std::sqrt(3.0));
        out.roots = {2.0 * std::real(v) - shift, 2.0 * std::real(omega * v) - shift,
                     2.0 * std::real(omega * omega * v) - shift};
    } else {
        const double su = std::sqrt(std::max(u, 0.0));
        const double v = std::cbrt(-t / 2.0 + su);
        const double w = std::cbrt(-t / 2.0 - su);
        const double real_root = v + w - shift;
        if (disc < 0.0) {
            out.roots = {real_root};
        } else {
            // Repeated roots: the remaining pair collapses onto -(v+w)/2.
            const double dup = -(v + w) / 2.0 - shift;
            out.roots = {real_root};
            const double mag = std::max({1.0, std::abs(real_root), std::abs(dup)});
            if (std::abs(real_root - dup) > tol.eps_imag * mag) out.roots.push_back(dup);
        }
    }

    for (double& r : out.roots) r = newton_polish(b3, b2, b1, b0, r);
    std::sort(out.roots.begin(), out.roots.end());
    return out;
}

}  // namespace sme
