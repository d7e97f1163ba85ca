#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "sme/errors.hpp"

namespace sme {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Default tolerances used across the library. All rank/zero decisions are
/// relative to the largest singular value of the matrix at hand.
struct Tolerances {
    double eps_rank = 1e-10;   // rank / zero-vector decisions
    double eps_sym = 1e-10;    // admissible negative-eigenvalue slack for SPSD
    double eps_pinv = 1e-9;    // Penrose-condition check tolerance
    double eps_case = 1e-9;    // correction case-boundary tolerance (scaled)
    double eps_beta = 1e-12;   // clamp distance from beta = 1 on strip fusions
    double eps_poly = 1e-12;   // degenerate leading-coefficient threshold
    double eps_imag = 1e-8;    // imaginary-part rejection for cubic roots
};

/// Symmetric n-by-n matrix value type. Construction symmetrizes the input
/// ((M + M^T)/2), so every arithmetic result routed through this type stays
/// exactly symmetric.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Mat m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw ValidationError("SymMatrix requires a square matrix");
        m_ = ((m_ + m_.transpose()) * 0.5).eval();
    }

    static SymMatrix Identity(int n) { return SymMatrix(Mat::Identity(n, n)); }
    static SymMatrix Zero(int n) { return SymMatrix(Mat::Zero(n, n)); }

    const Mat& mat() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }
    double trace() const { return m_.trace(); }

private:
    Mat m_;
};

/// Real roots of a cubic, plus the discriminant of the monic equivalent.
/// discriminant > 0 means three distinct real roots, < 0 exactly one.
struct CubicRealRoots {
    std::vector<double> roots;
    double discriminant = 0.0;
};

struct RankOneUpdate {
    double pdet = 1.0;
    int rank = 0;
    bool v_is_zero = false;
};

/// Eigendecomposition of a symmetric matrix with the rank-revealing helpers
/// the estimator needs. One decomposition serves pinv, pdet, rank and sqrt.
class Spectral {
public:
    explicit Spectral(const SymMatrix& m);

    int rank(double rel_tol) const;
    double pdet(double rel_tol) const;
    SymMatrix pinv(double rel_tol) const;
    SymMatrix sqrt(double rel_tol, double eps_sym) const;
    double max_abs_eigenvalue() const { return lambda_max_; }
    const Vec& eigenvalues() const { return evals_; }

private:
    Mat evecs_;
    Vec evals_;
    double lambda_max_ = 0.0;
};

int numeric_rank(const SymMatrix& m, double rel_tol);
SymMatrix pseudo_inverse(const SymMatrix& m, double rel_tol);
double pseudo_det(const SymMatrix& m, double rel_tol);
SymMatrix sqrt_spsd(const SymMatrix& m, const Tolerances& tol = {});

/// Product of the singular values above rel_tol * sigma_max of a general
/// (not necessarily symmetric) matrix; 1 for the zero matrix.
double pseudo_det_general(const Mat& m, double rel_tol);
int numeric_rank_general(const Mat& m, double rel_tol);

/// Pseudo-determinant and rank of b*(Q + a r r^T) from those of Q, without a
/// fresh decomposition. v := (I - Q Q^+) r decides the rank branch; the zero
/// test is ||v|| <= eps_rank * ||r||.
RankOneUpdate pdet_rank_one(const SymMatrix& Q, double pdetQ, int q, const Vec& r, double a,
                            double b, const SymMatrix& Qpinv, double eps_rank = 1e-10);

/// Pseudo-inverse of b*(Q + a r r^T) from Q^+, same zero test as pdet_rank_one.
SymMatrix pinv_rank_one(const SymMatrix& Q, const SymMatrix& Qpinv, const Vec& r, double a,
                        double b, double eps_rank = 1e-10);

/// Explicit real-root solver for b3 x^3 + b2 x^2 + b1 x + b0 = 0 (Cardano on
/// the reduced cubic, complex intermediates, Newton polish on the original).
CubicRealRoots solve_cubic(double b3, double b2, double b1, double b0, const Tolerances& tol = {});

namespace detail {
/// Shared branch cores so the prediction recursion can reuse one u/v split.
double pdet_rank_one_in_range(double pdetQ, int q, double a, double b, double rtu);
double pdet_rank_one_rank_up(double pdetQ, int q, double a, double b, double vtv);
SymMatrix pinv_rank_one_in_range(const SymMatrix& Qpinv, const Vec& u, double b, double c);
SymMatrix pinv_rank_one_rank_up(const SymMatrix& Qpinv, const Vec& u, const Vec& v, const Vec& r,
                                double b, double c);
}  // namespace detail

}  // namespace sme
