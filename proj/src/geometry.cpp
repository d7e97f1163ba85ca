#include "sme/geometry.hpp"

#include <cmath>

#include "sme/rng.hpp"

namespace sme {

Ellipsoid make_ellipsoid(Vec center, SymMatrix shape, double scale, double eps_rank) {
    if (center.size() != shape.dim()) throw ValidationError("center/shape dimension mismatch");
    if (scale < 0.0) throw ValidationError("ellipsoid scale must be nonnegative");
    Ellipsoid e{std::move(center), std::move(shape), scale, 0};
    e.rank = numeric_rank(e.shape, eps_rank);
    return e;
}

void Zonotope::validate(double eps) const {
    if (generators.size() > 0 && generators.rows() != center.size())
        throw ValidationError("zonotope generator/center dimension mismatch");
    for (int j = 0; j < generators.cols(); ++j)
        if (generators.col(j).norm() <= eps * std::max(1.0, generators.norm()))
            throw ValidationError("zonotope generator column " + std::to_string(j) + " is zero");
}

double support(const Ellipsoid& e, const Vec& x) {
    const double quad = x.dot(e.shape.mat() * x);
    return e.center.dot(x) + std::sqrt(std::max(0.0, e.scale * quad));
}

MembershipTester::MembershipTester(const Ellipsoid& e, double eps_rank)
    : center_(e.center), scale_(e.scale) {
    Spectral spec(e.shape);
    pinv_ = spec.pinv(eps_rank).mat();
    projector_ = e.shape.mat() * pinv_;
}

bool MembershipTester::contains(const Vec& x, double tol) const {
    const Vec d = x - center_;
    const Vec off_range = d - projector_ * d;
    if (off_range.norm() > tol * (1.0 + d.norm())) return false;
    const double quad = d.dot(pinv_ * d);
    return quad <= scale_ * (1.0 + tol);
}

bool contains(const Ellipsoid& e, const Vec& x, double tol) {
    return MembershipTester(e).contains(x, tol);
}

std::vector<Vec> sample(const Ellipsoid& e, int count, std::uint64_t rng_seed) {
    std::vector<Vec> out;
    if (count <= 0) return out;
    out.reserve(count);
    const int n = e.dim();
    const Mat root = std::sqrt(e.scale) * sqrt_spsd(e.shape).mat();
    Rng rng(rng_seed);
    for (int k = 0; k < count; ++k) {
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = rng.gaussian();
        const double norm = g.norm();
        if (norm == 0.0) {
            out.push_back(e.center);
            continue;
        }
        const double radius = std::pow(rng.uniform(), 1.0 / n);
        out.push_back(e.center + root * (g * (radius / norm)));
    }
    return out;
}

double unit_ball_volume(int q) {
    return std::pow(M_PI, 0.5 * q) / std::tgamma(0.5 * q + 1.0);
}

double pseudo_volume(const Ellipsoid& e, double eps_rank) {
    Spectral spec(e.shape);
    const int q = spec.rank(eps_rank);
    if (q == 0) return 0.0;
    return unit_ball_volume(q) * std::pow(e.scale, q) * spec.pdet(eps_rank);
}

double ssal(const Ellipsoid& e) { return e.scale * e.shape.trace(); }

double signed_distance(const Ellipsoid& e, const Hyperplane& h) {
    const double dn = h.normal.norm();
    if (dn == 0.0) throw ValidationError("hyperplane normal is zero");
    const double quad = h.normal.dot(e.shape.mat() * h.normal);
    return (std::abs(h.offset - e.center.dot(h.normal)) -
            std::sqrt(std::max(0.0, e.scale * quad))) /
           dn;
}

Ellipsoid affine_image(const Ellipsoid& e, const Mat& A, const Vec& b, double eps_rank) {
    Ellipsoid out;
    out.center = A * e.center + b;
    out.shape = SymMatrix(A * e.shape.mat() * A.transpose());
    out.scale = e.scale;
    const bool a_full_rank = numeric_rank_general(A, eps_rank) == A.cols();
    out.rank = a_full_rank ? e.rank : numeric_rank(out.shape, eps_rank);
    return out;
}

}  // namespace sme
