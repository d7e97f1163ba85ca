#pragma once

#include <cstdint>
#include <vector>

#include "sme/numerics.hpp"

namespace sme {

/// Possibly degenerate ellipsoid E(center, scale * shape) =
/// { x : (x-c)^T (scale*shape)^+ (x-c) <= 1, x-c in range(shape) }.
/// The scalar scale is carried separately from the unit-scale shape matrix;
/// rank tracks rank(shape) incrementally through the filter recursions.
struct Ellipsoid {
    Vec center;
    SymMatrix shape;
    double scale = 1.0;
    int rank = 0;

    int dim() const { return static_cast<int>(center.size()); }
};

/// Builds an ellipsoid, deriving the rank from the shape matrix.
Ellipsoid make_ellipsoid(Vec center, SymMatrix shape, double scale, double eps_rank = 1e-10);

/// Strip { x : |normal^T x - offset| <= 1 } (normalized width form).
struct Strip {
    Vec normal;
    double offset = 0.0;
};

enum class HalfspaceSense { Upper, Lower };

/// Halfspace { x : normal^T x <= bound }. A lower-sense input (f^T x >= b) is
/// stored canonically as (-f, -b); `sense` records the original orientation.
struct Halfspace {
    Halfspace(Vec f, double b, HalfspaceSense s) : sense(s) {
        if (s == HalfspaceSense::Lower) {
            normal = -f;
            bound = -b;
        } else {
            normal = std::move(f);
            bound = b;
        }
    }
    Vec normal;
    double bound;
    HalfspaceSense sense;
};

/// Hyperplane { x : normal^T x = offset }.
struct Hyperplane {
    Vec normal;
    double offset = 0.0;
};

/// Zonotope center + generators * B_inf; generator columns must be nonzero.
struct Zonotope {
    Vec center;
    Mat generators;  // n x m, m may be 0

    int generator_count() const { return static_cast<int>(generators.cols()); }
    void validate(double eps = 1e-14) const;
};

/// Support function of the ellipsoid: c^T x + sqrt(scale * x^T P x).
double support(const Ellipsoid& e, const Vec& x);

/// Membership with precomputed spectral data; use this when testing many
/// points against one ellipsoid.
class MembershipTester {
public:
    explicit MembershipTester(const Ellipsoid& e, double eps_rank = 1e-10);
    bool contains(const Vec& x, double tol) const;

private:
    Vec center_;
    Mat pinv_;       // (shape)^+
    Mat projector_;  // shape * shape^+
    double scale_;
};

bool contains(const Ellipsoid& e, const Vec& x, double tol);

/// Uniform samples from the ellipsoid (Gaussian direction, radius t^(1/n)).
std::vector<Vec> sample(const Ellipsoid& e, int count, std::uint64_t rng_seed);

/// Pseudo-volume vol(B2^q) * pdet(scale * shape), the rank-aware volume
/// surrogate (product of squared semi-axis lengths times the unit-ball
/// volume of the range dimension).
double pseudo_volume(const Ellipsoid& e, double eps_rank = 1e-10);

/// Volume of the q-dimensional unit Euclidean ball.
double unit_ball_volume(int q);

/// Sum of squared axes lengths: scale * tr(shape).
double ssal(const Ellipsoid& e);

/// Signed distance from the ellipsoid to a hyperplane; <= 0 iff they meet.
double signed_distance(const Ellipsoid& e, const Hyperplane& h);

/// Image of the ellipsoid under x -> A x + b.
Ellipsoid affine_image(const Ellipsoid& e, const Mat& A, const Vec& b, double eps_rank = 1e-10);

}  // namespace sme
