#include "sme/harness/montecarlo.hpp"

#include <memory>

#include "sme/rng.hpp"

namespace sme::harness {

double containment_fraction_serial(const Ellipsoid& e, const PointSource& sampler, int count,
                                   std::uint64_t seed, double tol) {
    if (count <= 0) return 1.0;
    MembershipTester tester(e);
    long hits = 0;
    for (int i = 0; i < count; ++i)
        if (tester.contains(sampler(Rng::derive(seed, i)), tol)) ++hits;
    return static_cast<double>(hits) / count;
}

double containment_fraction(const Ellipsoid& e, const PointSource& sampler, int count,
                            std::uint64_t seed, double tol, Exec exec) {
    if (exec == Exec::Serial) return containment_fraction_serial(e, sampler, count, seed, tol);
    if (count <= 0) return 1.0;
    MembershipTester tester(e);
    long hits = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : hits) schedule(static)
#endif
    for (int i = 0; i < count; ++i)
        if (tester.contains(sampler(Rng::derive(seed, i)), tol)) ++hits;
    return static_cast<double>(hits) / count;
}

PointSource ellipsoid_sampler(const Ellipsoid& e) {
    // Precompute the affine map once; each key owns its substream so the
    // point depends only on the key.
    auto root = std::make_shared<Mat>(std::sqrt(e.scale) * sqrt_spsd(e.shape).mat());
    auto center = std::make_shared<Vec>(e.center);
    const int n = e.dim();
    return [root, center, n](std::uint64_t key) {
        Rng rng(key);
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = rng.gaussian();
        const double norm = g.norm();
        if (norm == 0.0) return *center;
        const double radius = std::pow(rng.uniform(), 1.0 / n);
        return Vec(*center + *root * (g * (radius / norm)));
    };
}

}  // namespace sme::harness
