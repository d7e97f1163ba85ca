#pragma once

#include <cstdint>
#include <functional>

#include "sme/geometry.hpp"

namespace sme::harness {

enum class Exec { Serial, Parallel };

/// Deterministic point source: must map (key) to the same point regardless of
/// evaluation order, so the parallel path is bit-identical to the serial one.
using PointSource = std::function<Vec(std::uint64_t key)>;

/// Fraction of sampled points contained in the ellipsoid. The sampler is
/// invoked with keys derived from (seed, index); both execution policies
/// return identical results.
double containment_fraction(const Ellipsoid& e, const PointSource& sampler, int count,
                            std::uint64_t seed, double tol = 1e-9, Exec exec = Exec::Parallel);

/// Deterministic sampler over an ellipsoid (one point per key).
PointSource ellipsoid_sampler(const Ellipsoid& e);

/// Serial reference loop kept alongside the OpenMP kernel for testing and
/// benchmarking.
double containment_fraction_serial(const Ellipsoid& e, const PointSource& sampler, int count,
                                   std::uint64_t seed, double tol = 1e-9);

}  // namespace sme::harness
