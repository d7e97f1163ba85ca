#include "sme/harness/simulate.hpp"

#include <cmath>

#include "sme/rng.hpp"

namespace sme::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec draw_noise(int m, NoisePolicy policy, Rng& rng) {
    Vec w(m);
    switch (policy) {
        case NoisePolicy::Uniform:
            for (int i = 0; i < m; ++i) w[i] = rng.uniform(-1.0, 1.0);
            break;
        case NoisePolicy::Vertex:
            for (int i = 0; i < m; ++i) w[i] = rng.next_u64() & 1 ? 1.0 : -1.0;
            break;
        case NoisePolicy::Zero:
            w.setZero();
            break;
    }
    return w;
}

Vec draw_direction(const MeasurementSchedule& sched, int n, int index, Rng& rng) {
    if (sched.direction == "axes") return Vec::Unit(n, index % n);
    Vec f(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) f[i] = rng.gaussian();
        norm = f.norm();
    } while (norm < 1e-9);
    return f / norm;
}

MeasurementKind draw_kind(const MeasurementSchedule& sched, Rng& rng) {
    const double total = sched.strip_weight + sched.upper_weight + sched.lower_weight +
                         sched.equality_weight;
    double t = rng.uniform() * total;
    if ((t -= sched.strip_weight) < 0.0) return MeasurementKind::Strip;
    if ((t -= sched.upper_weight) < 0.0) return MeasurementKind::UpperHalfspace;
    if ((t -= sched.lower_weight) < 0.0) return MeasurementKind::LowerHalfspace;
    return MeasurementKind::Hyperplane;
}

}  // namespace

TruthData simulate_truth(const Scenario& s, std::uint64_t seed) {
    TruthData out;
    const Ellipsoid e0 = s.initial_ellipsoid();
    out.states.push_back(sample(e0, 1, Rng::derive(seed, 1))[0]);
    out.measurements.emplace_back();

    const auto models = expand_models(s);
    Rng rng(Rng::derive(seed, 2));
    for (int k = 0; k < s.horizon; ++k) {
        const ProcessModel& model = models[k % models.size()];
        const int m = model.generator_count();
        Vec w = draw_noise(m, s.noise_policy, rng);
        Vec x = model.A * out.states.back();
        if (model.B.size() > 0) x += model.B * model.tau;
        if (m > 0) x += model.noise.generators * w;
        out.noise.push_back(w);
        out.states.push_back(x);

        std::vector<Measurement> batch;
        if (s.schedule.per_step > 0 && rng.uniform() < s.schedule.presence_probability) {
            Mat equality_dirs(s.n, 0);
            for (int i = 0; i < s.schedule.per_step; ++i) {
                MeasurementKind kind = draw_kind(s.schedule, rng);
                Vec f = draw_direction(s.schedule, s.n, i, rng);
                if (kind == MeasurementKind::Hyperplane) {
                    // Assumption: equality directions within a batch have full
                    // column rank. Resample a few times, else degrade to strip.
                    int tries = 0;
                    Mat cand(s.n, equality_dirs.cols() + 1);
                    for (;;) {
                        cand << equality_dirs, f;
                        if (static_cast<int>(cand.cols()) <= s.n &&
                            numeric_rank_general(cand, 1e-8) == cand.cols())
                            break;
                        if (++tries > 20 || s.schedule.direction == "axes") {
                            kind = MeasurementKind::Strip;
                            break;
                        }
                        f = draw_direction(s.schedule, s.n, i, rng);
                    }
                    if (kind == MeasurementKind::Hyperplane) equality_dirs = cand;
                }
                const double y = f.dot(x) + s.schedule.adversarial_offset *
                                                (rng.next_u64() & 1 ? 1.0 : -1.0);
                const double a = rng.uniform(0.05, std::max(0.051, s.schedule.width));
                const double b = rng.uniform(0.05, std::max(0.051, s.schedule.width));
                switch (kind) {
                    case MeasurementKind::Strip:
                        batch.push_back(Measurement::make(f, y - a, y + b));
                        break;
                    case MeasurementKind::UpperHalfspace:
                        batch.push_back(Measurement::make(f, -kInf, y + a));
                        break;
                    case MeasurementKind::LowerHalfspace:
                        batch.push_back(Measurement::make(f, y - a, kInf));
                        break;
                    case MeasurementKind::Hyperplane:
                        batch.push_back(Measurement::make(f, y, y));
                        break;
                }
            }
        }
        out.measurements.push_back(std::move(batch));
    }
    return out;
}

}  // namespace sme::harness
