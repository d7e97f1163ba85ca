#include "sme/harness/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sme/rng.hpp"

namespace sme::harness {

using nlohmann::json;

namespace {

json encode_real(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

double decode_real(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ParseError("field '" + field + "' is not a real number");
}

json encode_matrix(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(encode_real(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat decode_matrix(const json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError("matrix '" + field + "' must be an array of rows");
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return Mat(0, 0);
    if (!j[0].is_array()) throw ParseError("matrix '" + field + "' rows must be arrays");
    const int cols = static_cast<int>(j[0].size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw ParseError("matrix '" + field + "' is ragged");
        for (int c = 0; c < cols; ++c) m(i, c) = decode_real(j[i][c], field);
    }
    return m;
}

json encode_vector(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(encode_real(v[i]));
    return out;
}

Vec decode_vector(const json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError("vector '" + field + "' must be an array");
    Vec v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = decode_real(j[i], field);
    return v;
}

const json& require(const json& j, const std::string& field) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError("missing field '" + field + "'");
    return *it;
}

std::string policy_name(NoisePolicy p) {
    switch (p) {
        case NoisePolicy::Uniform: return "uniform";
        case NoisePolicy::Vertex: return "vertex";
        case NoisePolicy::Zero: return "zero";
    }
    return "uniform";
}

NoisePolicy policy_from(const std::string& s) {
    if (s == "uniform") return NoisePolicy::Uniform;
    if (s == "vertex") return NoisePolicy::Vertex;
    if (s == "zero") return NoisePolicy::Zero;
    throw ParseError("unknown noise_policy '" + s + "'");
}

Mat random_matrix(int rows, int cols, Rng& rng) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    return m;
}

double spectral_radius(const Mat& a) {
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat random_rotation(int n, Rng& rng) {
    Mat g = random_matrix(n, n, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
}

ProcessModel build_step(const std::string& name, int n, int m, int l, Rng& rng) {
    Mat a;
    if (name == "random-stable") {
        a = random_matrix(n, n, rng);
        const double rho = spectral_radius(a);
        if (rho > 0.0) a *= 0.98 / rho;
    } else if (name == "rotation") {
        a = random_rotation(n, rng);
    } else if (name == "integrator") {
        a = Mat::Identity(n, n);
        for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 0.1;
    } else {
        throw ValidationError("unknown model generator '" + name + "'");
    }
    Mat b = l > 0 ? Mat(0.2 * random_matrix(n, l, rng)) : Mat::Zero(n, 0);
    Vec tau(l);
    for (int i = 0; i < l; ++i) tau[i] = rng.uniform(-1.0, 1.0);
    Mat r = Mat::Zero(n, m);
    for (int j = 0; j < m; ++j) {
        Vec col(n);
        do {
            for (int i = 0; i < n; ++i) col[i] = rng.gaussian();
        } while (col.norm() < 1e-6);
        r.col(j) = 0.1 * col;
    }
    ProcessModel model{std::move(a), std::move(b), std::move(tau), Zonotope{Vec::Zero(n), std::move(r)},
                       -1};
    model.validate();
    return model;
}

}  // namespace

Ellipsoid Scenario::initial_ellipsoid() const { return make_ellipsoid(x0_center, p0, sigma0); }

ProcessModel Scenario::model_at(int k) const {
    const auto models = expand_models(*this);
    if (models.empty()) throw ValidationError("scenario has no models");
    return models[k % models.size()];
}

void Scenario::validate() const {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (x0_center.size() != n) throw ValidationError("x0 center dimension mismatch");
    if (p0.dim() != n) throw ValidationError("P0 dimension mismatch");
    if (sigma0 <= 0.0) throw ValidationError("sigma0 must be positive");
    if (numeric_rank(p0, 1e-10) != n) throw ValidationError("P0 must be positive definite");
    if (schedule.per_step < 0) throw ValidationError("per_step must be >= 0");
    if (schedule.presence_probability < 0.0 || schedule.presence_probability > 1.0)
        throw ValidationError("presence_probability out of [0,1]");
    if (schedule.direction != "random" && schedule.direction != "axes")
        throw ValidationError("direction must be 'random' or 'axes'");
    const double mix = schedule.strip_weight + schedule.upper_weight + schedule.lower_weight +
                       schedule.equality_weight;
    if (mix <= 0.0) throw ValidationError("measurement kind mix has zero mass");
    for (const ProcessModel& m : expand_models(*this)) {
        if (m.dim() != n) throw ValidationError("model dimension mismatch");
        ProcessModel copy = m;
        copy.validate();  // bounded entries, nonzero generator columns
    }
}

std::vector<ProcessModel> expand_models(const Scenario& s) {
    if (const auto* ex = std::get_if<ExplicitModels>(&s.model)) return ex->steps;
    const auto& gen = std::get<GeneratedModels>(s.model);
    std::vector<ProcessModel> out;
    Rng rng(Rng::derive(gen.seed, 0xC0DE));
    out.reserve(s.horizon);
    for (int k = 0; k < s.horizon; ++k)
        out.push_back(build_step(gen.name, s.n, gen.m, gen.l, rng));
    return out;
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        Scenario s;
        s.n = require(j, "n").get<int>();
        s.horizon = require(j, "horizon").get<int>();
        const json& jm = require(j, "model");
        const std::string type = require(jm, "type").get<std::string>();
        if (type == "explicit") {
            ExplicitModels ex;
            for (const json& js : require(jm, "steps")) {
                Mat a = decode_matrix(require(js, "A"), "A");
                Mat b = js.contains("B") ? decode_matrix(js["B"], "B") : Mat::Zero(s.n, 0);
                Vec tau = js.contains("tau") ? decode_vector(js["tau"], "tau") : Vec::Zero(b.cols());
                Mat r = js.contains("R") ? decode_matrix(js["R"], "R") : Mat::Zero(s.n, 0);
                ProcessModel m{std::move(a), std::move(b), std::move(tau),
                               Zonotope{Vec::Zero(s.n), std::move(r)}, -1};
                m.validate();
                ex.steps.push_back(std::move(m));
            }
            if (ex.steps.empty()) throw ParseError("explicit model list is empty");
            s.model = std::move(ex);
        } else if (type == "generator") {
            GeneratedModels gen;
            gen.name = require(jm, "name").get<std::string>();
            gen.seed = require(jm, "seed").get<std::uint64_t>();
            gen.m = jm.value("m", 1);
            gen.l = jm.value("l", 0);
            s.model = std::move(gen);
        } else {
            throw ParseError("model.type must be 'explicit' or 'generator'");
        }
        const json& init = require(j, "initial");
        s.x0_center = decode_vector(require(init, "center"), "initial.center");
        s.p0 = SymMatrix(decode_matrix(require(init, "shape"), "initial.shape"));
        s.sigma0 = decode_real(require(init, "sigma"), "initial.sigma");
        s.noise_policy = policy_from(require(j, "noise_policy").get<std::string>());
        const json& sched = require(j, "measurements");
        s.schedule.presence_probability =
            decode_real(require(sched, "presence_probability"), "presence_probability");
        s.schedule.per_step = require(sched, "per_step").get<int>();
        const json& mix = require(sched, "kind_mix");
        s.schedule.strip_weight = mix.value("strip", 0.0);
        s.schedule.upper_weight = mix.value("upper", 0.0);
        s.schedule.lower_weight = mix.value("lower", 0.0);
        s.schedule.equality_weight = mix.value("equality", 0.0);
        s.schedule.width = decode_real(require(sched, "width"), "width");
        s.schedule.direction = sched.value("direction", std::string("random"));
        s.schedule.adversarial_offset = sched.value("adversarial_offset", 0.0);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& s) {
    json j;
    j["n"] = s.n;
    j["horizon"] = s.horizon;
    json jm;
    if (const auto* ex = std::get_if<ExplicitModels>(&s.model)) {
        jm["type"] = "explicit";
        json steps = json::array();
        for (const ProcessModel& m : ex->steps) {
            json js;
            js["A"] = encode_matrix(m.A);
            js["B"] = encode_matrix(m.B);
            js["tau"] = encode_vector(m.tau);
            js["R"] = encode_matrix(m.noise.generators);
            steps.push_back(std::move(js));
        }
        jm["steps"] = std::move(steps);
    } else {
        const auto& gen = std::get<GeneratedModels>(s.model);
        jm["type"] = "generator";
        jm["name"] = gen.name;
        jm["seed"] = gen.seed;
        jm["m"] = gen.m;
        jm["l"] = gen.l;
    }
    j["model"] = std::move(jm);
    j["initial"] = {{"center", encode_vector(s.x0_center)},
                    {"shape", encode_matrix(s.p0.mat())},
                    {"sigma", encode_real(s.sigma0)}};
    j["noise_policy"] = policy_name(s.noise_policy);
    j["measurements"] = {{"presence_probability", s.schedule.presence_probability},
                         {"per_step", s.schedule.per_step},
                         {"kind_mix",
                          {{"strip", s.schedule.strip_weight},
                           {"upper", s.schedule.upper_weight},
                           {"lower", s.schedule.lower_weight},
                           {"equality", s.schedule.equality_weight}}},
                         {"width", s.schedule.width},
                         {"direction", s.schedule.direction},
                         {"adversarial_offset", s.schedule.adversarial_offset}};
    return j.dump(2);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scenario file '" + path + "'");
    out << serialize_scenario(s) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

Scenario generate_scenario(const std::string& tmpl, int n, int horizon, std::uint64_t seed, int m,
                           int l) {
    if (tmpl != "stable" && tmpl != "rotation" && tmpl != "integrator")
        throw ValidationError("unknown template '" + tmpl + "'");
    Scenario s;
    s.n = n;
    s.horizon = horizon;
    GeneratedModels gen;
    gen.name = tmpl == "stable" ? "random-stable" : tmpl;
    gen.seed = seed;
    gen.m = m;
    gen.l = l;
    s.model = gen;
    Rng rng(Rng::derive(seed, 0x1417));
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform(-1.0, 1.0);
    s.x0_center = c;
    Mat g = random_matrix(n, n, rng);
    s.p0 = SymMatrix(Mat(g * g.transpose() + 0.5 * Mat::Identity(n, n)));
    s.sigma0 = 1.0;
    s.noise_policy = NoisePolicy::Uniform;
    s.schedule.presence_probability = 0.7;
    s.schedule.per_step = 2;
    s.schedule.strip_weight = 0.6;
    s.schedule.upper_weight = 0.15;
    s.schedule.lower_weight = 0.15;
    s.schedule.equality_weight = 0.1;
    s.schedule.width = 0.5;
    s.validate();
    return s;
}

}  // namespace sme::harness
