#include "sme/harness/emit.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sme::harness {

using nlohmann::json;

const char* const kToolVersion = "0.1.0";

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void emit(const std::vector<StepRecord>& records, EmitFormat format, const std::string& path) {
    if (records.empty()) throw IoError("no records to emit");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    if (format == EmitFormat::Csv) {
        const int n = static_cast<int>(records.front().xhat.size());
        out << "k";
        for (int i = 0; i < n; ++i) out << ",xhat" << i;
        out << ",sigma,rank,pvol,ssal,err,contained,cases,ms\n";
        for (const StepRecord& r : records) {
            out << r.k;
            for (int i = 0; i < n; ++i) out << ',' << fmt(r.xhat[i]);
            out << ',' << fmt(r.sigma) << ',' << r.rank << ',' << fmt(r.pvol) << ','
                << fmt(r.ssal_value) << ',' << fmt(r.err) << ',' << (r.contained ? '1' : '0')
                << ',' << r.cases << ',' << fmt(r.ms) << '\n';
        }
    } else {
        json arr = json::array();
        for (const StepRecord& r : records) {
            json rec;
            rec["k"] = r.k;
            json xs = json::array();
            for (int i = 0; i < r.xhat.size(); ++i) xs.push_back(r.xhat[i]);
            rec["xhat"] = std::move(xs);
            rec["sigma"] = r.sigma;
            rec["rank"] = r.rank;
            rec["pvol"] = r.pvol;
            rec["ssal"] = r.ssal_value;
            rec["err"] = r.err;
            rec["contained"] = r.contained;
            rec["cases"] = r.cases;
            rec["ms"] = r.ms;
            arr.push_back(std::move(rec));
        }
        out << arr.dump(2) << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<StepRecord> read_records_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json arr;
    try {
        in >> arr;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid records JSON: ") + e.what());
    }
    std::vector<StepRecord> out;
    for (const json& rec : arr) {
        StepRecord r;
        r.k = rec.at("k").get<int>();
        const auto& xs = rec.at("xhat");
        r.xhat = Vec(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) r.xhat[static_cast<int>(i)] = xs[i].get<double>();
        r.sigma = rec.at("sigma").get<double>();
        r.rank = rec.at("rank").get<int>();
        r.pvol = rec.at("pvol").get<double>();
        r.ssal_value = rec.at("ssal").get<double>();
        r.err = rec.at("err").get<double>();
        r.contained = rec.at("contained").get<bool>();
        r.cases = rec.at("cases").get<std::string>();
        r.ms = rec.at("ms").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

void write_manifest(const Manifest& m, const std::string& path) {
    json j;
    j["seed"] = m.seed;
    j["scenario"] = m.scenario;
    j["config"] = {{"pred", m.pred},
                   {"corr", m.corr},
                   {"policy", m.policy},
                   {"diagnostics", m.diagnostics},
                   {"samples", m.samples}};
    j["tool_version"] = m.tool_version;
    j["total_ms"] = m.total_ms;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace sme::harness
