#include "beamfe/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "beamfe/version.hpp"

namespace beamfe::report {

namespace {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double number_from(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) throw ParseError("expected a number in report JSON");
    return v.get<double>();
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string config_string(const bench::CaseRow& row) {
    std::ostringstream os;
    os << "benchmark=" << row.benchmark << ";k=" << row.k << ";nelem=" << row.nelem
       << ";rho=" << format_number(row.rho) << ";integration=" << scheme_name(row.scheme)
       << ";version=" << kVersion;
    return os.str();
}

std::uint64_t config_hash(const bench::CaseRow& row) { return fnv1a(config_string(row)); }

const char* scheme_name(IntegrationScheme scheme) {
    return scheme == IntegrationScheme::kReduced ? "reduced" : "full";
}

IntegrationScheme scheme_from_name(const std::string& name) {
    if (name == "reduced") return IntegrationScheme::kReduced;
    if (name == "full") return IntegrationScheme::kFull;
    throw ParseError("unknown integration scheme: " + name);
}

std::string to_csv(const std::vector<bench::CaseRow>& rows) {
    std::ostringstream os;
    os << "benchmark,k,nelem,rho,integration,e_l2,rate,u1,u2,u3,newton_total_iters,wall_ms\n";
    for (const auto& row : rows) {
        os << row.benchmark << ',' << row.k << ',' << row.nelem << ',' << format_number(row.rho)
           << ',' << scheme_name(row.scheme) << ',' << format_number(row.e_l2) << ','
           << format_number(row.rate) << ',' << format_number(row.u.x()) << ','
           << format_number(row.u.y()) << ',' << format_number(row.u.z()) << ','
           << row.newton_total_iters << ',' << format_number(row.wall_ms) << '\n';
    }
    return os.str();
}

std::string to_json(const std::vector<bench::CaseRow>& rows) {
    json doc;
    doc["version"] = kVersion;
    doc["rows"] = json::array();
    for (const auto& row : rows) {
        json r;
        r["benchmark"] = row.benchmark;
        r["config_hash"] = config_hash(row);
        r["k"] = row.k;
        r["nelem"] = row.nelem;
        r["rho"] = number_or_null(row.rho);
        r["integration"] = scheme_name(row.scheme);
        r["e_l2"] = number_or_null(row.e_l2);
        r["rate"] = number_or_null(row.rate);
        r["u"] = {row.u.x(), row.u.y(), row.u.z()};
        r["newton_total_iters"] = row.newton_total_iters;
        r["wall_ms"] = row.wall_ms;
        json line = json::array();
        for (const Vec3& p : row.centerline) line.push_back({p.x(), p.y(), p.z()});
        r["centerline"] = std::move(line);
        if (!row.series.empty()) {
            json series;
            for (const auto& [key, values] : row.series) series[key] = values;
            r["series"] = std::move(series);
        }
        if (row.oracle >= 0) r["oracle"] = row.oracle == 1 ? "pass" : "fail";
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

std::vector<bench::CaseRow> rows_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid report JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
        throw ParseError("report JSON must be an object with a rows array");

    std::vector<bench::CaseRow> rows;
    try {
        for (const json& r : doc["rows"]) {
            bench::CaseRow row;
            row.benchmark = r.at("benchmark").get<std::string>();
            row.k = r.at("k").get<int>();
            row.nelem = r.at("nelem").get<int>();
            row.rho = number_from(r.at("rho"));
            row.scheme = scheme_from_name(r.at("integration").get<std::string>());
            row.e_l2 = number_from(r.at("e_l2"));
            row.rate = number_from(r.at("rate"));
            const json& u = r.at("u");
            row.u = Vec3(u.at(0).get<double>(), u.at(1).get<double>(), u.at(2).get<double>());
            row.newton_total_iters = r.at("newton_total_iters").get<int>();
            row.wall_ms = r.at("wall_ms").get<double>();
            for (const json& p : r.at("centerline"))
                row.centerline.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                            p.at(2).get<double>());
            if (r.contains("series"))
                for (const auto& [key, values] : r["series"].items())
                    row.series[key] = values.get<std::vector<double>>();
            if (r.contains("oracle"))
                row.oracle = r.at("oracle").get<std::string>() == "pass" ? 1 : 0;
            if (r.at("config_hash").get<std::uint64_t>() != config_hash(row))
                throw ParseError("report row does not match its configuration hash");
            rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid report row: ") + e.what());
    }
    return rows;
}

}  // namespace beamfe::report
