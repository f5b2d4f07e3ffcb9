#include "weightlab/io.hpp"

#include "weightlab/corpus.hpp"

#include <cstdio>
#include <sstream>

namespace weightlab {

json require_field(const json& j, const char* field, const char* where) {
    if (!j.is_object() || !j.contains(field))
        throw ConfigError(std::string(where) + ": missing field '" + field + "'");
    return j.at(field);
}

void require_schema_version(const json& j) {
    const json v = require_field(j, "schema_version", "config");
    if (!v.is_number_integer() || v.get<int>() != 1)
        throw ConfigError("config: unsupported schema_version (expected 1)");
}

QuasiMetricSpace space_from_json(const json& j) {
    const Index n = require_field(j, "points", "space").get<Index>();
    const json jd = require_field(j, "dist", "space");
    const json jm = require_field(j, "measure", "space");
    if (!jd.is_array() || static_cast<Index>(jd.size()) != n)
        throw ConfigError("space: 'dist' must be an n x n array");
    MatrixXd dist(n, n);
    for (Index i = 0; i < n; ++i) {
        const json& row = jd.at(i);
        if (!row.is_array() || static_cast<Index>(row.size()) != n)
            throw ConfigError("space: 'dist' row " + std::to_string(i) + " must have n entries");
        for (Index k = 0; k < n; ++k) dist(i, k) = row.at(k).get<double>();
    }
    if (!jm.is_array() || static_cast<Index>(jm.size()) != n)
        throw ConfigError("space: 'measure' must have n entries");
    ArrayXd measure(n);
    for (Index i = 0; i < n; ++i) measure[i] = jm.at(i).get<double>();
    std::optional<double> kappa;
    if (j.contains("kappa")) kappa = j.at("kappa").get<double>();
    return QuasiMetricSpace::fromDistanceMatrix(std::move(dist), std::move(measure), kappa);
}

DyadicGrid grid_from_json(const json& j) {
    const json inner = j.contains("grid") ? j.at("grid") : j;
    const int dim = require_field(inner, "dim", "grid").get<int>();
    const int depth = require_field(inner, "depth", "grid").get<int>();
    const json cm = require_field(inner, "cell_measure", "grid");
    if (cm.is_string() && cm.get<std::string>() == "lebesgue")
        return DyadicGrid::lebesgue(dim, depth);
    if (!cm.is_array())
        throw ConfigError("grid: 'cell_measure' must be \"lebesgue\" or an array");
    ArrayXd measure(static_cast<Index>(cm.size()));
    for (Index i = 0; i < measure.size(); ++i) measure[i] = cm.at(i).get<double>();
    return DyadicGrid(dim, depth, std::move(measure));
}

namespace {

ArrayXd values_from_descriptor(const json& j, Index n, const DyadicGrid* g,
                               std::optional<std::uint64_t> seedOverride) {
    const std::string type = require_field(j, "type", "weight").get<std::string>();
    if (type == "ones") return ArrayXd::Ones(n);
    if (type == "power") {
        if (!g) throw ConfigError("weight: power weights require a grid");
        return power_weight(*g, require_field(j, "alpha", "weight").get<double>());
    }
    if (type == "cascade") {
        const double bound = require_field(j, "bound", "weight").get<double>();
        std::uint64_t seed = seedOverride
                                 ? *seedOverride
                                 : require_field(j, "seed", "weight").get<std::uint64_t>();
        if (g) return cascade_weight(*g, bound, seed);
        // points of a line: require a power-of-two count
        int depth = 0;
        while ((Index{1} << depth) < n) ++depth;
        if ((Index{1} << depth) != n)
            throw ConfigError("weight: cascade on a space needs a power-of-two point count");
        return cascade_values(depth, bound, seed);
    }
    if (type == "spike") {
        const Index pos = require_field(j, "position", "weight").get<Index>();
        const double height = require_field(j, "height", "weight").get<double>();
        const double base = j.value("base", 1.0);
        return spike_weight(n, pos, height, base);
    }
    if (type == "values") {
        const json v = require_field(j, "values", "weight");
        if (!v.is_array() || static_cast<Index>(v.size()) != n)
            throw ConfigError("weight: 'values' must list one entry per point/cell");
        ArrayXd w(n);
        for (Index i = 0; i < n; ++i) w[i] = v.at(i).get<double>();
        return w;
    }
    throw ConfigError("weight: unknown type '" + type + "'");
}

}  // namespace

ArrayXd weight_from_json(const json& j, const DyadicGrid& g,
                         std::optional<std::uint64_t> seedOverride) {
    ArrayXd w = values_from_descriptor(j, g.cellCount(), &g, seedOverride);
    validate_weight(w, g.cellCount());
    return w;
}

ArrayXd weight_from_json(const json& j, Index n, std::optional<std::uint64_t> seedOverride) {
    ArrayXd w = values_from_descriptor(j, n, nullptr, seedOverride);
    validate_weight(w, n);
    return w;
}

std::string weight_label(const json& j, std::optional<std::uint64_t> seedOverride) {
    const std::string type = j.value("type", "?");
    std::ostringstream out;
    out << type;
    if (type == "power") out << "(alpha=" << j.value("alpha", 0.0) << ")";
    if (type == "cascade") {
        const std::uint64_t seed =
            seedOverride ? *seedOverride : j.value("seed", std::uint64_t{0});
        out << "(bound=" << j.value("bound", 1.0) << ",seed=" << seed << ")";
    }
    if (type == "spike")
        out << "(pos=" << j.value("position", Index{0}) << ",height=" << j.value("height", 1.0)
            << ")";
    return out.str();
}

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(const CheckResult& r) {
    json p = json::object();
    for (const auto& [k, v] : r.params) p[k] = v;
    json out{{"name", r.name}, {"instance", r.instance}, {"lhs", r.lhs},
             {"rhs", r.rhs},   {"slack", r.slack},       {"pass", r.pass},
             {"params", p}};
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

json to_json(const CZDecomposition& dec) {
    json balls = json::array();
    for (const CZBall& b : dec.balls)
        balls.push_back(json{{"center", b.ball.center},
                             {"radius", b.ball.radius},
                             {"average", b.average}});
    return json{{"lambda", dec.config.lambda},
                {"delta", dec.config.delta},
                {"N", dec.config.scale},
                {"omega_size", dec.omega.size()},
                {"balls", balls}};
}

json to_json(const ConstantsReport& rep) {
    return json{{"instance", rep.instance},
                {"weight", rep.weight},
                {"family", rep.family},
                {"p", rep.p},
                {"ap", rep.ap},
                {"ainf_fw", rep.ainfFw},
                {"ainf_exp", rep.ainfExp},
                {"sigma_ainf", rep.sigmaAinf},
                {"tau", rep.tau},
                {"r_w", rep.rW},
                {"eps_open", rep.epsOpen}};
}

std::string constants_csv_header() {
    return "instance,weight,family,p,ap,ainf_fw,ainf_exp,sigma_ainf,tau,r_w,eps_open";
}

std::string constants_csv_row(const ConstantsReport& rep) {
    std::ostringstream out;
    out << rep.instance << ',' << rep.weight << ',' << rep.family << ',' << format_g17(rep.p)
        << ',' << format_g17(rep.ap) << ',' << format_g17(rep.ainfFw) << ','
        << format_g17(rep.ainfExp) << ',' << format_g17(rep.sigmaAinf) << ','
        << format_g17(rep.tau) << ',' << format_g17(rep.rW) << ',' << format_g17(rep.epsOpen);
    return out.str();
}

}  // namespace weightlab
