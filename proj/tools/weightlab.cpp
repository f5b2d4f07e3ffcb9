// weightlab: weight-constant reports, inequality verification suites, and
// sharpness sweeps over JSON experiment manifests.
//
//   weightlab constants <config.json> [--out DIR]
//   weightlab verify    <config.json> [--out DIR] [--jobs N] [--seed S] [--probe-epsilon]
//   weightlab sweep     <config.json> [--out DIR]
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 malformed config or
// invalid input data. Reports are byte-identical across runs of the same
// config and seed.

#include "weightlab/constants.hpp"
#include "weightlab/corpus.hpp"
#include "weightlab/czd.hpp"
#include "weightlab/io.hpp"
#include "weightlab/maximal.hpp"
#include "weightlab/verify.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

namespace wl = weightlab;
using wl::json;

namespace {

struct Options {
    std::string configPath;
    std::string outDir = "reports";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    bool probe = false;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wl::ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw wl::ConfigError("config parse error: " + std::string(e.what()));
    }
    wl::require_schema_version(j);
    return j;
}

std::ofstream open_report(const Options& opt, const std::string& name) {
    std::filesystem::create_directories(opt.outDir);
    std::ofstream out(std::filesystem::path(opt.outDir) / name, std::ios::binary);
    if (!out) throw wl::ConfigError("cannot write report file '" + name + "'");
    return out;
}

wl::QuasiMetricSpace space_from_config(const json& j) {
    if (j.contains("type")) {
        const std::string type = j.at("type").get<std::string>();
        const wl::Index n = wl::require_field(j, "n", "space").get<wl::Index>();
        wl::ArrayXd masses;
        if (j.contains("masses")) {
            const json m = j.at("masses");
            masses = wl::ArrayXd(static_cast<wl::Index>(m.size()));
            for (wl::Index i = 0; i < masses.size(); ++i) masses[i] = m.at(i).get<double>();
        }
        if (type == "line") return wl::line_space(n, std::move(masses));
        if (type == "snowflake")
            return wl::snowflake_space(n, wl::require_field(j, "exponent", "space").get<double>(),
                                       std::move(masses));
        throw wl::ConfigError("space: unknown generator type '" + type + "'");
    }
    return wl::space_from_json(j);
}

std::string space_label(const json& j) {
    if (j.contains("type")) {
        std::ostringstream out;
        out << j.at("type").get<std::string>() << "(n=" << j.value("n", wl::Index{0});
        if (j.contains("exponent")) out << ",s=" << j.at("exponent").get<double>();
        out << ")";
        return out.str();
    }
    return "space(n=" + std::to_string(j.value("points", wl::Index{0})) + ")";
}

std::string grid_label(const json& j) {
    const json inner = j.contains("grid") ? j.at("grid") : j;
    return "grid(d=" + std::to_string(inner.value("dim", 0)) +
           ",K=" + std::to_string(inner.value("depth", 0)) + ")";
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

int run_constants(const Options& opt) {
    const json cfg = load_config(opt.configPath);
    const json weights = wl::require_field(cfg, "weights", "config");
    const json ps = wl::require_field(cfg, "p", "config");
    if (!weights.is_array() || weights.empty())
        throw wl::ConfigError("config: 'weights' must be a nonempty array");
    if (!ps.is_array() || ps.empty())
        throw wl::ConfigError("config: 'p' must be a nonempty array");

    std::vector<wl::ConstantsReport> rows;
    if (cfg.contains("grid")) {
        const wl::DyadicGrid grid = wl::grid_from_json(cfg);
        const std::string family = cfg.value("family", std::string("dyadic"));
        const wl::CubeFamily fam = family == "all-cubes" ? wl::CubeFamily::AllCubes
                                                         : wl::CubeFamily::Dyadic;
        for (const json& wj : weights) {
            const wl::ArrayXd w = wl::weight_from_json(wj, grid, opt.seed);
            for (const json& pj : ps) {
                wl::ConstantsReport rep = wl::constants_report(w, pj.get<double>(), grid, fam);
                rep.instance = grid_label(cfg);
                rep.weight = wl::weight_label(wj, opt.seed);
                rows.push_back(std::move(rep));
            }
        }
    } else if (cfg.contains("space")) {
        const wl::QuasiMetricSpace space = space_from_config(cfg.at("space"));
        for (const json& wj : weights) {
            const wl::ArrayXd w = wl::weight_from_json(wj, space.size(), opt.seed);
            for (const json& pj : ps) {
                wl::ConstantsReport rep = wl::constants_report(w, pj.get<double>(), space);
                rep.instance = space_label(cfg.at("space"));
                rep.weight = wl::weight_label(wj, opt.seed);
                rows.push_back(std::move(rep));
            }
        }
    } else {
        throw wl::ConfigError("config: need exactly one of 'space' or 'grid'");
    }

    auto csv = open_report(opt, "constants.csv");
    csv << wl::constants_csv_header() << "\n";
    for (const auto& r : rows) csv << wl::constants_csv_row(r) << "\n";

    json all = json::array();
    for (const auto& r : rows) all.push_back(wl::to_json(r));
    auto js = open_report(opt, "constants.json");
    js << all.dump(2) << "\n";
    std::cout << "wrote " << rows.size() << " constants rows to " << opt.outDir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

const std::vector<std::string> kKnownChecks = {
    "rhi-maximal-dyadic", "sharp-rhi-cubes",    "rhi-maximal-local",
    "weak-rhi",           "open-property",      "weak-type",
    "buckley",            "cz-postconditions",  "localization"};

struct VerifyPlan {
    std::vector<std::string> checks;
    std::vector<double> ps{2.0};
    double delta = 1.0;
    double levelFactor = 1.0;
    json grids = json::array();
    json spaces = json::array();
};

wl::Ball default_base(const wl::QuasiMetricSpace& s) {
    // canonical ball at the middle point covering about half the space
    const wl::Index c = s.size() / 2;
    int g = 0;
    while (g + 1 < s.groupCount(c) && s.groupEnd(c, g) < (s.size() + 1) / 2) ++g;
    return wl::Ball{c, s.canonicalRadius(c, g)};
}

std::vector<wl::CheckResult> verify_grid_instance(const json& gj, const VerifyPlan& plan,
                                                  const Options& opt) {
    std::vector<wl::CheckResult> out;
    const wl::DyadicGrid grid = wl::grid_from_json(gj);
    const json weights = wl::require_field(gj, "weights", "grids entry");
    for (const json& wj : weights) {
        const wl::ArrayXd w = wl::weight_from_json(wj, grid, opt.seed);
        const std::string id = grid_label(gj) + "/w=" + wl::weight_label(wj, opt.seed);
        const double ainf = wl::fujii_wilson_dyadic(w, grid, grid.root());
        for (const std::string& check : plan.checks) {
            if (check == "rhi-maximal-dyadic") {
                const double eps = wl::admissible_eps_maximal(ainf, grid.dim());
                out.push_back(wl::check_rhi_maximal_dyadic(w, grid.root(), grid, eps, id, ainf));
                if (opt.probe) {
                    const auto probe = wl::probe_rhi_maximal_dyadic(w, grid.root(), grid, ainf);
                    out.push_back(wl::make_check("probe-epsilon", id, eps, probe.epsilon,
                                                 {{"eps_theory", eps},
                                                  {"eps_observed", probe.epsilon},
                                                  {"capped", probe.capped ? 1.0 : 0.0}},
                                                 "probe"));
                }
            } else if (check == "sharp-rhi-cubes") {
                const double eps = wl::admissible_eps_sharp(ainf, grid.dim());
                out.push_back(wl::check_sharp_rhi_cubes(w, grid.root(), grid, eps, id, ainf));
            }
        }
    }
    return out;
}

std::vector<wl::CheckResult> verify_space_instance(const json& sj, const VerifyPlan& plan,
                                                   const Options& opt) {
    std::vector<wl::CheckResult> out;
    const wl::QuasiMetricSpace space =
        space_from_config(wl::require_field(sj, "space", "spaces entry"));
    const json weights = wl::require_field(sj, "weights", "spaces entry");
    const double delta = sj.value("delta", plan.delta);

    wl::Ball base = default_base(space);
    if (sj.contains("base")) {
        base.center = wl::require_field(sj.at("base"), "center", "base").get<wl::Index>();
        base.radius = wl::require_field(sj.at("base"), "radius", "base").get<double>();
    }

    for (const json& wj : weights) {
        const wl::ArrayXd w = wl::weight_from_json(wj, space.size(), opt.seed);
        const std::string id =
            space_label(sj.at("space")) + "/w=" + wl::weight_label(wj, opt.seed);

        std::optional<double> ainf;  // ball constant, computed on demand
        auto ballAinf = [&]() {
            if (!ainf) ainf = wl::fujii_wilson_constant(w, space);
            return *ainf;
        };

        for (const std::string& check : plan.checks) {
            if (check == "rhi-maximal-local") {
                auto sweep = wl::check_rhi_maximal_local_all(w, space, delta, id, ballAinf());
                sweep.worst.params["balls_total"] = static_cast<double>(sweep.total);
                sweep.worst.params["balls_passed"] = static_cast<double>(sweep.passed);
                sweep.worst.pass = sweep.worst.pass && sweep.passed == sweep.total;
                out.push_back(std::move(sweep.worst));
            } else if (check == "weak-rhi") {
                auto sweep = wl::check_weak_rhi_all(w, space, id, ballAinf());
                sweep.worst.params["balls_total"] = static_cast<double>(sweep.total);
                sweep.worst.params["balls_passed"] = static_cast<double>(sweep.passed);
                sweep.worst.pass = sweep.worst.pass && sweep.passed == sweep.total;
                out.push_back(std::move(sweep.worst));
            } else if (check == "open-property") {
                for (double p : plan.ps) out.push_back(wl::open_property(w, p, space, id).check);
            } else if (check == "weak-type") {
                for (double p : plan.ps)
                    out.push_back(wl::weak_type_bound(w, p, space, wl::TestFamilySpec{}, id));
            } else if (check == "buckley") {
                for (double p : plan.ps)
                    out.push_back(wl::buckley_mixed_bound(w, p, space, wl::TestFamilySpec{}, id));
            } else if (check == "cz-postconditions" || check == "localization") {
                const double scale = sj.value("scale", 2.0 * space.kappa());
                const auto basis = wl::make_local_basis(space, base, delta);
                const double hatAvg = wl::ball_average(w, basis.hat, space);
                const double gamma = wl::make_cz_config(space, delta, scale, 1.0).gamma;
                const double lambda = plan.levelFactor * gamma * hatAvg;
                const auto cfg = wl::make_cz_config(space, delta, scale, lambda);
                if (check == "cz-postconditions") {
                    const auto dec = wl::cz_decompose(w, basis, cfg, space);
                    for (auto& r : wl::verify_cz(dec, w, basis, space, id))
                        out.push_back(std::move(r));
                } else {
                    for (auto& r : wl::check_localization(w, basis, cfg, space, id))
                        out.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

int run_verify(const Options& opt) {
    const json cfg = load_config(opt.configPath);
    VerifyPlan plan;
    const json checks = wl::require_field(cfg, "checks", "config");
    for (const json& c : checks) {
        const std::string name = c.get<std::string>();
        bool known = false;
        for (const auto& k : kKnownChecks) known = known || k == name;
        if (!known) throw wl::ConfigError("config: unknown check name '" + name + "'");
        plan.checks.push_back(name);
    }
    if (cfg.contains("p")) {
        plan.ps.clear();
        for (const json& p : cfg.at("p")) plan.ps.push_back(p.get<double>());
    }
    plan.delta = cfg.value("delta", 1.0);
    plan.levelFactor = cfg.value("level_factor", 1.0);
    if (cfg.contains("grids")) plan.grids = cfg.at("grids");
    if (cfg.contains("spaces")) plan.spaces = cfg.at("spaces");

    // one task per corpus entry, results stitched back in manifest order
    struct Task {
        bool isGrid;
        json spec;
    };
    std::vector<Task> tasks;
    for (const json& gj : plan.grids) tasks.push_back({true, gj});
    for (const json& sj : plan.spaces) tasks.push_back({false, sj});
    std::vector<std::vector<wl::CheckResult>> results(tasks.size());

    const int jobs = std::max(1, opt.jobs);
    std::atomic<size_t> nextTask{0};
    std::vector<std::string> errors(tasks.size());
    auto worker = [&]() {
        for (;;) {
            const size_t i = nextTask.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = tasks[i].isGrid ? verify_grid_instance(tasks[i].spec, plan, opt)
                                             : verify_space_instance(tasks[i].spec, plan, opt);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw wl::ConfigError(err);

    auto jsonl = open_report(opt, "results.jsonl");
    struct Agg {
        long total = 0;
        long passed = 0;
        double minSlack = std::numeric_limits<double>::infinity();
    };
    std::map<std::string, Agg> byName;
    bool anyFailure = false;
    for (const auto& group : results)
        for (const auto& r : group) {
            jsonl << wl::to_json(r).dump() << "\n";
            if (r.note == "probe") continue;  // probes never affect the outcome
            Agg& a = byName[r.name];
            ++a.total;
            if (r.pass)
                ++a.passed;
            else
                anyFailure = true;
            a.minSlack = std::min(a.minSlack, r.slack);
        }

    json summary = json::object();
    std::cout << "check                 pass/total   min slack\n";
    for (const auto& [name, a] : byName) {
        std::ostringstream line;
        line.setf(std::ios::left);
        line.width(22);
        line << name;
        line << a.passed << "/" << a.total << "   " << wl::format_g17(a.minSlack);
        std::cout << line.str() << "\n";
        summary[name] = {{"total", a.total}, {"passed", a.passed}, {"min_slack", a.minSlack}};
    }
    auto summaryFile = open_report(opt, "summary.json");
    summaryFile << summary.dump(2) << "\n";
    return anyFailure ? 1 : 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int run_sweep(const Options& opt) {
    const json cfg = load_config(opt.configPath);
    const wl::DyadicGrid grid = wl::grid_from_json(wl::require_field(cfg, "grid", "config"));
    const json family = wl::require_field(cfg, "family", "config");
    const std::string type = wl::require_field(family, "type", "family").get<std::string>();

    struct Row {
        double parameter;
        wl::ArrayXd w;
    };
    std::vector<Row> rows;
    if (type == "power") {
        for (const json& a : wl::require_field(family, "alphas", "family"))
            rows.push_back({a.get<double>(), wl::power_weight(grid, a.get<double>())});
    } else if (type == "cascade") {
        const std::uint64_t seed =
            opt.seed ? *opt.seed
                     : wl::require_field(family, "seed", "family").get<std::uint64_t>();
        for (const json& b : wl::require_field(family, "bounds", "family"))
            rows.push_back({b.get<double>(), wl::cascade_weight(grid, b.get<double>(), seed)});
    } else {
        throw wl::ConfigError("family: unknown type '" + type + "'");
    }

    auto csv = open_report(opt, "sweep.csv");
    csv << "parameter,ainf_fw,eps_theory,eps_observed,observed_capped,observed_over_theory\n";
    for (const Row& row : rows) {
        const double ainf = wl::fujii_wilson_dyadic(row.w, grid, grid.root());
        const double theory = wl::admissible_eps_maximal(ainf, grid.dim());
        const auto probe = wl::probe_rhi_maximal_dyadic(row.w, grid.root(), grid, ainf);
        csv << wl::format_g17(row.parameter) << ',' << wl::format_g17(ainf) << ','
            << wl::format_g17(theory) << ',' << wl::format_g17(probe.epsilon) << ','
            << (probe.capped ? 1 : 0) << ',' << wl::format_g17(probe.epsilon / theory) << "\n";
    }
    std::cout << "wrote " << rows.size() << " sweep rows to " << opt.outDir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weight-constant laboratory: constants, verification suites, sharpness sweeps"};
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seedValue = 0;
    bool seedSet = false;

    auto addCommon = [&](CLI::App* sub) {
        sub->add_option("config", opt.configPath, "JSON experiment manifest")->required();
        sub->add_option("--out", opt.outDir, "report directory (default: reports)");
        sub->add_option("--jobs", opt.jobs, "parallel instances (default: 1)");
        sub->add_option("--seed", seedValue, "override every manifest seed")
            ->each([&](const std::string&) { seedSet = true; });
    };

    CLI::App* constants = app.add_subcommand("constants", "weight constants per (weight, p)");
    addCommon(constants);
    CLI::App* verify = app.add_subcommand("verify", "run inequality checks, exit 1 on failure");
    addCommon(verify);
    verify->add_flag("--probe-epsilon", opt.probe,
                     "also record the sharpness probe (never affects the exit code)");
    CLI::App* sweep = app.add_subcommand("sweep", "one-parameter sharpness sweep");
    addCommon(sweep);

    CLI11_PARSE(app, argc, argv);
    if (seedSet) opt.seed = seedValue;

    try {
        if (constants->parsed()) return run_constants(opt);
        if (verify->parsed()) return run_verify(opt);
        if (sweep->parsed()) return run_sweep(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
