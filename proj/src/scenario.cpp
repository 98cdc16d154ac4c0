#include "rsl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "rsl/flow.hpp"
#include "rsl/geometry.hpp"
#include "rsl/varcheck.hpp"

namespace rsl {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    if (std::isnan(v)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse integer '" + value + "'");
    }
}

// Atomic text write: temp file in the same directory, then rename.
void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
    }
    fs::rename(tmp, path);
}

const char* status_name(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "PASS";
        case VerdictStatus::Fail: return "FAIL";
        default: return "SKIPPED";
    }
}

std::string verdict_line(const CheckVerdict& v) {
    return v.name + ": " + status_name(v.status) + " (" + v.reason + ") err=" + fmt6(v.err) +
           " tol=" + fmt6(v.tol);
}

struct LaneKeys {
    std::set<std::string> neutral = {
        "lane",          "flow.dt",        "flow.t_end",      "flow.safety",
        "flow.max_steps", "flow.stride",   "spectral.count",  "spectral.tol",
        "checks",        "checks.rate_tol", "checks.model_tol", "checks.mono_tol",
        "checks.prop1_tol", "checks.identity_tol", "refine.levels", "output.dir",
        "output.prefix"};
    std::set<std::string> grid_only = {"grid.nx",       "grid.ny",    "grid.topology",
                                       "grid.lx",       "grid.ly",    "grid.phi",
                                       "grid.phi.value", "grid.phi.amplitude", "grid.phi.cx",
                                       "grid.phi.cy",   "grid.phi.width", "domain.fraction"};
    std::set<std::string> model_only = {"model.family", "model.dim",           "model.radius",
                                        "model.scale",  "model.spectrum",      "model.lx",
                                        "model.ly",     "model.sphere_radius", "model.circle_radius"};
};

}  // namespace

const char* check_name(CheckKind kind) {
    switch (kind) {
        case CheckKind::Rate2d: return "rate2d";
        case CheckKind::RateGeneral: return "rate_general";
        case CheckKind::Prop1: return "prop1";
        case CheckKind::MainTheorem: return "main_theorem";
        case CheckKind::Eq5: return "eq5";
        case CheckKind::Eq6: return "eq6";
        case CheckKind::Eq7: return "eq7";
        case CheckKind::Bianchi: return "bianchi";
        case CheckKind::InverseMetric: return "inverse_metric";
    }
    return "?";
}

std::optional<CheckKind> parse_check_name(const std::string& name) {
    static const std::map<std::string, CheckKind> table = {
        {"rate2d", CheckKind::Rate2d},         {"rate_general", CheckKind::RateGeneral},
        {"prop1", CheckKind::Prop1},           {"main_theorem", CheckKind::MainTheorem},
        {"eq5", CheckKind::Eq5},               {"eq6", CheckKind::Eq6},
        {"eq7", CheckKind::Eq7},               {"bianchi", CheckKind::Bianchi},
        {"inverse_metric", CheckKind::InverseMetric},
    };
    const auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
}

ScenarioConfig ScenarioConfig::parse(std::istream& in, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw ConfigError(origin + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    const LaneKeys keys;
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!keys.neutral.count(key) && !keys.grid_only.count(key) && !keys.model_only.count(key))
            throw ConfigError(origin + ": unknown key '" + key + "'");
    }

    ScenarioConfig c;
    const auto get = [&](const char* key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };

    const auto lane = get("lane");
    if (!lane) throw ConfigError(origin + ": missing required key 'lane'");
    if (*lane == "grid") c.lane = Lane::Grid;
    else if (*lane == "model") c.lane = Lane::Model;
    else throw ConfigError(origin + ": lane must be 'grid' or 'model'");

    for (const auto& [key, value] : kv) {
        (void)value;
        if (c.lane == Lane::Grid && keys.model_only.count(key))
            throw ConfigError(origin + ": key '" + key + "' does not apply to lane=grid");
        if (c.lane == Lane::Model && keys.grid_only.count(key))
            throw ConfigError(origin + ": key '" + key + "' does not apply to lane=model");
    }

    if (auto v = get("flow.dt")) c.flow_dt = parse_double("flow.dt", *v);
    if (auto v = get("flow.t_end")) c.flow_t_end = parse_double("flow.t_end", *v);
    if (auto v = get("flow.safety")) c.flow_safety = parse_double("flow.safety", *v);
    if (auto v = get("flow.max_steps")) c.flow_max_steps = parse_long("flow.max_steps", *v);
    if (auto v = get("flow.stride")) c.flow_stride = static_cast<int>(parse_long("flow.stride", *v));
    if (!(c.flow_dt > 0.0)) throw ConfigError(origin + ": flow.dt must be set and positive");
    if (!(c.flow_t_end > 0.0)) throw ConfigError(origin + ": flow.t_end must be set and positive");
    if (!(c.flow_safety > 0.0) || c.flow_safety > 1.0)
        throw ConfigError(origin + ": flow.safety must lie in (0, 1]");

    if (auto v = get("spectral.count")) c.spectral_count = static_cast<int>(parse_long("spectral.count", *v));
    if (auto v = get("spectral.tol")) c.spectral_tol = parse_double("spectral.tol", *v);
    if (c.spectral_count < 1 || c.spectral_count > 20)
        throw ConfigError(origin + ": spectral.count must lie in [1, 20]");
    if (!(c.spectral_tol >= 1e-12 && c.spectral_tol <= 1e-4))
        throw ConfigError(origin + ": spectral.tol must lie in [1e-12, 1e-4]");

    if (auto v = get("checks")) {
        for (const auto& name : split_list(*v)) {
            const auto kind = parse_check_name(name);
            if (!kind) throw ConfigError(origin + ": unknown check '" + name + "'");
            c.checks.push_back(*kind);
        }
    }
    if (auto v = get("checks.rate_tol")) c.rate_tol = parse_double("checks.rate_tol", *v);
    if (auto v = get("checks.model_tol")) c.model_tol = parse_double("checks.model_tol", *v);
    if (auto v = get("checks.mono_tol")) c.mono_tol = parse_double("checks.mono_tol", *v);
    if (auto v = get("checks.prop1_tol")) c.prop1_tol = parse_double("checks.prop1_tol", *v);
    if (auto v = get("checks.identity_tol")) c.identity_tol = parse_double("checks.identity_tol", *v);

    if (auto v = get("refine.levels")) c.refine_levels = static_cast<int>(parse_long("refine.levels", *v));
    if (auto v = get("output.dir")) c.output_dir = *v;
    if (auto v = get("output.prefix")) c.output_prefix = *v;

    if (c.lane == Lane::Model) {
        const auto family = get("model.family");
        if (!family) throw ConfigError(origin + ": model lane requires model.family");
        c.model_family = *family;
        if (auto v = get("model.dim")) c.model_dim = static_cast<int>(parse_long("model.dim", *v));
        if (auto v = get("model.radius")) c.model_radius = parse_double("model.radius", *v);
        if (auto v = get("model.scale")) c.model_scale = parse_double("model.scale", *v);
        if (auto v = get("model.spectrum"))
            for (const auto& s : split_list(*v)) c.model_spectrum.push_back(parse_double("model.spectrum", s));
        if (auto v = get("model.lx")) c.model_lx = parse_double("model.lx", *v);
        if (auto v = get("model.ly")) c.model_ly = parse_double("model.ly", *v);
        if (auto v = get("model.sphere_radius")) c.model_sphere_radius = parse_double("model.sphere_radius", *v);
        if (auto v = get("model.circle_radius")) c.model_circle_radius = parse_double("model.circle_radius", *v);
        ModelGeometry model = c.make_model();  // validates the family spec
        if (!(c.flow_t_end < model.maximal_time()))
            throw ConfigError(origin + ": flow.t_end reaches the maximal existence time " +
                              fmt6(model.maximal_time()));
        if (c.model_family == "HyperbolicScaled" && c.model_spectrum.empty())
            throw ConfigError(origin + ": HyperbolicScaled requires model.spectrum");
        if (c.spectral_count > static_cast<int>(model.family() == ModelFamily::HyperbolicScaled
                                                    ? c.model_spectrum.size()
                                                    : 64))
            throw ConfigError(origin + ": spectral.count exceeds the supplied spectrum");
    } else {
        if (auto v = get("grid.nx")) c.grid_nx = static_cast<int>(parse_long("grid.nx", *v));
        if (auto v = get("grid.ny")) c.grid_ny = static_cast<int>(parse_long("grid.ny", *v));
        if (auto v = get("grid.topology")) c.grid_topology = *v;
        if (c.grid_topology != "torus" && c.grid_topology != "rectangle")
            throw ConfigError(origin + ": grid.topology must be 'torus' or 'rectangle'");
        if (auto v = get("grid.lx")) c.grid_lx = parse_double("grid.lx", *v);
        if (auto v = get("grid.ly")) c.grid_ly = parse_double("grid.ly", *v);
        if (auto v = get("domain.fraction")) {
            if (c.grid_topology != "rectangle")
                throw ConfigError(origin + ": domain.fraction applies to rectangles only");
            c.domain_fraction = parse_double("domain.fraction", *v);
        }
        if (auto v = get("grid.phi")) c.phi.kind = *v;
        static const std::set<std::string> phi_kinds = {"flat", "const", "sinx", "siny", "bump"};
        if (!phi_kinds.count(c.phi.kind))
            throw ConfigError(origin + ": unknown grid.phi kind '" + c.phi.kind + "'");
        if (auto v = get("grid.phi.value")) c.phi.value = parse_double("grid.phi.value", *v);
        if (auto v = get("grid.phi.amplitude")) c.phi.amplitude = parse_double("grid.phi.amplitude", *v);
        if (auto v = get("grid.phi.cx")) c.phi.cx = parse_double("grid.phi.cx", *v);
        if (auto v = get("grid.phi.cy")) c.phi.cy = parse_double("grid.phi.cy", *v);
        if (auto v = get("grid.phi.width")) c.phi.width = parse_double("grid.phi.width", *v);
        if (c.phi.kind == "bump" && !(c.phi.width > 0.0))
            throw ConfigError(origin + ": bump phi requires a positive grid.phi.width");
        c.make_grid().validate();  // surfaces size/guard violations as config errors
    }
    return c;
}

ConformalGrid ScenarioConfig::make_grid() const {
    ConformalGrid g = grid_topology == "torus"
                          ? ConformalGrid::torus(grid_nx, grid_ny, grid_lx, grid_ly)
                          : ConformalGrid::rectangle(grid_nx, grid_ny, grid_lx, grid_ly);
    const double tau = 2.0 * std::numbers::pi;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            double p = 0.0;
            if (phi.kind == "const") {
                p = phi.value;
            } else if (phi.kind == "sinx") {
                p = phi.amplitude * std::sin(tau * x / g.lx());
            } else if (phi.kind == "siny") {
                p = phi.amplitude * std::sin(tau * y / g.ly());
            } else if (phi.kind == "bump") {
                if (g.topology == Topology::PeriodicTorus) {
                    // Periodic bump: smooth on the torus, Gaussian near center.
                    const double kx = std::pow(g.lx() / (tau * phi.width), 2);
                    const double ky = std::pow(g.ly() / (tau * phi.width), 2);
                    p = phi.amplitude *
                        std::exp(kx * (std::cos(tau * (x - phi.cx) / g.lx()) - 1.0) +
                                 ky * (std::cos(tau * (y - phi.cy) / g.ly()) - 1.0));
                } else {
                    const double d2 = (x - phi.cx) * (x - phi.cx) + (y - phi.cy) * (y - phi.cy);
                    p = phi.amplitude * std::exp(-d2 / (2.0 * phi.width * phi.width));
                }
            }
            g.phi[g.index(i, j)] = p;
        }
    g.validate();
    return g;
}

DomainMask ScenarioConfig::make_mask(const ConformalGrid& grid) const {
    if (grid.topology == Topology::DirichletRectangle && domain_fraction < 1.0)
        return DomainMask::centered_fraction(grid, domain_fraction);
    return DomainMask::full(grid);
}

ModelGeometry ScenarioConfig::make_model() const {
    if (model_family == "RoundSphere") return ModelGeometry::round_sphere(model_dim, model_radius);
    if (model_family == "HyperbolicScaled")
        return ModelGeometry::hyperbolic_scaled(model_scale, model_spectrum);
    if (model_family == "FlatTorus") return ModelGeometry::flat_torus(model_lx, model_ly);
    if (model_family == "SphereCircleProduct")
        return ModelGeometry::sphere_circle_product(model_sphere_radius, model_circle_radius);
    throw ConfigError("unknown model.family '" + model_family + "'");
}

std::string ScenarioConfig::resolved_output_dir() const {
    if (const char* env = std::getenv("RSL_OUTPUT_DIR"); env && *env) return env;
    return output_dir;
}

namespace {

constexpr const char* kCsvHeader =
    "t,mode,mu,predicted_rate,observed_rate,R_min,R_max,a_required,hypothesis_feasible";

std::string csv_row(double t, const std::string& mode_label, const RateSample& s) {
    std::string row = fmt17(t) + "," + mode_label + "," + fmt17(s.mu) + "," +
                      fmt17(s.predicted_rate) + ",";
    if (std::isfinite(s.observed_rate)) row += fmt17(s.observed_rate);
    row += "," + fmt17(s.r_min) + "," + fmt17(s.r_max) + "," + fmt17(s.a_required) + "," +
           (s.hypothesis_feasible ? "1" : "0");
    return row;
}

CheckVerdict identity_verdict(const IdentityCheck& c, const std::string& name, double tol) {
    CheckVerdict v;
    v.name = name;
    v.tol = tol;
    if (c.exact_zero) {
        v.status = VerdictStatus::Pass;
        v.reason = "degenerate (exact)";
        v.err = c.max_abs_err;
        return v;
    }
    v.err = c.rel_err;
    v.status = c.rel_err <= tol ? VerdictStatus::Pass : VerdictStatus::Fail;
    v.reason = "relative residual";
    return v;
}

CheckVerdict skipped(const std::string& name, const std::string& why) {
    CheckVerdict v;
    v.name = name;
    v.status = VerdictStatus::Skipped;
    v.reason = why;
    return v;
}

struct TrackedBranches {
    // [mode][snapshot]
    std::vector<std::vector<double>> mu;
    std::vector<std::vector<double>> predicted;
    std::vector<std::vector<bool>> clustered;
    std::vector<double> r_min, r_max;  // per snapshot, over D
    std::vector<double> times;
    int ambiguous_events = 0;
};

TrackedBranches solve_along(const Trajectory& traj, const DomainMask& mask, int count, double tol) {
    TrackedBranches tb;
    const std::size_t n = traj.size();
    tb.mu.assign(count, std::vector<double>(n, 0.0));
    tb.predicted.assign(count, std::vector<double>(n, 0.0));
    tb.clustered.assign(count, std::vector<bool>(n, false));
    tb.r_min.resize(n);
    tb.r_max.resize(n);
    tb.times.resize(n);

    const EigenConstraint constraint = traj.at(0).topology == Topology::PeriodicTorus
                                           ? EigenConstraint::MeanZero
                                           : EigenConstraint::None;
    std::vector<EigenPair> prev;
    for (std::size_t s = 0; s < n; ++s) {
        const ConformalGrid& g = traj.at(s);
        tb.times[s] = g.time;
        const OperatorPair ops = assemble(g, mask);
        const std::vector<EigenPair> pairs = smallest_eigenpairs(ops, count, tol, constraint);

        const ScalarField r = scalar_curvature(g);
        double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
        for (int p = 0; p < ops.dim(); ++p) {
            rmin = std::min(rmin, r[ops.interior_nodes[p]]);
            rmax = std::max(rmax, r[ops.interior_nodes[p]]);
        }
        tb.r_min[s] = rmin;
        tb.r_max[s] = rmax;

        std::vector<EigenPair> current(count);
        for (int m = 0; m < count; ++m) {
            EigenPair chosen;
            if (s == 0 || prev.empty()) {
                chosen = pairs[m];
            } else {
                TrackResult tr = track_mode(prev[m], pairs, ops.mass);
                if (tr.ambiguous) ++tb.ambiguous_events;
                chosen = tr.pair;
            }
            const int idx = chosen.mode_index;
            const auto [lo, hi] = cluster_range(pairs, idx);
            if (hi > lo) {
                // Branches inside a near-degenerate cluster are not smooth in
                // t; rate checks compare cluster means instead.
                double mu_mean = 0.0, pred_mean = 0.0;
                for (int q = lo; q <= hi; ++q) {
                    mu_mean += pairs[q].mu;
                    pred_mean += predicted_rate_2d(g, ops, pairs[q]);
                }
                tb.mu[m][s] = mu_mean / (hi - lo + 1);
                tb.predicted[m][s] = pred_mean / (hi - lo + 1);
                tb.clustered[m][s] = true;
            } else {
                tb.mu[m][s] = chosen.mu;
                tb.predicted[m][s] = predicted_rate_2d(g, ops, chosen);
            }
            current[m] = std::move(chosen);
        }
        prev = std::move(current);
    }
    return tb;
}

std::vector<RateSample> samples_for_mode(const TrackedBranches& tb, int m) {
    const std::size_t n = tb.times.size();
    std::vector<RateSample> samples;
    samples.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        double obs = std::numeric_limits<double>::quiet_NaN();
        if (s >= 1 && s + 1 < n) obs = observed_rate(tb.times, tb.mu[m], s);
        RateSample sample = make_rate_sample(tb.times[s], tb.mu[m][s], tb.predicted[m][s], obs,
                                             tb.r_min[s], tb.r_max[s], 0.0);
        sample.clustered = tb.clustered[m][s];
        samples.push_back(sample);
    }
    return samples;
}

RunResult finalize(const ScenarioConfig& config, std::vector<CheckVerdict> verdicts,
                   const std::string& csv, const std::string& error) {
    RunResult rr;
    rr.verdicts = std::move(verdicts);
    rr.error = error;
    const fs::path dir = config.resolved_output_dir();
    std::string report;
    report += "scenario: " + config.output_prefix + "\n";
    report += std::string("lane: ") + (config.lane == Lane::Grid ? "grid" : "model") + "\n";
    for (const auto& v : rr.verdicts) report += verdict_line(v) + "\n";
    if (!error.empty()) report += "error: " + error + "\n";

    if (!csv.empty()) {
        const fs::path csv_path = dir / (config.output_prefix + "_trajectory.csv");
        write_atomic(csv_path, csv);
        rr.csv_paths.push_back(csv_path.string());
    }
    const fs::path report_path = dir / (config.output_prefix + "_report.txt");
    write_atomic(report_path, report);
    rr.report_path = report_path.string();

    if (!error.empty()) {
        rr.exit_code = 3;
    } else {
        rr.exit_code = 0;
        for (const auto& v : rr.verdicts)
            if (v.status == VerdictStatus::Fail) rr.exit_code = 1;
    }
    return rr;
}

RunResult run_grid_lane(const ScenarioConfig& config) {
    std::vector<CheckVerdict> verdicts;
    std::string csv = std::string(kCsvHeader) + "\n";
    std::string error;
    try {
        const ConformalGrid grid = config.make_grid();
        const DomainMask mask = config.make_mask(grid);
        mask.validate(grid);
        FlowControls controls;
        controls.dt = config.flow_dt;
        controls.t_end = config.flow_t_end;
        controls.safety = config.flow_safety;
        controls.max_steps = config.flow_max_steps;
        controls.snapshot_stride = config.flow_stride;
        const Trajectory traj = evolve(grid, controls);

        // The trajectory CSV always carries the tracked eigen branches.
        TrackedBranches tb = solve_along(traj, mask, config.spectral_count, config.spectral_tol);

        for (int m = 0; m < config.spectral_count; ++m) {
            const auto samples = samples_for_mode(tb, m);
            const std::string label = std::to_string(m);
            for (const auto& s : samples) csv += csv_row(s.t, label, s) + "\n";
        }

        const std::size_t mid = std::clamp<std::size_t>(traj.size() / 2, 1, traj.size() - 2);
        const ScalarField u = default_test_field_u(traj.at(mid));
        const ScalarField v = default_test_field_v(traj.at(mid));

        for (const CheckKind kind : config.checks) {
            switch (kind) {
                case CheckKind::Rate2d:
                    for (int m = 0; m < config.spectral_count; ++m) {
                        CheckVerdict cv = check_rate_identity(samples_for_mode(tb, m),
                                                              config.rate_tol);
                        cv.name = "rate2d.mode" + std::to_string(m);
                        verdicts.push_back(cv);
                    }
                    break;
                case CheckKind::Prop1:
                    for (int m = 0; m < config.spectral_count; ++m) {
                        const double r_inf = *std::min_element(tb.r_min.begin(), tb.r_min.end());
                        const double r_sup = *std::max_element(tb.r_max.begin(), tb.r_max.end());
                        Prop1Result pr = check_proposition1(tb.times, tb.mu[m], r_inf, r_sup,
                                                            config.prop1_tol);
                        pr.verdict.name = "prop1.mode" + std::to_string(m);
                        verdicts.push_back(pr.verdict);
                    }
                    break;
                case CheckKind::MainTheorem:
                    for (int m = 0; m < config.spectral_count; ++m) {
                        CheckVerdict cv = check_main_theorem(samples_for_mode(tb, m),
                                                             config.mono_tol);
                        cv.name = "main_theorem.mode" + std::to_string(m);
                        verdicts.push_back(cv);
                    }
                    break;
                case CheckKind::Eq5:
                    verdicts.push_back(identity_verdict(check_volume_evolution(traj, mid), "eq5",
                                                        config.identity_tol));
                    break;
                case CheckKind::Eq6:
                    verdicts.push_back(identity_verdict(check_eq6_chain(traj, mid, u, v), "eq6",
                                                        config.identity_tol));
                    break;
                case CheckKind::Eq7:
                    verdicts.push_back(identity_verdict(check_laplacian_variation(traj, mid, u),
                                                        "eq7", config.identity_tol));
                    break;
                case CheckKind::InverseMetric:
                    verdicts.push_back(identity_verdict(check_inverse_metric_evolution(traj, mid),
                                                        "inverse_metric", config.identity_tol));
                    break;
                case CheckKind::Bianchi:
                    verdicts.push_back(identity_verdict(check_bianchi(traj.at(mid)), "bianchi",
                                                        config.identity_tol));
                    break;
                case CheckKind::RateGeneral:
                    verdicts.push_back(skipped("rate_general", "model lane only"));
                    break;
            }
        }
    } catch (const StabilityViolation& e) {
        error = e.what();
    } catch (const BlowUp& e) {
        error = e.what();
    } catch (const NoConvergence& e) {
        error = e.what();
    }
    return finalize(config, std::move(verdicts), error.empty() ? csv : "", error);
}

RunResult run_model_lane(const ScenarioConfig& config) {
    std::vector<CheckVerdict> verdicts;
    std::string csv = std::string(kCsvHeader) + "\n";
    std::string error;
    const double fd_step = 1e-5;
    try {
        const ModelGeometry model = config.make_model();
        const long n_steps = std::max<long>(
            1, static_cast<long>(std::llround(config.flow_t_end / config.flow_dt)));
        std::vector<double> times(n_steps + 1);
        for (long i = 0; i <= n_steps; ++i)
            times[i] = config.flow_t_end * static_cast<double>(i) / n_steps;

        const EinsteinBounds b0 = model.einstein_bounds(0.0);
        (void)b0;
        std::vector<std::vector<RateSample>> per_mode(config.spectral_count);
        for (int m = 0; m < config.spectral_count; ++m) {
            const int mode = m + 1;
            std::vector<double> mus(times.size());
            for (std::size_t i = 0; i < times.size(); ++i)
                mus[i] = model.eigenvalue(mode, times[i]);
            for (std::size_t i = 0; i < times.size(); ++i) {
                const double t = times[i];
                const double r = model.scalar_curvature(t);
                const double a_req = -model.einstein_bounds(t).lambda_min;
                double obs = std::numeric_limits<double>::quiet_NaN();
                if (i >= 1 && i + 1 < times.size()) obs = observed_rate(times, mus, i);
                per_mode[m].push_back(make_rate_sample(t, mus[i], model.rate_prediction(mode, t),
                                                       obs, r, r, a_req));
            }
            const std::string label = std::to_string(mode);
            for (const auto& s : per_mode[m]) csv += csv_row(s.t, label, s) + "\n";
        }

        for (const CheckKind kind : config.checks) {
            switch (kind) {
                case CheckKind::RateGeneral:
                    for (int m = 0; m < config.spectral_count; ++m) {
                        const int mode = m + 1;
                        double worst = 0.0;
                        for (const double t : times)
                            worst = std::max(worst,
                                             std::fabs(model.rate_prediction(mode, t) -
                                                       model_rate_fd(model, mode, t, fd_step)));
                        CheckVerdict cv;
                        cv.name = "rate_general.mode" + std::to_string(mode);
                        cv.tol = config.model_tol;
                        cv.err = worst;
                        cv.status = worst <= config.model_tol ? VerdictStatus::Pass
                                                              : VerdictStatus::Fail;
                        cv.reason = "closed-form rate vs d(mu)/dt";
                        verdicts.push_back(cv);
                    }
                    break;
                case CheckKind::Prop1:
                    if (model.dim() != 2) {
                        verdicts.push_back(skipped("prop1", "2-D lanes only"));
                        break;
                    }
                    for (int m = 0; m < config.spectral_count; ++m) {
                        const int mode = m + 1;
                        std::vector<double> mus(times.size());
                        double r_inf = std::numeric_limits<double>::infinity(), r_sup = -r_inf;
                        for (std::size_t i = 0; i < times.size(); ++i) {
                            mus[i] = model.eigenvalue(mode, times[i]);
                            const double r = model.scalar_curvature(times[i]);
                            r_inf = std::min(r_inf, r);
                            r_sup = std::max(r_sup, r);
                        }
                        Prop1Result pr =
                            check_proposition1(times, mus, r_inf, r_sup, config.prop1_tol);
                        pr.verdict.name = "prop1.mode" + std::to_string(mode);
                        verdicts.push_back(pr.verdict);
                    }
                    break;
                case CheckKind::MainTheorem:
                    for (int m = 0; m < config.spectral_count; ++m) {
                        CheckVerdict cv = check_main_theorem(per_mode[m], config.mono_tol);
                        cv.name = "main_theorem.mode" + std::to_string(m + 1);
                        verdicts.push_back(cv);
                    }
                    break;
                case CheckKind::Eq5: {
                    double worst = 0.0;
                    for (const double t : times)
                        worst = std::max(worst,
                                         model_volume_evolution_check(model, t, fd_step).max_abs_err);
                    CheckVerdict cv;
                    cv.name = "eq5";
                    cv.tol = config.model_tol;
                    cv.err = worst;
                    cv.status = worst <= config.model_tol ? VerdictStatus::Pass : VerdictStatus::Fail;
                    cv.reason = "volume scale evolution";
                    verdicts.push_back(cv);
                    break;
                }
                case CheckKind::Eq7: {
                    if (model.dim() != 2 && model.family() != ModelFamily::RoundSphere &&
                        model.family() != ModelFamily::SphereCircleProduct) {
                        verdicts.push_back(skipped("eq7", "no closed form for this family"));
                        break;
                    }
                    double worst = 0.0;
                    for (int m = 0; m < config.spectral_count; ++m)
                        for (const double t : times)
                            worst = std::max(worst, model_laplacian_variation_check(
                                                        model, m + 1, t, fd_step)
                                                        .max_abs_err);
                    CheckVerdict cv;
                    cv.name = "eq7";
                    cv.tol = config.model_tol;
                    cv.err = worst;
                    cv.status = worst <= config.model_tol ? VerdictStatus::Pass : VerdictStatus::Fail;
                    cv.reason = "Laplacian variation on eigenbranches";
                    verdicts.push_back(cv);
                    break;
                }
                case CheckKind::InverseMetric: {
                    double worst = 0.0;
                    for (const double t : times)
                        worst = std::max(worst,
                                         model_inverse_metric_check(model, t, fd_step).max_abs_err);
                    CheckVerdict cv;
                    cv.name = "inverse_metric";
                    cv.tol = config.model_tol;
                    cv.err = worst;
                    cv.status = worst <= config.model_tol ? VerdictStatus::Pass : VerdictStatus::Fail;
                    cv.reason = "inverse metric evolution";
                    verdicts.push_back(cv);
                    break;
                }
                case CheckKind::Bianchi:
                    verdicts.push_back(identity_verdict(check_bianchi_model(model, times.front()),
                                                        "bianchi", config.model_tol));
                    break;
                case CheckKind::Rate2d:
                    verdicts.push_back(skipped("rate2d", "grid lane only"));
                    break;
                case CheckKind::Eq6:
                    verdicts.push_back(skipped("eq6", "grid lane only"));
                    break;
            }
        }
    } catch (const NoConvergence& e) {
        error = e.what();
    }
    return finalize(config, std::move(verdicts), error.empty() ? csv : "", error);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    return config.lane == Lane::Grid ? run_grid_lane(config) : run_model_lane(config);
}

RunResult run_refinement_study(const ScenarioConfig& config, int levels) {
    if (config.lane != Lane::Grid)
        throw ConfigError("refinement studies run on the grid lane only");
    if (levels < 2 || levels > 4)
        throw ConfigError("refinement studies need 2 to 4 levels, got " + std::to_string(levels));

    struct LevelErrors {
        std::map<std::string, double> err;  // check name -> error at this level
    };
    std::vector<LevelErrors> per_level;
    std::string error;
    double t_star = -1.0;

    try {
        for (int level = 0; level < levels; ++level) {
            ScenarioConfig c = config;
            const int factor = 1 << level;
            if (c.grid_topology == "torus") {
                c.grid_nx = config.grid_nx * factor;
                c.grid_ny = config.grid_ny * factor;
            } else {
                c.grid_nx = (config.grid_nx - 1) * factor + 1;
                c.grid_ny = (config.grid_ny - 1) * factor + 1;
            }
            c.flow_dt = config.flow_dt / (factor * factor);

            const ConformalGrid grid = c.make_grid();
            const DomainMask mask = c.make_mask(grid);
            FlowControls controls;
            controls.dt = c.flow_dt;
            controls.t_end = c.flow_t_end;
            controls.safety = c.flow_safety;
            controls.max_steps = c.flow_max_steps;
            controls.snapshot_stride = c.flow_stride;
            const Trajectory traj = evolve(grid, controls);
            if (traj.size() < 3) throw ConfigError("refinement study needs >= 3 snapshots");

            std::size_t mid;
            if (level == 0) {
                mid = std::clamp<std::size_t>(traj.size() / 2, 1, traj.size() - 2);
                t_star = traj.time(mid);
            } else {
                mid = 1;
                for (std::size_t s = 1; s + 1 < traj.size(); ++s)
                    if (std::fabs(traj.time(s) - t_star) < std::fabs(traj.time(mid) - t_star))
                        mid = s;
            }

            LevelErrors le;
            const ScalarField u = default_test_field_u(traj.at(mid));
            const ScalarField v = default_test_field_v(traj.at(mid));
            for (const CheckKind kind : config.checks) {
                switch (kind) {
                    case CheckKind::Rate2d: {
                        // Only the mid triple is solved; the branch is tracked
                        // across it starting from the left snapshot.
                        const EigenConstraint constraint =
                            grid.topology == Topology::PeriodicTorus ? EigenConstraint::MeanZero
                                                                     : EigenConstraint::None;
                        std::vector<double> times3, mus3;
                        double predicted_mid = 0.0;
                        EigenPair branch;
                        for (std::size_t s = mid - 1; s <= mid + 1; ++s) {
                            const OperatorPair ops = assemble(traj.at(s), mask);
                            const auto pairs =
                                smallest_eigenpairs(ops, config.spectral_count, c.spectral_tol,
                                                    constraint);
                            EigenPair chosen;
                            if (s == mid - 1) chosen = pairs[0];
                            else chosen = track_mode(branch, pairs, ops.mass).pair;
                            times3.push_back(traj.time(s));
                            mus3.push_back(chosen.mu);
                            if (s == mid) predicted_mid = predicted_rate_2d(traj.at(s), ops, chosen);
                            branch = std::move(chosen);
                        }
                        const double obs = observed_rate(times3, mus3, 1);
                        le.err["rate2d"] = std::fabs(predicted_mid - obs);
                        break;
                    }
                    case CheckKind::Eq5:
                        le.err["eq5"] = check_volume_evolution(traj, mid).rel_err;
                        break;
                    case CheckKind::Eq6:
                        le.err["eq6"] = check_eq6_chain(traj, mid, u, v).rel_err;
                        break;
                    case CheckKind::Eq7:
                        le.err["eq7"] = check_laplacian_variation(traj, mid, u).rel_err;
                        break;
                    case CheckKind::InverseMetric:
                        le.err["inverse_metric"] = check_inverse_metric_evolution(traj, mid).rel_err;
                        break;
                    case CheckKind::Bianchi:
                        le.err["bianchi"] = check_bianchi(traj.at(mid)).rel_err;
                        break;
                    default:
                        break;  // monotonicity checks are not order checks
                }
            }
            per_level.push_back(std::move(le));
        }
    } catch (const StabilityViolation& e) {
        error = e.what();
    } catch (const BlowUp& e) {
        error = e.what();
    } catch (const NoConvergence& e) {
        error = e.what();
    }

    RunResult rr;
    rr.error = error;
    std::string report;
    report += "refinement study: " + config.output_prefix + " (levels=" +
              std::to_string(levels) + ", dt ~ h^2)\n";
    if (error.empty()) {
        constexpr double kDegenerateFloor = 1e-11;
        constexpr double kOrderThreshold = 1.7;
        std::vector<std::string> names;
        for (const auto& [name, e] : per_level.front().err) {
            (void)e;
            names.push_back(name);
        }
        for (const auto& name : names) {
            std::vector<double> errs;
            for (const auto& le : per_level) errs.push_back(le.err.at(name));
            CheckVerdict v;
            v.name = "order." + name;
            v.tol = kOrderThreshold;
            std::string row = name + ": errors =";
            for (double e : errs) row += " " + fmt6(e);
            const bool degenerate =
                *std::max_element(errs.begin(), errs.end()) <= kDegenerateFloor;
            if (degenerate) {
                v.status = VerdictStatus::Pass;
                v.reason = "degenerate (exact)";
                v.err = *std::max_element(errs.begin(), errs.end());
                row += " degenerate (exact)";
            } else {
                // Least-squares slope of log2(err) against the level index.
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                const int n = static_cast<int>(errs.size());
                for (int i = 0; i < n; ++i) {
                    const double y = std::log2(std::max(errs[i], 1e-300));
                    sx += i;
                    sy += y;
                    sxx += static_cast<double>(i) * i;
                    sxy += i * y;
                }
                const double order = -(sxy - sx * sy / n) / (sxx - sx * sx / n);
                v.err = order;
                v.status = order >= kOrderThreshold ? VerdictStatus::Pass : VerdictStatus::Fail;
                v.reason = "fitted order";
                row += " order = " + fmt6(order);
            }
            report += row + "\n";
            report += verdict_line(v) + "\n";
            rr.verdicts.push_back(v);
        }
    } else {
        report += "error: " + error + "\n";
    }

    const fs::path dir = config.resolved_output_dir();
    const fs::path report_path = dir / (config.output_prefix + "_refine.txt");
    write_atomic(report_path, report);
    rr.report_path = report_path.string();
    if (!error.empty()) {
        rr.exit_code = 3;
    } else {
        rr.exit_code = 0;
        for (const auto& v : rr.verdicts)
            if (v.status == VerdictStatus::Fail) rr.exit_code = 1;
    }
    return rr;
}

std::string list_catalog() {
    std::string out;
    out += "model families:\n";
    out += "  RoundSphere(dim >= 2, radius)        shrinking round sphere, R = n(n-1)/r(t)^2\n";
    out += "  HyperbolicScaled(scale, spectrum)    expanding hyperbolic surface, R = -2/(scale+2t)\n";
    out += "  FlatTorus(lx, ly)                    stationary flat torus, R = 0\n";
    out += "  SphereCircleProduct(a0, b0)          S^2 x S^1, sphere factor shrinks\n";
    out += "initial phi expressions (grid lane):\n";
    out += "  flat                                 phi = 0\n";
    out += "  const(value)                         constant conformal factor\n";
    out += "  sinx(amplitude)                      amplitude * sin(2 pi x / Lx)\n";
    out += "  siny(amplitude)                      amplitude * sin(2 pi y / Ly)\n";
    out += "  bump(cx, cy, amplitude, width)       smooth localized bump at (cx, cy)\n";
    out += "checks:\n";
    out += "  rate2d          rate identity mu' = mu * integral(R f^2 dv)      [grid lane]\n";
    out += "  rate_general    rate mu' = mu R + 2 integral(E_ij f_i f_j)       [model lane]\n";
    out += "  prop1           exponential eigenvalue bounds under signed R     [2-D lanes]\n";
    out += "  main_theorem    mu non-decreasing under R >= 2a, E >= -a g\n";
    out += "  eq5             volume element evolution d(dv)/dt = -R dv\n";
    out += "  eq6             integral variation chain for the Dirichlet form  [grid lane]\n";
    out += "  eq7             Laplacian variation d(Delta u)/dt = R Delta u (2-D)\n";
    out += "  bianchi         contracted Bianchi identity, two discrete routes\n";
    out += "  inverse_metric  inverse metric evolution d(g^ij)/dt = 2 R^ij\n";
    return out;
}

}  // namespace rsl
