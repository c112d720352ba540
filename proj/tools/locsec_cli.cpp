// locsec: scenario generation, single evaluations, selection runs and sweeps.
//
// Exit codes: 0 success, 2 usage or validation error, 3 infeasible,
// 4 solver or evaluation failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "locsec/discrete_select.hpp"
#include "locsec/eav_metrics.hpp"
#include "locsec/harness.hpp"
#include "locsec/jam_metrics.hpp"
#include "locsec/scenario.hpp"
#include "locsec/scenario_io.hpp"

namespace {

using namespace locsec;
using nlohmann::json;

constexpr int kUsage = 2;

// "5,10,15" or "start:stop:step" (inclusive).
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    auto number = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size()) throw ValidationError("values", "'" + t + "' is not a number");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw ValidationError("values", "range must be start:stop:step");
        const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
        if (!(step > 0.0) || b < a) throw ValidationError("values", "range needs step > 0 and stop >= start");
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long k = 0; k <= count; ++k) out.push_back(a + static_cast<double>(k) * step);
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
    return out;
}

PipelineMode parse_mode(const std::string& m) {
    if (m == "eav") return PipelineMode::eav;
    if (m == "jam") return PipelineMode::jam;
    if (m == "joint") return PipelineMode::joint;
    throw ValidationError("mode", "must be eav, jam or joint");
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw ValidationError("out", "cannot open " + *path);
    f << text;
}

struct GenOptions {
    std::string preset = "paper";
    std::uint64_t seed = 1;
    bool shadowing = false;
    std::optional<int> anchors, candidates, grid;
    std::optional<double> eav_noise, jam_noise, jam_power, budget, nu;
    std::optional<std::string> out;
};

int cmd_gen(const GenOptions& o) {
    if (o.preset != "paper" && o.preset != "desk") throw ValidationError("preset", "must be paper or desk");
    GeneratorParams p = o.preset == "paper" ? paper_preset() : desk_preset();
    if (o.anchors) p.anchor_count = *o.anchors;
    if (o.candidates) p.candidate_count = *o.candidates;
    if (o.grid) p.grid_half_extent = *o.grid;
    if (o.eav_noise) p.eav_noise = *o.eav_noise;
    if (o.jam_noise) p.jam_noise = *o.jam_noise;
    if (o.jam_power) p.jam_power = *o.jam_power;
    if (o.budget) p.power_budget = *o.budget;
    if (p.anchor_count < 1) throw ValidationError("anchors", "must be at least 1");
    if (p.candidate_count < 1) throw ValidationError("candidates", "must be at least 1");
    if (p.grid_half_extent < 0) throw ValidationError("grid-half-extent", "must be nonnegative");
    auto s = generate_scenario(p, o.seed);
    if (o.shadowing) s = apply_shadowing(s, o.seed);
    if (o.nu) s.prior = gaussian_like_prior(s.targets, {0.0, 0.0}, *o.nu);
    write_output(o.out, scenario_to_json(s).dump(1) + "\n");
    return 0;
}

struct EvalOptions {
    std::string scenario;
    std::string mode = "eav";
    std::string mask;
    std::string format = "csv";
};

int cmd_eval(const EvalOptions& o) {
    const auto s = load_scenario(o.scenario);
    std::vector<double> z;
    std::stringstream ss(o.mask);
    for (std::string t; std::getline(ss, t, ',');) {
        if (t != "0" && t != "1") throw ValidationError("mask", "entries must be 0 or 1");
        z.push_back(t == "1" ? 1.0 : 0.0);
    }
    if (z.size() != static_cast<std::size_t>(s.candidate_count()))
        throw ValidationError("mask", "has " + std::to_string(z.size()) + " entries, scenario has " +
                                          std::to_string(s.candidate_count()) + " candidates");
    double f = 0.0;
    if (o.mode == "eav")
        f = eav_objective(s, z);
    else if (o.mode == "jam")
        f = jam_objective(s, z);
    else
        throw ValidationError("mode", "eval supports eav and jam");
    if (o.format == "json") {
        json j{{"mode", o.mode},
               {"objective_m2", std::isfinite(f) ? json(f) : json(nullptr)},
               {"objective_m", std::isfinite(f) ? json(std::sqrt(f)) : json(nullptr)}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << format_number(f) << " m^2, " << format_number(std::sqrt(f)) << " m\n";
    }
    return 0;
}

struct RunOptions {
    ExperimentConfig cfg;
    std::string mode = "eav";
    std::optional<std::string> scenario, uncertainty, values, random_seeds, out, plot, summary, verify_row;
    std::optional<double> rho, nu_db;
    std::string format = "csv";
};

ExperimentConfig build_config(RunOptions& o) {
    auto c = o.cfg;
    c.mode = parse_mode(o.mode);
    if (o.scenario) c.scenario_file = *o.scenario;
    if (o.uncertainty) {
        c.uncertainty_file = *o.uncertainty;
        c.robust = true;
    }
    if (o.rho) c.rho = *o.rho;
    if (o.nu_db) c.nu_db = *o.nu_db;
    if (o.values) c.values = parse_values(*o.values);
    if (o.random_seeds)
        for (double v : parse_values(*o.random_seeds)) {
            if (v < 0.0 || v != std::floor(v)) throw ValidationError("random-seeds", "seeds must be nonnegative integers");
            c.random_seeds.push_back(static_cast<std::uint64_t>(v));
        }
    if (c.scenario_file) c.shadowing = false;
    return c;
}

json row_json(const RunRow& r) {
    json j{{"algorithm", r.algorithm},
           {"mode", r.mode},
           {"replicate", r.replicate},
           {"seed", r.seed},
           {"feasible", r.feasible},
           {"swaps", r.swaps}};
    if (r.value) j["value"] = *r.value;
    const bool finite = r.objective && std::isfinite(*r.objective);
    j["objective_m2"] = finite ? json(*r.objective) : json(nullptr);
    j["objective_m"] = finite ? json(std::sqrt(*r.objective)) : json(nullptr);
    if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
    j["indices"] = r.indices;
    if (!r.eav_indices.empty()) j["eav_indices"] = r.eav_indices;
    return j;
}

int report_failures(const SweepResult& res) {
    int code = 0;
    for (const auto& f : res.failures) {
        std::cerr << "error";
        if (f.value) std::cerr << " at value " << format_number(*f.value);
        std::cerr << " replicate " << f.replicate << ": " << f.message << "\n";
        if (code == 0) code = f.exit_code;
    }
    return code;
}

int cmd_select(RunOptions& o) {
    auto cfg = build_config(o);
    cfg.param.clear();
    cfg.values.clear();
    const auto res = run_experiment(cfg);
    if (!res.failures.empty()) return report_failures(res);
    if (o.format == "json") {
        json rows = json::array();
        for (const auto& r : res.rows) rows.push_back(row_json(r));
        write_output(o.out, json{{"rows", rows}}.dump(1) + "\n");
    } else {
        write_output(o.out, to_csv(res.rows));
    }
    if (o.summary) {
        json rows = json::array();
        for (const auto& r : res.rows) rows.push_back(row_json(r));
        write_output(*o.summary, json{{"mode", o.mode}, {"rows", rows}}.dump(1) + "\n");
    }
    return 0;
}

int cmd_sweep(RunOptions& o) {
    auto cfg = build_config(o);
    if (cfg.param.empty()) throw ValidationError("param", "sweep needs --param");
    if (o.verify_row) {
        cfg.validate();
        const auto replay = replay_row(cfg, *o.verify_row);
        if (!replay) {
            std::cerr << "no row with that algorithm and mode was produced\n";
            return 4;
        }
        if (*replay == *o.verify_row) {
            std::cout << "match\n";
            return 0;
        }
        std::cout << "mismatch\nexpected: " << *o.verify_row << "\nreplayed: " << *replay << "\n";
        return 4;
    }
    const auto res = run_experiment(cfg);
    write_output(o.out, to_csv(res.rows));
    if (o.plot) {
        const auto plot = plot_data(res.rows);
        validate_plot_data(plot);
        write_output(*o.plot, plot.dump(1) + "\n");
    }
    return report_failures(res);
}

void add_run_options(CLI::App* app, RunOptions& o) {
    auto& c = o.cfg;
    app->add_option("--scenario", o.scenario, "Scenario JSON file (default: generated preset)");
    app->add_option("--preset", c.preset, "Generator preset: paper or desk")->capture_default_str();
    app->add_option("--candidates", c.candidates, "Override the preset's candidate count");
    app->add_option("--anchors", c.anchors, "Override the preset's anchor count");
    app->add_option("--grid-half-extent", c.grid_half_extent, "Override the preset's target grid half extent");
    app->add_flag("!--no-shadowing", c.shadowing, "Skip log-normal shadowing of generated scenarios");
    app->add_option("--seed", c.seed_base, "Seed of replicate 0; replicate r uses seed + r")->capture_default_str();
    app->add_option("--mode", o.mode, "eav, jam or joint")->capture_default_str();
    app->add_option("--n-eav", c.n_eav, "Eavesdropper count (joint: 0 means N - n_jam)")->capture_default_str();
    app->add_option("--n-jam", c.n_jam, "Jammer count")->capture_default_str();
    app->add_option("--rho", o.rho, "Joint mode bound on the eavesdropper CRLB (m^2)");
    app->add_option("--eav-noise", c.eav_noise, "Eavesdropper-side noise variance")->capture_default_str();
    app->add_option("--jam-noise", c.jam_noise, "Anchor-side noise variance")->capture_default_str();
    app->add_option("--mu", c.mu, "Swap stopping tolerance")->capture_default_str();
    app->add_option("--max-swaps", c.max_swaps, "Swap limit")->capture_default_str();
    app->add_flag("--exhaustive", c.exhaustive, "Also run the exhaustive search");
    app->add_option("--random-seeds", o.random_seeds, "Seeds of random-start swap baselines, e.g. 1,2,3");
    app->add_option("--random-max-swaps", c.random_max_swaps, "Swap limit of the random-start baselines")
        ->capture_default_str();
    app->add_flag("--robust", c.robust, "Select against worst-case intensities");
    app->add_option("--uncertainty", o.uncertainty, "Uncertainty JSON file (implies --robust)");
    app->add_option("--eps-seed", c.eps_seed, "Seed of the eavesdropper-side relative errors")->capture_default_str();
    app->add_option("--kappa-seed", c.kappa_seed, "Seed of the anchor-side relative errors")->capture_default_str();
    app->add_option("--nu-db", o.nu_db, "True prior Gaussian-like with nu = 10^(dB/10); selection assumes uniform");
    app->add_option("--anchor-error", c.anchor_error, "Jammers see anchors displaced by up to this distance")
        ->capture_default_str();
    app->add_option("--replicates", c.replicates, "Replicates per value")->capture_default_str();
    app->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
    app->add_flag("--timing", c.timing, "Fill the wall_ms column");
    app->add_option("--out", o.out, "Output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eavesdropper and jammer selection for wireless localization networks"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate a scenario file");
    g->add_option("--preset", gen.preset, "paper or desk")->capture_default_str();
    g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    g->add_flag("--shadowing", gen.shadowing, "Apply log-normal shadowing");
    g->add_option("--anchors", gen.anchors, "Anchor count");
    g->add_option("--candidates", gen.candidates, "Candidate count");
    g->add_option("--grid-half-extent", gen.grid, "Target grid half extent");
    g->add_option("--eav-noise", gen.eav_noise, "Eavesdropper-side noise variance");
    g->add_option("--jam-noise", gen.jam_noise, "Anchor-side noise variance");
    g->add_option("--jam-power", gen.jam_power, "Per-jammer power");
    g->add_option("--power-budget", gen.budget, "Total jammer power budget");
    g->add_option("--nu", gen.nu, "Gaussian-like prior width (default: uniform prior)");
    g->add_option("--out", gen.out, "Output file (default: stdout)");

    EvalOptions ev;
    auto* e = app.add_subcommand("eval", "Evaluate one binary selection");
    e->add_option("--scenario", ev.scenario, "Scenario JSON file")->required();
    e->add_option("--mode", ev.mode, "eav or jam")->capture_default_str();
    e->add_option("--mask", ev.mask, "Comma-separated 0/1 entries, one per candidate")->required();
    e->add_option("--format", ev.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    RunOptions sel;
    auto* s = app.add_subcommand("select", "Run the selection pipeline once");
    add_run_options(s, sel);
    s->add_option("--summary", sel.summary, "Also write a JSON summary with the selected indices");
    s->add_option("--format", sel.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    RunOptions sw;
    auto* w = app.add_subcommand("sweep", "Sweep one parameter with Monte-Carlo replicates");
    add_run_options(w, sw);
    w->add_option("--param", sw.cfg.param, "Swept parameter")->check(CLI::IsMember(sweep_parameters()));
    w->add_option("--values", sw.values, "Values: comma list or start:stop:step");
    w->add_option("--plot", sw.plot, "Plot-data JSON output");
    w->add_option("--verify-row", sw.verify_row, "Replay one CSV row and compare it byte for byte");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen);
        if (e->parsed()) return cmd_eval(ev);
        if (s->parsed()) return cmd_select(sel);
        if (w->parsed()) return cmd_sweep(sw);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return error_exit_code(ex);
    }
    return kUsage;
}
