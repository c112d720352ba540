#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "locsec/discrete_select.hpp"
#include "locsec/error.hpp"
#include "locsec/scenario.hpp"
#include "locsec/scenario_io.hpp"
#include "locsec/uncertainty.hpp"

namespace locsec {

/// Names accepted for the swept parameter.
inline const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"n_eav",    "n_jam", "inv_noise", "inv_jam_noise",
                                                "max_swaps", "rho",   "nu_db",     "anchor_error"};
    return names;
}

struct ExperimentConfig {
    // Scenario source: a file, or the generator preset regenerated per replicate.
    std::optional<std::filesystem::path> scenario_file;
    std::string preset = "desk";
    std::optional<int> candidates;
    std::optional<int> anchors;
    std::optional<int> grid_half_extent;
    bool shadowing = true;
    std::uint64_t seed_base = 1;
    int replicates = 1;

    PipelineMode mode = PipelineMode::eav;
    std::string param;  // empty = single run
    std::vector<double> values;

    int n_eav = 8;
    int n_jam = 15;  // joint mode with n_eav = 0 uses n_eav = N - n_jam
    double rho = kInf;
    double eav_noise = 0.1;
    double jam_noise = 0.1;
    double mu = 0.01;
    int max_swaps = 5;
    bool exhaustive = false;
    std::vector<std::uint64_t> random_seeds;
    int random_max_swaps = 5;

    // Robust selection against relative intensity errors.
    bool robust = false;
    std::optional<std::filesystem::path> uncertainty_file;
    std::uint64_t eps_seed = 1;
    std::uint64_t kappa_seed = 2;

    // Model mismatch: true prior Gaussian-like with nu (dB), assumed uniform;
    // jammers additionally see anchors displaced by up to anchor_error.
    std::optional<double> nu_db;
    double anchor_error = 0.0;

    int threads = 0;  // 0 = hardware concurrency
    bool timing = false;

    void validate() const {
        if (!param.empty()) {
            const auto& names = sweep_parameters();
            if (std::find(names.begin(), names.end(), param) == names.end())
                throw ValidationError("param", "unknown sweep parameter '" + param + "'");
            if (values.empty()) throw ValidationError("values", "sweep needs at least one value");
            if (scenario_file && (param == "inv_noise" || param == "inv_jam_noise" || param == "anchor_error"))
                throw ValidationError("param", param + " sweeps need a generated scenario");
        }
        for (double v : values)
            if (!std::isfinite(v) && !(param == "rho" && v > 0.0))
                throw ValidationError("values", "sweep values must be finite");
        if (replicates < 1) throw ValidationError("replicates", "must be at least 1");
        if (preset != "paper" && preset != "desk") throw ValidationError("preset", "must be paper or desk");
        if (!(mu >= 0.0)) throw ValidationError("mu", "must be nonnegative");
        if (max_swaps < 0 || random_max_swaps < 0) throw ValidationError("max_swaps", "must be nonnegative");
        if (!(eav_noise > 0.0) || !(jam_noise > 0.0)) throw ValidationError("noise", "must be positive");
        if (!(anchor_error >= 0.0)) throw ValidationError("anchor_error", "must be nonnegative");
        if (robust && mode == PipelineMode::joint) throw ValidationError("robust", "robust mode covers eav and jam only");
        if (robust && (nu_db || anchor_error > 0.0))
            throw ValidationError("robust", "cannot combine robust selection with model mismatch");
        if (mode == PipelineMode::joint && !(rho > 0.0)) throw ValidationError("rho", "must be positive");
    }
};

/// One CSV row. `objective` is in m^2; the CSV also reports its square root.
struct RunRow {
    std::string algorithm;
    std::string mode;
    std::string param;
    std::optional<double> value;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::optional<double> objective;
    bool feasible = true;
    int swaps = 0;
    std::optional<double> wall_ms;
    // Not written to CSV.
    std::vector<int> indices;
    std::vector<int> eav_indices;
};

inline constexpr const char* kCsvHeader =
    "algorithm,mode,param,value,replicate,seed,objective_m2,objective_m,feasible,swaps,wall_ms";

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline std::string csv_row(const RunRow& r) {
    std::string line = r.algorithm + ',' + r.mode + ',' + r.param + ',';
    if (r.value) line += format_number(*r.value);
    line += ',' + std::to_string(r.replicate) + ',' + std::to_string(r.seed) + ',';
    if (r.objective) line += format_number(*r.objective) + ',' + format_number(std::sqrt(*r.objective));
    else line += ',';
    line += r.feasible ? ",true," : ",false,";
    line += std::to_string(r.swaps) + ',';
    if (r.wall_ms) line += format_number(*r.wall_ms);
    return line;
}

inline std::string to_csv(const std::vector<RunRow>& rows) {
    std::string out = std::string(kCsvHeader) + '\n';
    for (const auto& r : rows) out += csv_row(r) + '\n';
    return out;
}

namespace harness_detail {

inline std::string mode_name(PipelineMode m) {
    switch (m) {
        case PipelineMode::eav: return "eav";
        case PipelineMode::jam: return "jam";
        case PipelineMode::joint: return "joint";
    }
    return "";
}

inline std::vector<int> support(const SelectionVector& z) {
    return z.mode() == SelectionMode::binary ? z.indices() : std::vector<int>{};
}

inline std::string label(const SelectionOutcome& o) {
    return o.seed ? o.algorithm + "-" + std::to_string(*o.seed) : o.algorithm;
}

/// Objective of an outcome's selection re-evaluated on another scenario.
inline double evaluate_on(const Scenario& s, PipelineMode mode, const SelectionOutcome& o) {
    if (mode == PipelineMode::eav) return EavModel(s).objective_fim(o.z);
    return JamModel(s).objective(o.z);
}

struct Job {
    std::size_t value_index;
    int replicate;
};

}  // namespace harness_detail

/// Parameters after applying the swept value.
struct JobSetup {
    ExperimentConfig cfg;
    std::optional<double> value;
    std::uint64_t seed = 0;
};

inline JobSetup job_setup(const ExperimentConfig& base, std::optional<double> value, int replicate) {
    JobSetup j{base, value, base.seed_base + static_cast<std::uint64_t>(replicate)};
    if (!value) return j;
    const double v = *value;
    auto as_count = [&](const char* name) {
        if (v != std::floor(v) || v < 0.0) throw ValidationError(name, "sweep value must be a nonnegative integer");
        return static_cast<int>(v);
    };
    auto& c = j.cfg;
    if (c.param == "n_eav") c.n_eav = as_count("n_eav");
    else if (c.param == "n_jam") c.n_jam = as_count("n_jam");
    else if (c.param == "max_swaps") c.max_swaps = c.random_max_swaps = as_count("max_swaps");
    else if (c.param == "inv_noise") c.eav_noise = 1.0 / v;
    else if (c.param == "inv_jam_noise") c.jam_noise = 1.0 / v;
    else if (c.param == "rho") c.rho = v;
    else if (c.param == "nu_db") c.nu_db = v;
    else if (c.param == "anchor_error") c.anchor_error = v;
    if (!(c.eav_noise > 0.0) || !(c.jam_noise > 0.0)) throw ValidationError("values", "noise levels must be positive");
    return j;
}

inline GeneratorParams generator_params(const ExperimentConfig& c) {
    GeneratorParams p = c.preset == "paper" ? paper_preset() : desk_preset();
    if (c.candidates) p.candidate_count = *c.candidates;
    if (c.anchors) p.anchor_count = *c.anchors;
    if (c.grid_half_extent) p.grid_half_extent = *c.grid_half_extent;
    p.eav_noise = c.eav_noise;
    p.jam_noise = c.jam_noise;
    return p;
}

/// Scenario of one job: the file as given, or the preset generated (and
/// shadowed) with the job seed.
inline Scenario job_scenario(const JobSetup& j) {
    if (j.cfg.scenario_file) return load_scenario(*j.cfg.scenario_file);
    auto s = generate_scenario(generator_params(j.cfg), j.seed);
    if (j.cfg.shadowing) s = apply_shadowing(s, j.seed);
    return s;
}

/// Runs one (value, replicate) job and returns its rows in a fixed order.
inline std::vector<RunRow> run_job(const ExperimentConfig& base, std::optional<double> value, int replicate) {
    const auto j = job_setup(base, value, replicate);
    const auto& c = j.cfg;
    const Scenario truth = job_scenario(j);

    PipelineParams pp;
    pp.mode = c.mode;
    pp.n_eav = c.n_eav;
    pp.n_jam = c.n_jam;
    pp.rho = c.rho;
    pp.mu = c.mu;
    pp.max_swaps = c.max_swaps;
    pp.exhaustive = c.exhaustive;
    pp.random_seeds = c.random_seeds;
    pp.random_max_swaps = c.random_max_swaps;
    if (c.mode == PipelineMode::joint && pp.n_eav <= 0) pp.n_eav = truth.candidate_count() - pp.n_jam;

    std::vector<RunRow> rows;
    auto emit = [&](const SelectionOutcome& o, const std::string& mode, const std::string& suffix, double objective,
                    bool feasible) {
        RunRow r;
        r.algorithm = harness_detail::label(o) + suffix;
        r.mode = mode;
        r.param = c.param;
        r.value = value;
        r.replicate = replicate;
        r.seed = j.seed;
        r.objective = objective;
        r.feasible = feasible;
        r.swaps = o.swaps;
        if (c.timing) r.wall_ms = o.wall_ms;
        r.indices = harness_detail::support(o.z);
        r.eav_indices = harness_detail::support(o.z_eav);
        rows.push_back(std::move(r));
    };

    if (c.mode == PipelineMode::joint) {
        for (const auto& o : select_pipeline(truth, pp)) {
            emit(o, "joint-jam", "", o.objective, o.feasible);
            emit(o, "joint-eav", "", o.eav_objective, o.feasible);
        }
        return rows;
    }

    const std::string mode = harness_detail::mode_name(c.mode);
    if (c.robust) {
        const auto u = c.uncertainty_file ? load_uncertainty(*c.uncertainty_file, truth)
                                          : random_relative_uncertainty(truth, c.eps_seed, c.kappa_seed);
        const Scenario worst =
            c.mode == PipelineMode::eav ? robust_eav_effective(truth, u) : robust_jam_effective(truth, u);
        for (const auto& o : select_pipeline(worst, pp)) emit(o, mode + "-robust", "", o.objective, o.feasible);
        for (const auto& o : select_pipeline(truth, pp)) {
            if (o.algorithm == "relaxed-bound") continue;
            const double w = harness_detail::evaluate_on(worst, c.mode, o);
            emit(o, mode + "-robust", "-nonrobust", w, std::isfinite(w));
        }
        return rows;
    }

    if (c.nu_db || c.anchor_error > 0.0) {
        Scenario actual = truth;
        if (c.nu_db) actual.prior = gaussian_like_prior(truth.targets, {0.0, 0.0}, std::pow(10.0, *c.nu_db / 10.0));
        Scenario assumed = actual;
        assumed.prior.assign(truth.targets.size(), 1.0 / static_cast<double>(truth.targets.size()));
        if (c.mode == PipelineMode::jam && c.anchor_error > 0.0)
            assumed = perturb_anchor_knowledge(assumed, c.anchor_error, j.seed ^ 0x5bd1e995ULL);
        for (const auto& o : select_pipeline(actual, pp)) emit(o, mode, "", o.objective, o.feasible);
        for (const auto& o : select_pipeline(assumed, pp)) {
            if (o.algorithm == "relaxed-bound") continue;
            const double w = harness_detail::evaluate_on(actual, c.mode, o);
            emit(o, mode, "-assumed", w, std::isfinite(w));
        }
        return rows;
    }

    for (const auto& o : select_pipeline(truth, pp)) emit(o, mode, "", o.objective, o.feasible);
    return rows;
}

/// Exit-code class of an exception: 2 usage/validation, 3 infeasible, 4 solver/evaluation.
inline int error_exit_code(const std::exception& e) {
    if (dynamic_cast<const InfeasibleError*>(&e)) return 3;
    if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const EvaluationError*>(&e)) return 4;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const EnumerationCapError*>(&e))
        return 2;
    return 4;
}

struct JobFailure {
    std::optional<double> value;
    int replicate = 0;
    std::string message;
    int exit_code = 4;
};

struct SweepResult {
    std::vector<RunRow> rows;
    std::vector<JobFailure> failures;
};

/// Runs every (value, replicate) job on a worker pool. Rows are assembled in
/// (value, replicate) order whatever the thread count. A failed job leaves an
/// "error" row and is listed in `failures`.
inline SweepResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::optional<double>> values;
    if (cfg.param.empty())
        values.push_back(std::nullopt);
    else
        values.assign(cfg.values.begin(), cfg.values.end());
    std::vector<harness_detail::Job> jobs;
    for (std::size_t v = 0; v < values.size(); ++v)
        for (int r = 0; r < cfg.replicates; ++r) jobs.push_back({v, r});

    std::vector<std::vector<RunRow>> out(jobs.size());
    std::vector<std::optional<JobFailure>> failed(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            const auto& job = jobs[k];
            const auto value = values[job.value_index];
            try {
                out[k] = run_job(cfg, value, job.replicate);
            } catch (const std::exception& e) {
                failed[k] = JobFailure{value, job.replicate, e.what(), error_exit_code(e)};
                RunRow r;
                r.algorithm = "error";
                r.mode = harness_detail::mode_name(cfg.mode);
                r.param = cfg.param;
                r.value = value;
                r.replicate = job.replicate;
                r.seed = cfg.seed_base + static_cast<std::uint64_t>(job.replicate);
                r.feasible = false;
                out[k] = {r};
            }
        }
    };
    unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    SweepResult res;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        for (auto& r : out[k]) res.rows.push_back(std::move(r));
        if (failed[k]) res.failures.push_back(std::move(*failed[k]));
    }
    return res;
}

/// Plot data: one series per (mode, algorithm) with the mean of sqrt(CRLB)
/// in meters per swept value, plus the sample standard deviation as `spread`.
/// Values with no finite objective are written as null.
inline nlohmann::json plot_data(const std::vector<RunRow>& rows) {
    using nlohmann::json;
    std::vector<std::string> labels;
    std::vector<double> xs;
    for (const auto& r : rows) {
        if (r.algorithm == "error") continue;
        const auto label = r.mode + "/" + r.algorithm;
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
        const double x = r.value.value_or(0.0);
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    json series = json::array();
    for (const auto& label : labels) {
        json x = json::array(), y = json::array(), spread = json::array();
        for (double xv : xs) {
            std::vector<double> samples;
            bool any = false;
            for (const auto& r : rows) {
                if (r.mode + "/" + r.algorithm != label || r.value.value_or(0.0) != xv) continue;
                any = true;
                if (r.objective && std::isfinite(*r.objective)) samples.push_back(std::sqrt(*r.objective));
            }
            if (!any) continue;
            x.push_back(xv);
            if (samples.empty()) {
                y.push_back(nullptr);
                spread.push_back(nullptr);
                continue;
            }
            double mean = 0.0;
            for (double s : samples) mean += s;
            mean /= static_cast<double>(samples.size());
            double var = 0.0;
            for (double s : samples) var += (s - mean) * (s - mean);
            y.push_back(mean);
            spread.push_back(samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0);
        }
        series.push_back({{"label", label}, {"x", x}, {"y", y}, {"spread", spread}});
    }
    return {{"series", series}};
}

/// Throws ValidationError unless `j` has the plot-data shape
/// {series:[{label, x:[numbers], y:[numbers|null], spread?:[...]}]}.
inline void validate_plot_data(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("series") || !j.at("series").is_array())
        throw ValidationError("series", "must be an array");
    std::set<std::string> seen;
    const auto& series = j.at("series");
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const auto field = "series[" + std::to_string(i) + "]";
        if (!s.is_object()) throw ValidationError(field, "must be an object");
        if (!s.contains("label") || !s.at("label").is_string()) throw ValidationError(field + ".label", "must be a string");
        if (!seen.insert(s.at("label").get<std::string>()).second)
            throw ValidationError(field + ".label", "duplicate label");
        for (const char* key : {"x", "y"})
            if (!s.contains(key) || !s.at(key).is_array()) throw ValidationError(field + "." + key, "must be an array");
        const auto& x = s.at("x");
        const auto& y = s.at("y");
        if (x.size() != y.size()) throw ValidationError(field, "x and y lengths differ");
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (!x[k].is_number()) throw ValidationError(field + ".x[" + std::to_string(k) + "]", "must be a number");
            if (!y[k].is_number() && !y[k].is_null())
                throw ValidationError(field + ".y[" + std::to_string(k) + "]", "must be a number or null");
        }
        if (s.contains("spread") && (!s.at("spread").is_array() || s.at("spread").size() != x.size()))
            throw ValidationError(field + ".spread", "must be an array as long as x");
    }
}

/// Parses the leading fields of a CSV row written by `csv_row`.
struct RowKey {
    std::string algorithm;
    std::string mode;
    std::string param;
    std::optional<double> value;
    int replicate = 0;
    std::uint64_t seed = 0;
};

inline RowKey parse_row_key(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 11) throw ValidationError("verify_row", "expected 11 comma-separated fields");
    RowKey k{f[0], f[1], f[2], std::nullopt, 0, 0};
    try {
        if (!f[3].empty()) k.value = std::stod(f[3]);
        k.replicate = std::stoi(f[4]);
        k.seed = std::stoull(f[5]);
    } catch (const std::exception&) {
        throw ValidationError("verify_row", "value, replicate or seed is not a number");
    }
    return k;
}

/// Replays the job behind `line` and returns the regenerated row text, or
/// nullopt when the job yields no row with that algorithm and mode.
inline std::optional<std::string> replay_row(const ExperimentConfig& cfg, const std::string& line) {
    const auto key = parse_row_key(line);
    if (key.param != cfg.param) throw ValidationError("verify_row", "row was produced by a different sweep parameter");
    if (key.seed != cfg.seed_base + static_cast<std::uint64_t>(key.replicate))
        throw ValidationError("verify_row", "row seed does not match --seed plus its replicate");
    for (const auto& r : run_job(cfg, key.value, key.replicate))
        if (r.algorithm == key.algorithm && r.mode == key.mode) return csv_row(r);
    return std::nullopt;
}

}  // namespace locsec
