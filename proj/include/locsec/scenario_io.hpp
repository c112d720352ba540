#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "locsec/error.hpp"
#include "locsec/scenario.hpp"
#include "locsec/uncertainty.hpp"

namespace locsec {

// Scenario files are JSON documents:
//
//   targets, anchors, candidates : [[x, y], ...]
//   prior                        : [w_0, ...]
//   anchor_connectivity          : [{"los": [...], "nlos": [...]}, ...]   (optional)
//   eav_los                      : [[i, j, k], ...]
//   eav_intensity                : [[i, j, k, lambda], ...]
//   jam_anchor_intensity         : [[i, j, lambda], ...]                  (jammer side)
//   jam_channel_gain             : [[g_k0, ..., g_k(NA-1)], ...]          (jammer side)
//   jam_powers                   : [P_0, ...]                             (jammer side)
//   jam_noise                    : [sigma~_0^2, ...]                      (jammer side)
//   power_budget                 : number, or null for unlimited          (jammer side)
//
// Doubles are written with round-trip precision.

namespace io_detail {

using nlohmann::json;

inline const json& member(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ValidationError(key, "missing");
    return j.at(key);
}

inline double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ValidationError(field, "expected a number");
    return v.get<double>();
}

inline int as_index(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ValidationError(field, "expected an integer index");
    return v.get<int>();
}

inline const json& as_array(const json& v, const std::string& field, std::size_t expected = 0) {
    if (!v.is_array()) throw ValidationError(field, "expected an array");
    if (expected != 0 && v.size() != expected)
        throw ValidationError(field, "expected " + std::to_string(expected) + " entries");
    return v;
}

inline std::vector<Point2> points(const json& j, const std::string& key) {
    std::vector<Point2> out;
    const auto& arr = as_array(member(j, key), key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto field = detail::indexed(key, i);
        const auto& p = as_array(arr[i], field, 2);
        out.push_back({as_number(p[0], field + ".x"), as_number(p[1], field + ".y")});
    }
    return out;
}

inline std::vector<double> numbers(const json& v, const std::string& field) {
    std::vector<double> out;
    const auto& arr = as_array(v, field);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_number(arr[i], detail::indexed(field, i)));
    return out;
}

inline std::vector<int> indices(const json& v, const std::string& field) {
    std::vector<int> out;
    const auto& arr = as_array(v, field);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_index(arr[i], detail::indexed(field, i)));
    return out;
}

inline void check_target(int i, std::size_t nt, const std::string& field) {
    if (i < 0 || static_cast<std::size_t>(i) >= nt) throw ValidationError(field, "target index out of range");
}

inline json point_array(const std::vector<Point2>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string(), std::string("malformed JSON: ") + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace io_detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
    using nlohmann::json;
    json j;
    j["targets"] = io_detail::point_array(s.targets);
    j["prior"] = s.prior;
    j["anchors"] = io_detail::point_array(s.anchors);
    j["candidates"] = io_detail::point_array(s.candidates);
    if (!s.anchor_connectivity.empty()) {
        json conn = json::array();
        for (const auto& c : s.anchor_connectivity) conn.push_back({{"los", c.los}, {"nlos", c.nlos}});
        j["anchor_connectivity"] = conn;
    }
    json los = json::array();
    json intensity = json::array();
    for (std::size_t i = 0; i < s.eav_links.size(); ++i) {
        for (const auto& link : s.eav_links[i]) {
            los.push_back({i, link.anchor, link.candidate});
            intensity.push_back({i, link.anchor, link.candidate, link.lambda});
        }
    }
    j["eav_los"] = los;
    j["eav_intensity"] = intensity;
    if (!s.jam_links.empty()) {
        json jam = json::array();
        for (std::size_t i = 0; i < s.jam_links.size(); ++i)
            for (const auto& link : s.jam_links[i]) jam.push_back({i, link.anchor, link.lambda});
        j["jam_anchor_intensity"] = jam;
    }
    if (!s.jam_channel_gain.empty()) j["jam_channel_gain"] = s.jam_channel_gain;
    if (!s.jam_powers.empty()) j["jam_powers"] = s.jam_powers;
    if (!s.jam_noise.empty()) j["jam_noise"] = s.jam_noise;
    if (std::isfinite(s.power_budget))
        j["power_budget"] = s.power_budget;
    else
        j["power_budget"] = nullptr;
    return j;
}

/// Parses and validates. Field paths in errors follow the JSON keys.
inline Scenario scenario_from_json(const nlohmann::json& j) {
    using namespace io_detail;
    if (!j.is_object()) throw ValidationError("$", "expected a JSON object");
    Scenario s;
    s.targets = points(j, "targets");
    s.prior = numbers(member(j, "prior"), "prior");
    s.anchors = points(j, "anchors");
    s.candidates = points(j, "candidates");
    const auto nt = s.targets.size();

    if (j.contains("anchor_connectivity")) {
        const auto& arr = as_array(j.at("anchor_connectivity"), "anchor_connectivity");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto field = detail::indexed("anchor_connectivity", i);
            AnchorConnectivity c;
            c.los = indices(member(arr[i], "los"), field + ".los");
            if (arr[i].contains("nlos")) c.nlos = indices(arr[i].at("nlos"), field + ".nlos");
            s.anchor_connectivity.push_back(std::move(c));
        }
    }

    std::map<std::tuple<int, int, int>, double> eav_values;
    const auto& intensity = as_array(member(j, "eav_intensity"), "eav_intensity");
    for (std::size_t e = 0; e < intensity.size(); ++e) {
        const auto field = detail::indexed("eav_intensity", e);
        const auto& t = as_array(intensity[e], field, 4);
        const int i = as_index(t[0], field + ".target");
        check_target(i, nt, field);
        eav_values[{i, as_index(t[1], field + ".anchor"), as_index(t[2], field + ".candidate")}] =
            as_number(t[3], field + ".lambda");
    }
    s.eav_links.resize(nt);
    const auto& los = as_array(member(j, "eav_los"), "eav_los");
    std::size_t matched = 0;
    for (std::size_t e = 0; e < los.size(); ++e) {
        const auto field = detail::indexed("eav_los", e);
        const auto& t = as_array(los[e], field, 3);
        const int i = as_index(t[0], field + ".target");
        check_target(i, nt, field);
        const int a = as_index(t[1], field + ".anchor");
        const int k = as_index(t[2], field + ".candidate");
        const auto it = eav_values.find({i, a, k});
        if (it == eav_values.end()) throw ValidationError(field, "LOS pair has no eav_intensity entry");
        ++matched;
        s.eav_links[static_cast<std::size_t>(i)].push_back({a, k, it->second});
    }
    if (matched != eav_values.size()) {
        for (const auto& [key, value] : eav_values) {
            bool listed = false;
            for (const auto& link : s.eav_links[static_cast<std::size_t>(std::get<0>(key))])
                listed = listed || (link.anchor == std::get<1>(key) && link.candidate == std::get<2>(key));
            if (!listed && value != 0.0)
                throw ValidationError("eav_intensity", "nonzero intensity on a pair absent from eav_los");
        }
    }

    if (j.contains("jam_anchor_intensity")) {
        s.jam_links.resize(nt);
        const auto& jam = as_array(j.at("jam_anchor_intensity"), "jam_anchor_intensity");
        for (std::size_t e = 0; e < jam.size(); ++e) {
            const auto field = detail::indexed("jam_anchor_intensity", e);
            const auto& t = as_array(jam[e], field, 3);
            const int i = as_index(t[0], field + ".target");
            check_target(i, nt, field);
            s.jam_links[static_cast<std::size_t>(i)].push_back(
                {as_index(t[1], field + ".anchor"), as_number(t[2], field + ".lambda")});
        }
    }
    if (j.contains("jam_channel_gain")) {
        const auto& rows = as_array(j.at("jam_channel_gain"), "jam_channel_gain");
        for (std::size_t k = 0; k < rows.size(); ++k)
            s.jam_channel_gain.push_back(numbers(rows[k], detail::indexed("jam_channel_gain", k)));
    }
    if (j.contains("jam_powers")) s.jam_powers = numbers(j.at("jam_powers"), "jam_powers");
    if (j.contains("jam_noise")) s.jam_noise = numbers(j.at("jam_noise"), "jam_noise");
    if (j.contains("power_budget") && !j.at("power_budget").is_null())
        s.power_budget = as_number(j.at("power_budget"), "power_budget");

    validate(s);
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(io_detail::read_json(path));
}

inline void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    io_detail::write_text(path, scenario_to_json(s).dump(1) + "\n");
}

// Uncertainty files accept any one of three forms per side:
//   {"eav_delta": [[i, j, k, delta], ...], "jam_delta": [[i, j, delta], ...]}
//   {"eav_epsilon": [eps_0, ...], "jam_kappa": [kappa_0, ...]}        (relative)
//   {"eav_epsilon_seed": 1, "jam_kappa_seed": 2}                      (uniform draws)
// Links not mentioned in the sparse form get a zero bound.
inline UncertaintyModel uncertainty_from_json(const nlohmann::json& j, const Scenario& s) {
    using namespace io_detail;
    if (!j.is_object()) throw ValidationError("$", "expected a JSON object");
    const auto nt = s.targets.size();
    UncertaintyModel u;

    std::vector<double> eps;
    std::vector<double> kappa;
    if (j.contains("eav_epsilon")) eps = numbers(j.at("eav_epsilon"), "eav_epsilon");
    if (j.contains("jam_kappa")) kappa = numbers(j.at("jam_kappa"), "jam_kappa");
    if (j.contains("eav_epsilon_seed")) {
        Rng rng(static_cast<std::uint64_t>(as_index(j.at("eav_epsilon_seed"), "eav_epsilon_seed")));
        eps.resize(nt);
        for (auto& e : eps) e = rng.uniform();
    }
    if (j.contains("jam_kappa_seed")) {
        Rng rng(static_cast<std::uint64_t>(as_index(j.at("jam_kappa_seed"), "jam_kappa_seed")));
        kappa.resize(nt);
        for (auto& k : kappa) k = rng.uniform();
    }
    u = relative_uncertainty(s, eps, kappa);

    if (j.contains("eav_delta")) {
        u.eav_delta.assign(nt, {});
        for (std::size_t i = 0; i < nt; ++i) u.eav_delta[i].assign(s.eav_links[i].size(), 0.0);
        const auto& arr = as_array(j.at("eav_delta"), "eav_delta");
        for (std::size_t e = 0; e < arr.size(); ++e) {
            const auto field = detail::indexed("eav_delta", e);
            const auto& t = as_array(arr[e], field, 4);
            const int i = as_index(t[0], field + ".target");
            check_target(i, nt, field);
            const int a = as_index(t[1], field + ".anchor");
            const int k = as_index(t[2], field + ".candidate");
            const auto& links = s.eav_links[static_cast<std::size_t>(i)];
            bool found = false;
            for (std::size_t l = 0; l < links.size(); ++l) {
                if (links[l].anchor == a && links[l].candidate == k) {
                    u.eav_delta[static_cast<std::size_t>(i)][l] = as_number(t[3], field + ".delta");
                    found = true;
                }
            }
            if (!found) throw ValidationError(field, "no such LOS link in the scenario");
        }
    }
    if (j.contains("jam_delta")) {
        u.jam_delta.assign(nt, {});
        for (std::size_t i = 0; i < nt; ++i) u.jam_delta[i].assign(s.jam_links[i].size(), 0.0);
        const auto& arr = as_array(j.at("jam_delta"), "jam_delta");
        for (std::size_t e = 0; e < arr.size(); ++e) {
            const auto field = detail::indexed("jam_delta", e);
            const auto& t = as_array(arr[e], field, 3);
            const int i = as_index(t[0], field + ".target");
            check_target(i, nt, field);
            const int a = as_index(t[1], field + ".anchor");
            const auto& links = s.jam_links[static_cast<std::size_t>(i)];
            bool found = false;
            for (std::size_t l = 0; l < links.size(); ++l) {
                if (links[l].anchor == a) {
                    u.jam_delta[static_cast<std::size_t>(i)][l] = as_number(t[2], field + ".delta");
                    found = true;
                }
            }
            if (!found) throw ValidationError(field, "no such anchor link in the scenario");
        }
    }
    validate(u, s);
    return u;
}

inline UncertaintyModel load_uncertainty(const std::filesystem::path& path, const Scenario& s) {
    return uncertainty_from_json(io_detail::read_json(path), s);
}

}  // namespace locsec
