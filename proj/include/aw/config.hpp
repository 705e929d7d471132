#pragma once
/**
 * JSON run configuration. The schema is documented in docs/config.md.
 */

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "scaling.hpp"
#include <nlohmann/json.hpp>

namespace aw {

struct KernelPoint {
    double t1 = 0.0, x1 = 0.0, t2 = 0.0, x2 = 0.0;
};

struct RunConfig {
    ParamSet params;
    double q = 0.25;
    std::vector<double> times{0.0};
    long N = 1000;
    std::uint64_t seed = 1;
    long samples = 100;

    std::vector<KernelPoint> kernel_points;
    QuadOpts quad;

    std::string fredholm_method = "nystrom";
    int fredholm_nodes = 60;
    double fredholm_window = 0.0;
    int fredholm_n_max = 40;
    double fredholm_time = 0.0;
    std::vector<double> fredholm_t{-2.0, -1.0, 0.0, 1.0};
};

namespace detail {

inline ParamSequence parse_sequence(const nlohmann::json& j, const std::string& name) {
    ParamSequence s;
    if (j.is_array()) {
        s.prefix = j.get<std::vector<double>>();
    } else if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            require(k == "prefix" || k == "tail_sum_bound", "params." + name + ": unknown key '" + k + "'");
        if (j.contains("prefix")) s.prefix = j.at("prefix").get<std::vector<double>>();
        if (j.contains("tail_sum_bound")) s.tail_sum_bound = j.at("tail_sum_bound").get<double>();
    } else {
        throw config_error("params." + name + " must be an array or {prefix, tail_sum_bound}");
    }
    return s;
}

inline std::vector<double> axis(const nlohmann::json& g, const char* key) {
    require(g.contains(key), std::string("kernel.grid needs '") + key + "'");
    const auto& v = g.at(key);
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig c;
    try {
        require(j.is_object(), "config must be a JSON object");
        for (const auto& [k, v] : j.items()) {
            static const char* known[] = {"params", "q", "times", "N", "seed", "samples",
                                          "kernel", "fredholm", "quadrature"};
            bool ok = false;
            for (const char* s : known) ok = ok || k == s;
            require(ok, "unknown config key '" + k + "'");
        }
        if (j.contains("params")) {
            const auto& p = j.at("params");
            require(p.is_object(), "params must be an object");
            for (const auto& [k, v] : p.items()) {
                if (k == "a_plus") c.params.a_plus = detail::parse_sequence(v, k);
                else if (k == "a_minus") c.params.a_minus = detail::parse_sequence(v, k);
                else if (k == "b_plus") c.params.b_plus = detail::parse_sequence(v, k);
                else if (k == "b_minus") c.params.b_minus = detail::parse_sequence(v, k);
                else if (k == "c_plus") c.params.c_plus = v.get<double>();
                else if (k == "c_minus") c.params.c_minus = v.get<double>();
                else throw config_error("params: unknown key '" + k + "'");
            }
        }
        c.params = validate_params(c.params);
        if (j.contains("q")) c.q = j.at("q").get<double>();
        require(c.q > 0.0 && c.q < 1.0, "q must lie in (0,1)");
        if (j.contains("times")) c.times = j.at("times").get<std::vector<double>>();
        require(!c.times.empty(), "times must be nonempty");
        for (std::size_t k = 1; k < c.times.size(); ++k)
            require(c.times[k - 1] < c.times[k], "times must be strictly increasing");
        if (j.contains("N")) c.N = j.at("N").get<long>();
        require(c.N >= 1, "N must be positive");
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("samples")) c.samples = j.at("samples").get<long>();
        require(c.samples >= 1, "samples must be positive");

        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            if (k.contains("points")) {
                for (const auto& row : k.at("points")) {
                    const auto v = row.get<std::vector<double>>();
                    require(v.size() == 4, "kernel.points rows are [t1, x1, t2, x2]");
                    c.kernel_points.push_back({v[0], v[1], v[2], v[3]});
                }
            }
            if (k.contains("grid")) {
                const auto& g = k.at("grid");
                for (double t1 : detail::axis(g, "t1"))
                    for (double x1 : detail::axis(g, "x1"))
                        for (double t2 : detail::axis(g, "t2"))
                            for (double x2 : detail::axis(g, "x2")) c.kernel_points.push_back({t1, x1, t2, x2});
            }
        }
        if (j.contains("quadrature")) {
            const auto& qd = j.at("quadrature");
            if (qd.contains("panels_per_unit")) c.quad.panels_per_unit = qd.at("panels_per_unit").get<int>();
            if (qd.contains("gauss_order")) c.quad.gauss_order = qd.at("gauss_order").get<int>();
            if (qd.contains("target_rel_err")) c.quad.target_rel_err = qd.at("target_rel_err").get<double>();
            require(c.quad.panels_per_unit >= 1 && c.quad.gauss_order >= 2, "quadrature settings out of range");
        }
        if (j.contains("fredholm")) {
            const auto& f = j.at("fredholm");
            if (f.contains("method")) c.fredholm_method = f.at("method").get<std::string>();
            require(c.fredholm_method == "nystrom" || c.fredholm_method == "series",
                    "fredholm.method must be 'nystrom' or 'series'");
            if (f.contains("nodes")) c.fredholm_nodes = f.at("nodes").get<int>();
            if (f.contains("window")) c.fredholm_window = f.at("window").get<double>();
            if (f.contains("n_max")) c.fredholm_n_max = f.at("n_max").get<int>();
            if (f.contains("time")) c.fredholm_time = f.at("time").get<double>();
            if (f.contains("t")) c.fredholm_t = f.at("t").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("malformed config: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

}  // namespace aw
