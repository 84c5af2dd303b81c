#pragma once

// JSON run configuration shared by the command-line tool and the acceptance
// harness. Parsing is strict: unknown keys and wrong types are ConfigErrors
// carrying a JSON pointer to the offending field.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heatctl/feasibility.hpp"
#include "heatctl/gains.hpp"
#include "heatctl/lmi.hpp"
#include "heatctl/modal.hpp"
#include "heatctl/sim.hpp"

namespace heatctl {

struct PolynomialInitial {
    std::vector<double> coeffs;  // z0(x) = sum_k coeffs[k] x^k
};
struct ModalInitial {
    std::vector<double> values;  // z_n(0), missing entries are zero
};

struct PlantConfig {
    double q = 3.0;
    OutputWeightSpec weight{IndicatorWeight{0.3, 0.9}, std::nullopt};
    std::variant<PolynomialInitial, ModalInitial> initial = PolynomialInitial{{0, 0, 10, -20, 10}};
};

struct DesignConfig {
    double delta = 0.0;
    double delta1 = 1.0;
    std::vector<double> delta1_grid;  // empty: delta1 only
    std::optional<int> N0;            // empty: auto
    std::optional<std::pair<std::vector<double>, std::vector<double>>> pinned;  // (K0, L0)
    double design_margin = 1.0;

    [[nodiscard]] double delta0() const { return delta + delta1; }
};

struct DelayConfig {
    double r = 0.0;
    double thetaM = 0.0;
    double tau_m = 0.0;
    double tauM = 0.0;
    bool input_known = true;
    DelayProfile tau_u;  // base is always r
    DelayProfile tau_y;
};

struct SearchConfig {
    int theorem = 1;
    std::optional<int> N;  // instance for `check`
    int N_max = 30;
    std::vector<double> r_grid;
    SearchOptions::RStrategy r_strategy = SearchOptions::RStrategy::Bisect;
    SearchOptions::NStrategy n_strategy = SearchOptions::NStrategy::Scan;
    bool find_min_N = true;
};

struct SimSection {
    int M = 50;
    std::optional<int> N;  // default: search.N, then search.N_max
    double h = 1e-4;
    double T = 8.0;
    ControllerMode mode = ControllerMode::Static;
    int record_every = 10;
    double divergence_factor = 1e6;
    std::optional<std::pair<double, double>> fit_window;  // default: [T/2, T]
};

struct SolverConfig {
    double strictness = 0.0;  // 0: default rule
    double tol = 1e-8;
    int max_iter = 150;
    double time_limit = 0.0;  // seconds per instance
};

struct RunConfig {
    std::string name;
    PlantConfig plant;
    DesignConfig design;
    DelayConfig delays;
    SearchConfig search;
    SimSection sim;
    SolverConfig solver;

    [[nodiscard]] nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);  // throws ConfigError

    // Cross-field checks; warnings go through heatctl::warn.
    void validate() const;

    [[nodiscard]] int resolved_N0() const;
    [[nodiscard]] ModalModel model(int M) const;
    [[nodiscard]] GainSet gains(const ModalModel& model) const;  // pinned or synthesized
    [[nodiscard]] TheoremParams theorem_params() const;
    [[nodiscard]] SearchOptions search_options(int jobs) const;
    [[nodiscard]] SimConfig sim_config(const ModalModel& model, const GainSet& gains) const;
    [[nodiscard]] std::vector<double> initial_modes(int M) const;
};

[[nodiscard]] RunConfig load_config(const std::string& path);
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

// Built-in presets, stored as JSON files and compiled in.
[[nodiscard]] std::vector<std::string> preset_names();
[[nodiscard]] const std::string& preset_text(const std::string& name);  // throws ConfigError
[[nodiscard]] RunConfig preset(const std::string& name);

// Loads `spec` as a file path, or as "preset:<name>".
[[nodiscard]] RunConfig resolve_config(const std::string& spec);

}  // namespace heatctl
