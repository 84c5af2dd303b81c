#include "heatctl/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatctl/config.hpp"
#include "heatctl/errors.hpp"
#include "heatctl/halanay.hpp"
#include "heatctl/lmi.hpp"
#include "heatctl/modal.hpp"
#include "heatctl/reproduce.hpp"
#include "heatctl/sim.hpp"

namespace heatctl {

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::optional<int> theorem;
    std::string out;
    int jobs = 0;
    std::optional<double> strictness;
    int table = 0;
};

// Primary output sink: --out file when given, else the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ConfigError("/", "cannot write '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }
    [[nodiscard]] bool to_file() const { return file_ != nullptr; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

RunConfig load(const Flags& f) {
    if (f.config.empty()) throw ConfigError("/", "--config is required");
    RunConfig c = resolve_config(f.config);
    if (f.theorem) c.search.theorem = *f.theorem;
    if (f.strictness) c.solver.strictness = *f.strictness;
    c.validate();
    return c;
}

int lmi_truncation(const RunConfig& c) {
    return std::max({c.search.N_max, c.search.N.value_or(0), 50}) + 1;
}

void write_probes_csv(std::ostream& os, const std::vector<NProbe>& probes) {
    const auto old = os.precision(17);
    os << "N,r,delta1,status,margin,iterations\n";
    for (const auto& p : probes)
        os << p.N << ',' << p.r << ',' << p.delta1 << ',' << to_string(p.status) << ',' << p.margin << ','
           << p.iterations << '\n';
    os.precision(old);
}

int cmd_modal(const Flags& f, std::ostream& out) {
    const RunConfig c = load(f);
    const int Nmax = c.search.N_max;
    const auto m = c.model(Nmax + 1);
    json modes = json::array();
    for (int n = 0; n <= Nmax + 1; ++n)
        modes.push_back({{"n", n}, {"lambda", m.lambdas[n]}, {"b", m.b[n]}, {"c", m.c[n]}});
    json tails = json::array();
    for (int N = 0; N <= Nmax; ++N) {
        json row = {{"N", N}, {"c_tail_norm_sq", m.tail_norm_sq(N)}};
        row["b_tail_bound"] = N >= 1 ? json(tail_input_bound(N)) : json(nullptr);
        tails.push_back(row);
    }
    const json j = {{"q", c.plant.q},
                    {"delta", c.design.delta},
                    {"N0", c.resolved_N0()},
                    {"N0_auto", select_N0(c.plant.q, c.design.delta)},
                    {"c_norm_sq", m.c_norm_sq},
                    {"modes", modes},
                    {"tails", tails}};
    Sink s(f.out, out);
    *s << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_design(const Flags& f, std::ostream& out) {
    const RunConfig c = load(f);
    const auto m = c.model(std::max(c.resolved_N0() + 1, 1));
    const auto g = c.gains(m);
    const auto mg = verify_gains(g, m);
    const json j = {{"gains", g.to_json()},
                    {"pinned", c.design.pinned.has_value()},
                    {"margins",
                     {{"controller", mg.controller},
                      {"observer", mg.observer},
                      {"controller_tol", mg.controller_tol},
                      {"observer_tol", mg.observer_tol},
                      {"ok", mg.ok()}}}};
    Sink s(f.out, out);
    *s << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_check(const Flags& f, std::ostream& out) {
    const RunConfig c = load(f);
    if (!c.search.N) throw ConfigError("/search/N", "check needs an observer dimension");
    const int N = *c.search.N;
    const auto m = c.model(lmi_truncation(c));
    const auto g = c.gains(m);
    TheoremParams p = c.theorem_params();
    std::vector<double> grid = p.delta1_grid;
    if (p.theorem == 1 || grid.empty()) grid = {p.rates.delta1};
    const auto sopts = c.search_options(f.jobs);

    json attempts = json::array();
    json report;
    bool any_failure = false;
    FeasStatus status = FeasStatus::Infeasible;
    double used = grid.front();
    for (double d1 : grid) {
        p.rates.delta1 = d1;
        const auto inst = assemble_theorem(m, g, N, p);
        const auto rep = check_feasibility(inst, sopts.solver);
        attempts.push_back({{"delta1", d1}, {"status", to_string(rep.status)}, {"margin", rep.margin},
                            {"t_star", rep.t_star}, {"solver_status", rep.solver_status}});
        used = d1;
        report = rep.to_json(inst);
        if (rep.status == FeasStatus::Feasible) {
            status = FeasStatus::Feasible;
            break;
        }
        any_failure = any_failure || rep.status == FeasStatus::SolverFailure;
    }
    if (status != FeasStatus::Feasible && any_failure) status = FeasStatus::SolverFailure;
    const json j = {{"theorem", p.theorem}, {"N", N},          {"r", p.delays.r},
                    {"thetaM", p.delays.thetaM}, {"tauM", p.delays.tauM}, {"delta", p.rates.delta},
                    {"delta1", used}, {"status", to_string(status)}, {"attempts", attempts},
                    {"report", report}};
    Sink s(f.out, out);
    *s << j.dump(2) << '\n';
    return status == FeasStatus::SolverFailure ? kExitSolver : kExitOk;
}

int cmd_sweep_n(const Flags& f, std::ostream& out) {
    const RunConfig c = load(f);
    const auto m = c.model(lmi_truncation(c));
    const auto g = c.gains(m);
    const auto res = min_feasible_N(m, g, c.theorem_params(), c.search.N_max, c.search_options(f.jobs));
    const bool failed = !res.N && std::any_of(res.probes.begin(), res.probes.end(), [](const NProbe& p) {
        return p.status == FeasStatus::SolverFailure;
    });
    Sink s(f.out, out);
    write_probes_csv(*s, res.probes);
    if (s.to_file()) {
        json summary = {{"theorem", c.search.theorem}, {"r", c.delays.r}, {"N_max", c.search.N_max},
                        {"N_min", res.N ? json(*res.N) : json(nullptr)}, {"solver_failure", failed}};
        out << summary.dump(2) << '\n';
    }
    return failed ? kExitSolver : kExitOk;
}

int cmd_sweep_r(const Flags& f, std::ostream& out) {
    const RunConfig c = load(f);
    if (c.search.r_grid.empty()) throw ConfigError("/search/r_grid", "sweep-r needs an r grid");
    const auto m = c.model(lmi_truncation(c));
    const auto g = c.gains(m);
    const auto res = max_feasible_r(m, g, c.theorem_params(), c.search.r_grid, c.search.N_max,
                                    c.search_options(f.jobs));
    const bool failed = !res.r && std::any_of(res.probes.begin(), res.probes.end(), [](const NProbe& p) {
        return p.status == FeasStatus::SolverFailure;
    });
    Sink s(f.out, out);
    write_probes_csv(*s, res.probes);
    if (s.to_file()) {
        json summary = {{"theorem", c.search.theorem},
                        {"N_max", c.search.N_max},
                        {"r_max", res.r ? json(*res.r) : json(nullptr)},
                        {"N", res.N ? json(*res.N) : json(nullptr)},
                        {"solver_failure", failed}};
        out << summary.dump(2) << '\n';
    }
    return failed ? kExitSolver : kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out) {
    const RunConfig c = load(f);
    const auto m = c.model(c.sim.M);
    const auto g = c.gains(m);
    const auto cfg = c.sim_config(m, g);
    const auto tr = simulate(cfg);

    const auto window = c.sim.fit_window.value_or(std::make_pair(0.5 * c.sim.T, c.sim.T));
    json fitted = nullptr;
    try {
        fitted = fit_decay_rate(tr, window);
    } catch (const PreconditionError&) {
        // trace stopped before the window closed
    }
    json predicted = nullptr;
    try {
        const double delta = std::max(c.design.delta, kDeltaFloor);
        predicted = solve_decay_rate({delta + c.design.delta1, c.design.delta1, c.delays.tauM});
    } catch (const DomainError&) {
    }
    json events = json::array();
    for (const auto& e : tr.events) events.push_back({{"t", e.t}, {"kind", e.kind}, {"message", e.message}});
    const json summary = {
        {"controller_mode", to_string(cfg.mode)},
        {"M", cfg.model.truncation},
        {"N", cfg.N},
        {"r", cfg.delays.r},
        {"h", cfg.h},
        {"T", cfg.T},
        {"completed", tr.completed},
        {"diverged", tr.diverged},
        {"divergence_time", tr.divergence_time ? json(*tr.divergence_time) : json(nullptr)},
        {"final_time", tr.times.empty() ? json(nullptr) : json(tr.times.back())},
        {"final_norm_z", tr.norm_z.empty() ? json(nullptr) : json(tr.norm_z.back())},
        {"final_norm_err", tr.norm_err.empty() ? json(nullptr) : json(tr.norm_err.back())},
        {"fit_window", {window.first, window.second}},
        {"fitted_rate", fitted},
        {"predicted_rate", predicted},
        {"events", events}};
    if (!f.out.empty()) {
        Sink s(f.out, out);
        tr.write_csv(*s);
    }
    out << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_reproduce(const Flags& f, std::ostream& out, std::ostream& err) {
    ReproduceOptions opts;
    opts.search.jobs = f.jobs;
    opts.strictness = f.strictness;
    if (f.theorem) opts.theorems = {*f.theorem};
    opts.progress = [&err](const std::string& line) { err << line << std::endl; };
    Sink s(f.out, out);
    switch (f.table) {
        case 1: write_table1_csv(*s, reproduce_table1(opts)); break;
        case 2: write_table2_csv(*s, reproduce_table2(opts)); break;
        case 3: write_table3_csv(*s, reproduce_table3(opts)); break;
        default: throw ConfigError("/", "table must be 1, 2 or 3");
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Observer-based delayed control of the 1D heat equation: gains, LMIs, simulation"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&f](CLI::App* sub, bool config) {
        auto* opt = sub->add_option("--config", f.config, "JSON config file or preset:<name>");
        if (config) opt->required();
        sub->add_option("--theorem", f.theorem, "theorem 1-4")->check(CLI::Range(1, 4));
        sub->add_option("--out", f.out, "output path");
        sub->add_option("--jobs", f.jobs, "parallel LMI instances")->check(CLI::NonNegativeNumber);
        sub->add_option("--strictness", f.strictness, "absolute epsilon for strict LMIs")
            ->check(CLI::PositiveNumber);
    };
    auto* modal = app.add_subcommand("modal", "modal data and tail bounds");
    auto* design = app.add_subcommand("design", "controller and observer gains");
    auto* check = app.add_subcommand("check", "feasibility of one LMI instance");
    auto* sweep_n = app.add_subcommand("sweep-n", "smallest feasible observer dimension");
    auto* sweep_r = app.add_subcommand("sweep-r", "largest feasible input delay");
    auto* sim = app.add_subcommand("simulate", "closed-loop simulation");
    auto* repro = app.add_subcommand("reproduce", "recompute a result table");
    for (auto* sub : {modal, design, check, sweep_n, sweep_r, sim}) add_common(sub, true);
    add_common(repro, false);
    repro->add_option("table", f.table, "table id")->required()->check(CLI::Range(1, 3));
    auto* presets = app.add_subcommand("presets", "list built-in presets");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*modal) return cmd_modal(f, out);
        if (*design) return cmd_design(f, out);
        if (*check) return cmd_check(f, out);
        if (*sweep_n) return cmd_sweep_n(f, out);
        if (*sweep_r) return cmd_sweep_r(f, out);
        if (*sim) return cmd_simulate(f, out);
        if (*repro) return cmd_reproduce(f, out, err);
        if (*presets) {
            for (const auto& n : preset_names()) out << n << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitConfig;
}

}  // namespace heatctl
