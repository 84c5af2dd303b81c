#include "heatctl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "heatctl/embedded_data.hpp"
#include "heatctl/errors.hpp"

namespace heatctl {

using nlohmann::json;

namespace {

// Walks one JSON object, tracking consumed keys so leftovers can be reported.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_ + "/" + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, at(key)) : fallback;
    }

    double required_number(const std::string& key) {
        const json* v = find(key);
        if (!v) throw ConfigError(at(key), "required field is missing");
        return as_number(*v, at(key));
    }

    int integer(const std::string& key, int fallback) {
        const json* v = find(key);
        return v ? as_int(*v, at(key)) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(at(key), "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json* v = find(key);
        return v ? as_numbers(*v, at(key)) : std::vector<double>{};
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
        return d;
    }

    static int as_int(const json& v, const std::string& path) {
        if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
        const auto i = v.get<long long>();
        if (i < -1000000000LL || i > 1000000000LL) throw ConfigError(path, "integer out of range");
        return static_cast<int>(i);
    }

    static std::vector<double> as_numbers(const json& v, const std::string& path) {
        if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
        return out;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

OutputWeightSpec parse_weight(const json& j, const std::string& path) {
    Obj o(j, path);
    OutputWeightSpec spec;
    const std::string kind = o.string("kind", "indicator");
    if (kind == "indicator") {
        spec.kind = IndicatorWeight{o.required_number("a"), o.required_number("b")};
    } else if (kind == "table") {
        const json* s = o.find("samples");
        if (!s || !s->is_array()) throw ConfigError(o.at("samples"), "expected [[x, value], ...]");
        TableWeight t;
        for (std::size_t i = 0; i < s->size(); ++i) {
            const auto p = o.at("samples") + "/" + std::to_string(i);
            const auto pair = Obj::as_numbers((*s)[i], p);
            if (pair.size() != 2) throw ConfigError(p, "expected [x, value]");
            t.samples.emplace_back(pair[0], pair[1]);
        }
        spec.kind = std::move(t);
    } else if (kind == "coeffs") {
        spec.kind = CoeffWeight{o.numbers("values")};
    } else {
        throw ConfigError(o.at("kind"), "unknown weight kind '" + kind + "' (indicator, table, coeffs)");
    }
    if (o.find("norm_sq")) spec.norm_sq_override = o.required_number("norm_sq");
    o.finish();
    return spec;
}

json weight_json(const OutputWeightSpec& spec) {
    json j;
    if (const auto* w = std::get_if<IndicatorWeight>(&spec.kind)) {
        j = {{"kind", "indicator"}, {"a", w->a}, {"b", w->b}};
    } else if (const auto* w = std::get_if<TableWeight>(&spec.kind)) {
        json s = json::array();
        for (const auto& [x, v] : w->samples) s.push_back({x, v});
        j = {{"kind", "table"}, {"samples", s}};
    } else {
        j = {{"kind", "coeffs"}, {"values", std::get<CoeffWeight>(spec.kind).values}};
    }
    if (spec.norm_sq_override) j["norm_sq"] = *spec.norm_sq_override;
    return j;
}

DelayProfile parse_profile(const json& j, const std::string& path, double base, bool allow_base) {
    Obj o(j, path);
    DelayProfile p;
    try {
        p.shape = delay_shape_from_string(o.string("shape", "constant"));
    } catch (const PreconditionError& e) {
        throw ConfigError(o.at("shape"), e.what());
    }
    p.base = allow_base ? o.number("base", base) : base;
    p.amplitude = o.number("amplitude", 0.0);
    p.omega = o.number("omega", 0.0);
    o.finish();
    return p;
}

json profile_json(const DelayProfile& p, bool with_base) {
    json j = {{"shape", to_string(p.shape)}, {"amplitude", p.amplitude}, {"omega", p.omega}};
    if (with_base) j["base"] = p.base;
    return j;
}

std::vector<double> parse_r_grid(const json& j, const std::string& path) {
    if (j.is_array()) return Obj::as_numbers(j, path);
    Obj o(j, path);
    const double from = o.required_number("from");
    const double to = o.required_number("to");
    const double step = o.required_number("step");
    o.finish();
    if (!(step > 0.0) || to < from) throw ConfigError(path, "need step > 0 and to >= from");
    const long n = std::lround(std::floor((to - from) / step + 1e-9));
    if (n > 100000) throw ConfigError(path, "grid too large");
    std::vector<double> out;
    // Rounded to 12 digits so 0.1 + 2 * 0.02 prints as 0.14.
    for (long i = 0; i <= n; ++i) out.push_back(std::round((from + i * step) * 1e12) / 1e12);
    return out;
}

}  // namespace

RunConfig RunConfig::from_json(const json& root) {
    RunConfig c;
    Obj top(root, "");
    c.name = top.string("name", "");

    if (const json* p = top.find("plant")) {
        Obj o(*p, "/plant");
        c.plant.q = o.number("q", c.plant.q);
        if (const json* w = o.find("weight")) c.plant.weight = parse_weight(*w, o.at("weight"));
        if (const json* ic = o.find("initial")) {
            Obj io(*ic, o.at("initial"));
            const std::string kind = io.string("kind", "polynomial");
            if (kind == "polynomial") c.plant.initial = PolynomialInitial{io.numbers("coeffs")};
            else if (kind == "modes") c.plant.initial = ModalInitial{io.numbers("values")};
            else throw ConfigError(io.at("kind"), "unknown initial kind '" + kind + "' (polynomial, modes)");
            io.finish();
        }
        o.finish();
    }

    if (const json* d = top.find("design")) {
        Obj o(*d, "/design");
        const bool has_delta = o.find("delta") != nullptr;
        const bool has_delta0 = o.find("delta0") != nullptr;
        c.design.delta1 = o.number("delta1", c.design.delta1);
        if (has_delta) c.design.delta = o.required_number("delta");
        if (has_delta0) {
            const double d0 = o.required_number("delta0");
            if (!has_delta) c.design.delta = d0 - c.design.delta1;
            else if (std::abs(d0 - c.design.delta0()) > 1e-12 * std::max(1.0, std::abs(d0)))
                throw ConfigError(o.at("delta0"), "delta0 must equal delta + delta1");
        }
        c.design.delta1_grid = o.numbers("delta1_grid");
        if (const json* n0 = o.find("N0")) {
            if (!(n0->is_string() && n0->get<std::string>() == "auto"))
                c.design.N0 = Obj::as_int(*n0, o.at("N0"));
        }
        if (const json* g = o.find("gains")) {
            if (!(g->is_string() && g->get<std::string>() == "auto")) {
                Obj go(*g, o.at("gains"));
                const json* k = go.find("K0");
                const json* l = go.find("L0");
                if (!k) throw ConfigError(go.at("K0"), "required field is missing");
                if (!l) throw ConfigError(go.at("L0"), "required field is missing");
                c.design.pinned = std::make_pair(Obj::as_numbers(*k, go.at("K0")),
                                                 Obj::as_numbers(*l, go.at("L0")));
                go.finish();
            }
        }
        c.design.design_margin = o.number("design_margin", c.design.design_margin);
        o.finish();
    }

    if (const json* d = top.find("delays")) {
        Obj o(*d, "/delays");
        c.delays.r = o.number("r", 0.0);
        c.delays.thetaM = o.number("thetaM", 0.0);
        c.delays.tau_m = o.number("tau_m", 0.0);
        c.delays.tauM = o.number("tauM", 0.0);
        c.delays.input_known = o.boolean("input_known", true);
        c.delays.tau_u.base = c.delays.r;
        c.delays.tau_y.base = c.delays.tau_m;
        if (const json* p = o.find("tau_u")) c.delays.tau_u = parse_profile(*p, o.at("tau_u"), c.delays.r, false);
        if (const json* p = o.find("tau_y")) c.delays.tau_y = parse_profile(*p, o.at("tau_y"), c.delays.tau_m, true);
        o.finish();
    }

    if (const json* s = top.find("search")) {
        Obj o(*s, "/search");
        c.search.theorem = o.integer("theorem", c.search.theorem);
        if (o.find("N")) c.search.N = o.integer("N", 0);
        c.search.N_max = o.integer("N_max", c.search.N_max);
        if (const json* g = o.find("r_grid")) c.search.r_grid = parse_r_grid(*g, o.at("r_grid"));
        const std::string strat = o.string("r_strategy", "bisect");
        if (strat == "bisect") c.search.r_strategy = SearchOptions::RStrategy::Bisect;
        else if (strat == "scan") c.search.r_strategy = SearchOptions::RStrategy::Scan;
        else throw ConfigError(o.at("r_strategy"), "expected 'bisect' or 'scan'");
        const std::string nstrat = o.string("n_strategy", "scan");
        if (nstrat == "scan") c.search.n_strategy = SearchOptions::NStrategy::Scan;
        else if (nstrat == "bisect") c.search.n_strategy = SearchOptions::NStrategy::Bisect;
        else throw ConfigError(o.at("n_strategy"), "expected 'scan' or 'bisect'");
        c.search.find_min_N = o.boolean("find_min_N", true);
        o.finish();
    }

    if (const json* s = top.find("sim")) {
        Obj o(*s, "/sim");
        c.sim.M = o.integer("M", c.sim.M);
        if (o.find("N")) c.sim.N = o.integer("N", 0);
        c.sim.h = o.number("h", c.sim.h);
        c.sim.T = o.number("T", c.sim.T);
        const std::string mode = o.string("controller_mode", "static");
        if (mode == "static") c.sim.mode = ControllerMode::Static;
        else if (mode == "predictor") c.sim.mode = ControllerMode::Predictor;
        else throw ConfigError(o.at("controller_mode"), "expected 'static' or 'predictor'");
        c.sim.record_every = o.integer("record_every", c.sim.record_every);
        c.sim.divergence_factor = o.number("divergence_factor", c.sim.divergence_factor);
        if (const json* w = o.find("fit_window")) {
            const auto v = Obj::as_numbers(*w, o.at("fit_window"));
            if (v.size() != 2) throw ConfigError(o.at("fit_window"), "expected [t_a, t_b]");
            c.sim.fit_window = std::make_pair(v[0], v[1]);
        }
        o.finish();
    }

    if (const json* s = top.find("solver")) {
        Obj o(*s, "/solver");
        c.solver.strictness = o.number("strictness", c.solver.strictness);
        c.solver.tol = o.number("tol", c.solver.tol);
        c.solver.max_iter = o.integer("max_iter", c.solver.max_iter);
        c.solver.time_limit = o.number("time_limit", c.solver.time_limit);
        o.finish();
    }
    top.finish();
    c.validate();
    return c;
}

json RunConfig::to_json() const {
    json j;
    j["name"] = name;
    json initial;
    if (const auto* p = std::get_if<PolynomialInitial>(&plant.initial))
        initial = {{"kind", "polynomial"}, {"coeffs", p->coeffs}};
    else
        initial = {{"kind", "modes"}, {"values", std::get<ModalInitial>(plant.initial).values}};
    j["plant"] = {{"q", plant.q}, {"weight", weight_json(plant.weight)}, {"initial", initial}};

    json d = {{"delta", design.delta}, {"delta1", design.delta1}, {"delta1_grid", design.delta1_grid},
              {"design_margin", design.design_margin}};
    d["N0"] = design.N0 ? json(*design.N0) : json("auto");
    d["gains"] = design.pinned ? json{{"K0", design.pinned->first}, {"L0", design.pinned->second}}
                               : json("auto");
    j["design"] = d;

    j["delays"] = {{"r", delays.r},
                   {"thetaM", delays.thetaM},
                   {"tau_m", delays.tau_m},
                   {"tauM", delays.tauM},
                   {"input_known", delays.input_known},
                   {"tau_u", profile_json(delays.tau_u, false)},
                   {"tau_y", profile_json(delays.tau_y, true)}};

    json s = {{"theorem", search.theorem},
              {"N_max", search.N_max},
              {"r_grid", search.r_grid},
              {"r_strategy", search.r_strategy == SearchOptions::RStrategy::Bisect ? "bisect" : "scan"},
              {"n_strategy", search.n_strategy == SearchOptions::NStrategy::Bisect ? "bisect" : "scan"},
              {"find_min_N", search.find_min_N}};
    if (search.N) s["N"] = *search.N;
    j["search"] = s;

    json sm = {{"M", sim.M},
               {"h", sim.h},
               {"T", sim.T},
               {"controller_mode", to_string(sim.mode)},
               {"record_every", sim.record_every},
               {"divergence_factor", sim.divergence_factor}};
    if (sim.N) sm["N"] = *sim.N;
    if (sim.fit_window) sm["fit_window"] = {sim.fit_window->first, sim.fit_window->second};
    j["sim"] = sm;

    j["solver"] = {{"strictness", solver.strictness},
                   {"tol", solver.tol},
                   {"max_iter", solver.max_iter},
                   {"time_limit", solver.time_limit}};
    return j;
}

void RunConfig::validate() const {
    try {
        plant.weight.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError("/plant/weight", e.what());
    }
    if (design.delta < 0.0) throw ConfigError("/design/delta", "decay rate must be nonnegative");
    if (design.delta1 < 0.0) throw ConfigError("/design/delta1", "must be nonnegative");
    for (std::size_t i = 0; i < design.delta1_grid.size(); ++i)
        if (!(design.delta1_grid[i] > 0.0))
            throw ConfigError("/design/delta1_grid/" + std::to_string(i), "must be positive");
    if (!(design.design_margin >= 0.0)) throw ConfigError("/design/design_margin", "must be nonnegative");

    const int auto_N0 = select_N0(plant.q, design.delta);
    if (design.N0) {
        if (*design.N0 < 0) throw ConfigError("/design/N0", "must be nonnegative");
        if (*design.N0 != auto_N0) {
            std::ostringstream os;
            os << "N0 override " << *design.N0 << " differs from the automatic choice " << auto_N0;
            warn(os.str());
        }
    }
    const int N0 = resolved_N0();
    if (design.pinned) {
        const auto want = static_cast<std::size_t>(N0) + 1;
        if (design.pinned->first.size() != want)
            throw ConfigError("/design/gains/K0", "length must be N0 + 1 = " + std::to_string(want));
        if (design.pinned->second.size() != want)
            throw ConfigError("/design/gains/L0", "length must be N0 + 1 = " + std::to_string(want));
    }

    if (search.theorem < 1 || search.theorem > 4) throw ConfigError("/search/theorem", "must be 1, 2, 3 or 4");
    if (search.N_max < N0 + 1) throw ConfigError("/search/N_max", "must be at least N0 + 1");
    if (search.N && *search.N < N0 + 1) throw ConfigError("/search/N", "must be at least N0 + 1");
    for (std::size_t i = 0; i < search.r_grid.size(); ++i) {
        if (search.r_grid[i] < 0.0)
            throw ConfigError("/search/r_grid/" + std::to_string(i), "must be nonnegative");
        if (i > 0 && !(search.r_grid[i] > search.r_grid[i - 1]))
            throw ConfigError("/search/r_grid/" + std::to_string(i), "grid must be strictly ascending");
    }

    DelaySpec ds{delays.r, delays.thetaM, delays.tau_m, delays.tauM, delays.input_known,
                 delays.tau_u, delays.tau_y};
    try {
        ds.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError("/delays", e.what());
    }

    const int simN = sim.N.value_or(search.N.value_or(search.N_max));
    if (sim.M < simN) throw ConfigError("/sim/M", "must be at least the observer dimension");
    if (sim.N && *sim.N < N0 + 1) throw ConfigError("/sim/N", "must be at least N0 + 1");
    if (!(sim.h > 0.0)) throw ConfigError("/sim/h", "must be positive");
    if (!(sim.T > 0.0)) throw ConfigError("/sim/T", "must be positive");
    if (sim.record_every < 1) throw ConfigError("/sim/record_every", "must be positive");
    if (!(sim.divergence_factor > 0.0)) throw ConfigError("/sim/divergence_factor", "must be positive");
    if (sim.fit_window && !(sim.fit_window->second > sim.fit_window->first))
        throw ConfigError("/sim/fit_window", "need t_a < t_b");

    if (solver.strictness < 0.0) throw ConfigError("/solver/strictness", "must be nonnegative");
    if (!(solver.tol > 0.0)) throw ConfigError("/solver/tol", "must be positive");
    if (solver.max_iter < 1) throw ConfigError("/solver/max_iter", "must be positive");
    if (solver.time_limit < 0.0) throw ConfigError("/solver/time_limit", "must be nonnegative");
}

int RunConfig::resolved_N0() const {
    return design.N0 ? *design.N0 : select_N0(plant.q, design.delta);
}

ModalModel RunConfig::model(int M) const { return make_modal_model(plant.q, plant.weight, M); }

GainSet RunConfig::gains(const ModalModel& m) const {
    const int N0 = resolved_N0();
    if (design.pinned) {
        const auto& [k, l] = *design.pinned;
        return pin_gains(m, N0, design.delta, Eigen::Map<const Vector>(k.data(), k.size()),
                         Eigen::Map<const Vector>(l.data(), l.size()));
    }
    GainDesignOptions opts;
    opts.design_margin = design.design_margin;
    opts.solver.tol = solver.tol;
    opts.solver.max_iter = solver.max_iter;
    const auto ctrl = design_controller_gain(m, N0, design.delta, opts);
    const auto obs = design_observer_gain(m, N0, design.delta, opts);
    GainSet g;
    g.N0 = N0;
    g.K0 = ctrl.K0;
    g.L0 = obs.L0;
    g.delta = design.delta;
    g.Pc = ctrl.Pc;
    g.Po = obs.Po;
    return g;
}

TheoremParams RunConfig::theorem_params() const {
    TheoremParams p;
    p.theorem = search.theorem;
    p.delays = {delays.r, delays.thetaM, delays.tauM};
    p.rates = {design.delta, design.delta1};
    p.strictness = solver.strictness;
    p.delta1_grid = design.delta1_grid;
    return p;
}

SearchOptions RunConfig::search_options(int jobs) const {
    SearchOptions o;
    o.jobs = jobs;
    o.solver.tol = solver.tol;
    o.solver.max_iter = solver.max_iter;
    o.solver.time_limit = solver.time_limit;
    o.r_strategy = search.r_strategy;
    o.n_strategy = search.n_strategy;
    o.find_min_N = search.find_min_N;
    return o;
}

std::vector<double> RunConfig::initial_modes(int M) const {
    if (const auto* p = std::get_if<PolynomialInitial>(&plant.initial))
        return project_initial_polynomial(p->coeffs, M);
    std::vector<double> z(static_cast<std::size_t>(M) + 1, 0.0);
    const auto& v = std::get<ModalInitial>(plant.initial).values;
    for (std::size_t n = 0; n < v.size() && n < z.size(); ++n) z[n] = v[n];
    return z;
}

SimConfig RunConfig::sim_config(const ModalModel& m, const GainSet& g) const {
    SimConfig s;
    s.model = m;
    s.gains = g;
    s.N = sim.N.value_or(search.N.value_or(search.N_max));
    s.delays = {delays.r, delays.thetaM, delays.tau_m, delays.tauM, delays.input_known,
                delays.tau_u, delays.tau_y};
    s.mode = sim.mode;
    s.z0 = initial_modes(m.truncation);
    s.h = sim.h;
    s.T = sim.T;
    s.record_every = sim.record_every;
    s.divergence_factor = sim.divergence_factor;
    return s;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", origin + ": invalid JSON: " + e.what());
    }
    return RunConfig::from_json(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [key, text] : embedded_files())
        if (key.rfind("presets/", 0) == 0) out.push_back(key.substr(8, key.size() - 8 - 5));
    return out;
}

const std::string& preset_text(const std::string& name) {
    static const std::map<std::string, std::string> table = [] {
        std::map<std::string, std::string> t;
        for (const auto& [key, text] : embedded_files())
            if (key.rfind("presets/", 0) == 0) t.emplace(key.substr(8, key.size() - 8 - 5), text);
        return t;
    }();
    auto it = table.find(name);
    if (it == table.end()) throw ConfigError("/", "unknown preset '" + name + "'");
    return it->second;
}

RunConfig preset(const std::string& name) { return parse_config(preset_text(name), "preset:" + name); }

RunConfig resolve_config(const std::string& spec) {
    if (spec.rfind("preset:", 0) == 0) return preset(spec.substr(7));
    return load_config(spec);
}

}  // namespace heatctl
