#include "heatctl/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "heatctl/embedded_data.hpp"
#include "heatctl/errors.hpp"

namespace heatctl {

using nlohmann::json;

namespace {

std::optional<int> opt_int(const json& j) {
    return j.is_null() ? std::nullopt : std::optional<int>(j.get<int>());
}

std::optional<double> opt_double(const json& j) {
    return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

template <class T>
bool accepts(const std::vector<T>& filter, T v) {
    if (filter.empty()) return true;
    return std::any_of(filter.begin(), filter.end(),
                       [v](T f) { return std::abs(static_cast<double>(f) - static_cast<double>(v)) <
                                         1e-12 * std::max(1.0, std::abs(static_cast<double>(v))); });
}

bool any_failure(const std::vector<NProbe>& probes) {
    return std::any_of(probes.begin(), probes.end(),
                       [](const NProbe& p) { return p.status == FeasStatus::SolverFailure; });
}

RunConfig base_config(const json& table, const ReproduceOptions& opts) {
    RunConfig c = preset(table.at("preset").get<std::string>());
    if (opts.strictness) c.solver.strictness = *opts.strictness;
    return c;
}

SearchOptions search_for(const RunConfig& c, const ReproduceOptions& opts) {
    SearchOptions s = opts.search;
    if (c.solver.time_limit > 0.0 && s.solver.time_limit == 0.0) s.solver.time_limit = c.solver.time_limit;
    return s;
}

std::string fmt_opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "-"; }

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::setprecision(17) << *v;
    return os.str();
}

void say(const ReproduceOptions& opts, const std::string& line) {
    if (opts.progress) opts.progress(line);
}

}  // namespace

const json& reference_tables() {
    static const json ref = [] {
        for (const auto& [key, text] : embedded_files())
            if (key == "reference/tables.json") return json::parse(text);
        throw std::logic_error("reference tables are not embedded");
    }();
    return ref;
}

bool Table1Row::match() const { return N && std::abs(*N - N_paper) <= 1; }

bool Table2Row::match() const {
    if (!N_paper) return !N && !solver_failure;
    return N && std::abs(*N - *N_paper) <= 2;
}

double Table3Row::tolerance() const { return bound < 1e-3 ? 0.03 : 0.02; }

bool Table3Row::match() const {
    if (!r_paper) return !r && !solver_failure;
    return r && std::abs(*r - *r_paper) <= tolerance() + 1e-12;
}

std::vector<Table1Row> reproduce_table1(const ReproduceOptions& opts) {
    const auto& t = reference_tables().at("table1");
    std::vector<Table1Row> rows;
    auto one = [&](const json& col, bool excluded) {
        Table1Row row;
        row.delta = col.at("delta").get<double>();
        row.K0 = col.at("K0").get<double>();
        row.L0 = col.at("L0").get<double>();
        row.N_paper = col.at("N").get<int>();
        row.excluded = excluded;
        if (excluded) {
            row.note = col.value("reason", "");
            return row;
        }
        RunConfig c = base_config(t, opts);
        c.design.delta = row.delta;
        c.design.pinned = std::make_pair(std::vector<double>{row.K0}, std::vector<double>{row.L0});
        c.validate();
        const auto model = c.model(std::max(c.search.N_max + 1, 50));
        const auto gains = c.gains(model);
        const auto res = min_feasible_N(model, gains, c.theorem_params(), c.search.N_max, search_for(c, opts));
        row.N = res.N;
        row.probes = res.probes;
        row.solver_failure = !res.N && any_failure(res.probes);
        return row;
    };
    for (const auto& col : t.at("columns")) {
        rows.push_back(one(col, false));
        const auto& r = rows.back();
        say(opts, "table1 delta=" + fmt_opt(std::optional<double>(r.delta)) + " N=" + fmt_opt(r.N) +
                      " paper=" + std::to_string(r.N_paper));
    }
    for (const auto& col : t.at("excluded")) rows.push_back(one(col, true));
    return rows;
}

std::vector<Table2Row> reproduce_table2(const ReproduceOptions& opts) {
    const auto& t = reference_tables().at("table2");
    const auto rs = t.at("r").get<std::vector<double>>();
    std::vector<Table2Row> rows;
    for (const auto& spec : t.at("rows")) {
        for (int th : spec.at("theorems").get<std::vector<int>>()) {
            if (!accepts(opts.theorems, th)) continue;
            for (std::size_t i = 0; i < rs.size(); ++i) {
                if (!accepts(opts.r_values, rs[i])) continue;
                RunConfig c = base_config(t, opts);
                c.search.theorem = th;
                c.delays.r = rs[i];
                c.delays.tau_u.base = rs[i];
                c.validate();
                const auto model = c.model(std::max(c.search.N_max + 1, 50));
                const auto gains = c.gains(model);
                Table2Row row;
                row.label = spec.at("label").get<std::string>();
                row.theorem = th;
                row.r = rs[i];
                row.N_paper = opt_int(spec.at("N").at(i));
                row.N_max = c.search.N_max;
                const auto res =
                    min_feasible_N(model, gains, c.theorem_params(), c.search.N_max, search_for(c, opts));
                row.N = res.N;
                row.probes = res.probes;
                row.solver_failure = !res.N && any_failure(res.probes);
                say(opts, "table2 theorem=" + std::to_string(th) + " r=" + fmt_opt(std::optional<double>(rs[i])) +
                              " N=" + fmt_opt(row.N) + " paper=" + fmt_opt(row.N_paper));
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<Table3Row> reproduce_table3(const ReproduceOptions& opts) {
    const auto& t = reference_tables().at("table3");
    std::vector<Table3Row> rows;
    for (const auto& cell : t.at("cells")) {
        Table3Row row;
        row.bound = cell.at("bound").get<double>();
        row.theorem = cell.at("theorem").get<int>();
        if (!accepts(opts.theorems, row.theorem) || !accepts(opts.bounds, row.bound)) continue;
        row.r_paper = opt_double(cell.at("r"));
        row.N_paper = opt_int(cell.at("N"));
        row.N_max = cell.at("N_max").get<int>();
        RunConfig c = base_config(t, opts);
        c.search.theorem = row.theorem;
        c.search.N_max = row.N_max;
        c.delays.thetaM = row.bound;
        c.delays.tauM = row.bound;
        c.validate();
        const auto model = c.model(std::max(c.search.N_max + 1, 50));
        const auto gains = c.gains(model);
        const auto res =
            max_feasible_r(model, gains, c.theorem_params(), c.search.r_grid, row.N_max, search_for(c, opts));
        row.r = res.r;
        row.N = res.N;
        row.probes = res.probes;
        row.solver_failure = !res.r && any_failure(res.probes);
        say(opts, "table3 bound=" + fmt_opt(std::optional<double>(row.bound)) + " theorem=" +
                      std::to_string(row.theorem) + " r=" + fmt_opt(row.r) + " N=" + fmt_opt(row.N) +
                      " paper r=" + fmt_opt(row.r_paper));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
    const auto old = os.precision(17);
    os << "delta,K0,L0,N_paper,N_computed,match,note\n";
    for (const auto& r : rows) {
        os << r.delta << ',' << r.K0 << ',' << r.L0 << ',' << r.N_paper << ',';
        if (r.excluded) {
            os << "-,excluded," << r.note << '\n';
            continue;
        }
        os << fmt_opt(r.N) << ',' << (r.match() ? "yes" : "no") << ','
           << (r.solver_failure ? "solver failure" : "") << '\n';
    }
    os.precision(old);
}

void write_table2_csv(std::ostream& os, const std::vector<Table2Row>& rows) {
    const auto old = os.precision(17);
    os << "row,theorem,r,N_paper,N_computed,N_max,match,note\n";
    for (const auto& r : rows)
        os << r.label << ',' << r.theorem << ',' << r.r << ',' << fmt_opt(r.N_paper) << ','
           << fmt_opt(r.N) << ',' << r.N_max << ',' << (r.match() ? "yes" : "no") << ','
           << (r.solver_failure ? "solver failure" : "") << '\n';
    os.precision(old);
}

void write_table3_csv(std::ostream& os, const std::vector<Table3Row>& rows) {
    const auto old = os.precision(17);
    os << "tauM_thetaM,theorem,r_paper,N_paper,r_computed,N_computed,N_max,tolerance,match,note\n";
    for (const auto& r : rows)
        os << r.bound << ',' << r.theorem << ',' << fmt_opt(r.r_paper) << ',' << fmt_opt(r.N_paper) << ','
           << fmt_opt(r.r) << ',' << fmt_opt(r.N) << ',' << r.N_max << ',' << r.tolerance() << ','
           << (r.match() ? "yes" : "no") << ',' << (r.solver_failure ? "solver failure" : "") << '\n';
    os.precision(old);
}

}  // namespace heatctl
