#pragma once

// Recomputes the worked example's three result tables from the built-in
// presets and the embedded reference values.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatctl/config.hpp"
#include "heatctl/lmi.hpp"

namespace heatctl {

[[nodiscard]] const nlohmann::json& reference_tables();

using ProgressFn = std::function<void(const std::string&)>;

struct ReproduceOptions {
    SearchOptions search;
    std::optional<double> strictness;  // overrides the preset
    ProgressFn progress;                // one line per finished row
    // Row filters; empty accepts everything.
    std::vector<int> theorems;
    std::vector<double> r_values;
    std::vector<double> bounds;
};

struct Table1Row {
    double delta = 0.0;
    double K0 = 0.0;
    double L0 = 0.0;
    int N_paper = 0;
    std::optional<int> N;
    bool solver_failure = false;
    bool excluded = false;
    std::string note;
    std::vector<NProbe> probes;

    [[nodiscard]] bool match() const;  // within one
};

struct Table2Row {
    std::string label;
    int theorem = 0;
    double r = 0.0;
    std::optional<int> N_paper;  // empty: paper reports no feasible N
    std::optional<int> N;
    int N_max = 30;
    bool solver_failure = false;
    std::vector<NProbe> probes;

    [[nodiscard]] bool match() const;  // within two, or both empty
};

struct Table3Row {
    double bound = 0.0;  // tauM = thetaM
    int theorem = 0;
    std::optional<double> r_paper;
    std::optional<int> N_paper;
    int N_max = 30;
    std::optional<double> r;
    std::optional<int> N;
    bool solver_failure = false;
    std::vector<NProbe> probes;

    [[nodiscard]] double tolerance() const;  // 0.03 for the 1e-7 boundary cells, else 0.02
    [[nodiscard]] bool match() const;
};

[[nodiscard]] std::vector<Table1Row> reproduce_table1(const ReproduceOptions& opts);
[[nodiscard]] std::vector<Table2Row> reproduce_table2(const ReproduceOptions& opts);
[[nodiscard]] std::vector<Table3Row> reproduce_table3(const ReproduceOptions& opts);

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows);
void write_table2_csv(std::ostream& os, const std::vector<Table2Row>& rows);
void write_table3_csv(std::ostream& os, const std::vector<Table3Row>& rows);

}  // namespace heatctl
