#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatctl/lmi_instance.hpp"
#include "heatctl/sdp.hpp"

namespace heatctl {

enum class FeasStatus { Feasible, Infeasible, SolverFailure };
[[nodiscard]] const char* to_string(FeasStatus s);

struct ConstraintCheck {
    std::string name;
    Sense sense = Sense::StrictNegative;
    double extreme = 0.0;  // max eigenvalue (strict) or min eigenvalue (weak)
    double slack = 0.0;    // >= 0 means the check passes
};

struct FeasibilityReport {
    FeasStatus status = FeasStatus::SolverFailure;
    double margin = 0.0;      // min slack over all constraints
    double strictness = 0.0;  // epsilon used
    double t_star = 0.0;      // smallest common bound found for the strict blocks
    Vector x;                 // flat decision vector
    std::vector<ConstraintCheck> checks;
    int iterations = 0;
    std::string solver_status;
    std::string log;

    [[nodiscard]] bool feasible() const { return status == FeasStatus::Feasible; }
    [[nodiscard]] nlohmann::json to_json(const LmiInstance& inst, bool with_values = false) const;
};

using SdpOracle = std::function<sdp::Result(const sdp::Problem&, const sdp::Settings&)>;

struct FeasibilityOptions {
    double box = 1e6;  // |x_i| <= box
    double tol = 1e-8;
    int max_iter = 150;
    bool parallel = true;
    bool keep_log = false;
    double time_limit = 0.0;  // seconds per instance, 0 for none
    SdpOracle oracle;  // defaults to sdp::solve
};

// Eigenvalue re-check of every constraint at x. Strict constraints pass when
// lambda_max <= -threshold; weak ones when lambda_min >= -1e-12 * scale.
[[nodiscard]] std::vector<ConstraintCheck> verify_point(const LmiInstance& inst, const Vector& x,
                                                        double threshold);

// Strict constraints become F <= t I, t is minimized over a box; the instance
// is feasible when some point passes verification at epsilon.
[[nodiscard]] FeasibilityReport check_feasibility(const LmiInstance& inst,
                                                  const FeasibilityOptions& opts = {});

struct OptimizeResult {
    sdp::Status status = sdp::Status::Breakdown;
    Vector x;
    double objective = 0.0;
    std::string log;
};

// minimize cost'x with every strict constraint shifted to F <= -epsilon I.
[[nodiscard]] OptimizeResult minimize(const LmiInstance& inst, const Vector& cost,
                                      const FeasibilityOptions& opts = {});

}  // namespace heatctl
