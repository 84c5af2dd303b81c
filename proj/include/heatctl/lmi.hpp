#pragma once

#include <optional>
#include <vector>

#include "heatctl/feasibility.hpp"
#include "heatctl/gains.hpp"
#include "heatctl/lmi_instance.hpp"
#include "heatctl/modal.hpp"

namespace heatctl {

struct AugmentedMatrices {
    int N0 = 0;
    int N = 0;
    double r = 0.0;
    Matrix A0, A1;
    Vector B0, C0, B1, C1;
    Vector K0, L0;
    Matrix expA0r;  // diag(exp((-lambda_i + q) r))

    Matrix F0, barF0, barF;
    Vector calL0, barcalL0, barcalL;
    Vector calK0, calK;  // rows stored as vectors
    Vector calB0, barcalB0, barcalB;
    Vector calC0, calC;  // rows stored as vectors
};

[[nodiscard]] AugmentedMatrices assemble_augmented(const ModalModel& model, const GainSet& gains, int N,
                                                   double r);

struct DelayBounds {
    double r = 0.0;       // known constant part of the input delay
    double thetaM = 0.0;  // input-delay variation bound
    double tauM = 0.0;    // output-delay upper bound
};

struct RateParams {
    double delta = 0.0;   // target rate; 0 is replaced by kDeltaFloor
    double delta1 = 1.0;  // Halanay gain; delta0 = delta + delta1
};

inline constexpr double kDeltaFloor = 1e-9;

[[nodiscard]] LmiInstance assemble_thm1(const ModalModel& model, const GainSet& gains, int N,
                                        double delta);
[[nodiscard]] LmiInstance assemble_thm2(const ModalModel& model, const GainSet& gains, int N,
                                        const DelayBounds& delays, const RateParams& rates);
[[nodiscard]] LmiInstance assemble_thm3(const ModalModel& model, const GainSet& gains, int N,
                                        const DelayBounds& delays, const RateParams& rates);
[[nodiscard]] LmiInstance assemble_thm4(const ModalModel& model, const GainSet& gains, int N,
                                        const DelayBounds& delays, const RateParams& rates);

struct TheoremParams {
    int theorem = 1;
    DelayBounds delays;
    RateParams rates;
    double strictness = 0.0;  // absolute epsilon, 0 for the default rule
    // Searches try each delta1 in turn (delayed theorems only) and count a
    // point as feasible as soon as one of them is. Empty: rates.delta1 only.
    std::vector<double> delta1_grid;
};

// Geometric grid used by the presets.
[[nodiscard]] std::vector<double> default_delta1_grid();

[[nodiscard]] LmiInstance assemble_theorem(const ModalModel& model, const GainSet& gains, int N,
                                           const TheoremParams& params);

struct SearchOptions {
    int jobs = 0;  // 0: OpenMP default
    FeasibilityOptions solver;
    enum class RStrategy { Bisect, Scan } r_strategy = RStrategy::Bisect;
    // Scan probes every N upward; Bisect assumes feasibility is monotone in N
    // and probes O(log N_max) points.
    enum class NStrategy { Scan, Bisect } n_strategy = NStrategy::Scan;
    bool find_min_N = true;  // after locating r, also scan for the smallest N
};

struct NProbe {
    int N = 0;
    double r = 0.0;
    double delta1 = 0.0;  // certifying value when feasible, else the last tried
    FeasStatus status = FeasStatus::SolverFailure;
    double margin = 0.0;
    int iterations = 0;
};

struct MinNResult {
    std::optional<int> N;
    std::vector<NProbe> probes;  // sorted by N
};

// Smallest N in [N0+1, N_max] with a feasible instance.
[[nodiscard]] MinNResult min_feasible_N(const ModalModel& model, const GainSet& gains,
                                        const TheoremParams& params, int N_max,
                                        const SearchOptions& opts = {});

struct MaxRResult {
    std::optional<double> r;
    std::optional<int> N;
    std::vector<NProbe> probes;
};

// Largest grid r feasible at N_max (feasibility is taken as monotone in N),
// followed by the smallest feasible N at that r.
[[nodiscard]] MaxRResult max_feasible_r(const ModalModel& model, const GainSet& gains,
                                        const TheoremParams& params, const std::vector<double>& r_grid,
                                        int N_max, const SearchOptions& opts = {});

}  // namespace heatctl
