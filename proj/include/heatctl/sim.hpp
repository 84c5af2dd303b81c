#pragma once

// Truncated modal closed loop with time-varying input/output delays, the
// N-dimensional observer and either the static or the predictor controller.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "heatctl/gains.hpp"
#include "heatctl/modal.hpp"

namespace heatctl {

// tau(t) = base + amplitude * shape(omega t)
struct DelayProfile {
    enum class Shape { Constant, SinSquared, CosSquared };
    Shape shape = Shape::Constant;
    double base = 0.0;
    double amplitude = 0.0;
    double omega = 0.0;

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double min_value() const;
    [[nodiscard]] double max_value() const;
    [[nodiscard]] double period() const;  // infinity for Constant
};

[[nodiscard]] const char* to_string(DelayProfile::Shape s);
[[nodiscard]] DelayProfile::Shape delay_shape_from_string(const std::string& s);

struct DelaySpec {
    double r = 0.0;       // constant part of the input delay
    double thetaM = 0.0;  // tau_u(t) in [r, r + thetaM]
    double tau_m = 0.0;   // tau_y(t) in [tau_m, tauM]
    double tauM = 0.0;
    bool input_known = true;  // false: the observer uses u(t - r)
    DelayProfile tau_u;
    DelayProfile tau_y;

    void validate() const;  // throws PreconditionError
};

enum class ControllerMode { Static, Predictor };
[[nodiscard]] const char* to_string(ControllerMode m);

struct SimConfig {
    ModalModel model;  // truncation M
    GainSet gains;
    int N = 1;
    DelaySpec delays;
    ControllerMode mode = ControllerMode::Static;
    std::vector<double> z0;  // z_n(0), n = 0..M
    double h = 1e-4;
    double T = 8.0;
    int record_every = 10;          // store every k-th step (first and last always)
    double divergence_factor = 1e6;  // ||z|| > factor * ||z(0)|| stops the run
    bool force_zero_input = false;   // u = 0 throughout (open loop)

    void validate() const;  // throws PreconditionError
};

struct SimEvent {
    double t = 0.0;
    std::string kind;  // "delay-bound", "overflow", "divergence"
    std::string message;
};

struct SimTrace {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> z;     // n = 0..M
    std::vector<Eigen::VectorXd> zhat;  // n = 0..N
    std::vector<double> u;
    std::vector<double> norm_z;
    std::vector<double> norm_err;
    std::vector<SimEvent> events;
    bool completed = false;  // reached T
    bool diverged = false;
    std::optional<double> divergence_time;

    void write_csv(std::ostream& os) const;
};

[[nodiscard]] SimTrace simulate(const SimConfig& cfg);

// Stored samples of u and of the first N0+1 observer amplitudes on a uniform
// grid t_k = t0 + k h.
struct PredictorHistory {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> u;
    std::vector<Eigen::VectorXd> zhat0;
};

// e^{A0 r} zhat^{N0}(t) + int_{t-r}^t e^{A0(t-s)} B0 u(s) ds, composite
// trapezoid on the history grid; u(s) = 0 for s <= 0. t must be a grid point.
[[nodiscard]] Eigen::VectorXd predictor_state(const PredictorHistory& history, double t,
                                              const ModalModel& model, const GainSet& gains,
                                              double r);

// Least-squares slope of -ln ||z|| over samples in [t_a, t_b].
[[nodiscard]] double fit_decay_rate(const SimTrace& trace, std::pair<double, double> window);
[[nodiscard]] double fit_decay_rate(const std::vector<double>& times,
                                    const std::vector<double>& norms,
                                    std::pair<double, double> window);

}  // namespace heatctl
