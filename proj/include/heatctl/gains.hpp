#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "heatctl/feasibility.hpp"
#include "heatctl/modal.hpp"

namespace heatctl {

// Reduced matrices over modes 0..N0.
[[nodiscard]] Matrix modal_A0(const ModalModel& model, int N0);  // diag(-lambda_i + q)
[[nodiscard]] Vector modal_B0(const ModalModel& model, int N0);  // column
[[nodiscard]] Vector modal_C0(const ModalModel& model, int N0);  // row, stored as a vector

struct GainSet {
    int N0 = 0;
    Vector K0;  // controller row gain
    Vector L0;  // observer column gain
    double delta = 0.0;
    Matrix Pc;  // controller certificate
    Matrix Po;  // observer certificate

    [[nodiscard]] nlohmann::json to_json() const;
    static GainSet from_json(const nlohmann::json& j);
};

struct GainDesignOptions {
    // Extra decay demanded during synthesis so the returned gain clears the
    // verification tolerance comfortably.
    double design_margin = 1.0;
    FeasibilityOptions solver;
};

struct ControllerDesign {
    Vector K0;
    Matrix Pc;
};

struct ObserverDesign {
    Vector L0;
    Matrix Po;
};

// Minimal-norm K with A + B K + (delta + margin) I Hurwitz, via Q = P^{-1}, Y = K Q.
[[nodiscard]] ControllerDesign design_state_feedback(const Matrix& A, const Vector& B, double delta,
                                                     const GainDesignOptions& opts = {});

[[nodiscard]] ControllerDesign design_controller_gain(const ModalModel& model, int N0, double delta,
                                                      const GainDesignOptions& opts = {});
// Synthesized on the dual pair (A0', C0'); L0 = -K'.
[[nodiscard]] ObserverDesign design_observer_gain(const ModalModel& model, int N0, double delta,
                                                  const GainDesignOptions& opts = {});

// Solves A'P + PA = -Q by Kronecker vectorization.
[[nodiscard]] Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

// Gains given by the user; certificates from Lyapunov equations (identity when
// the shifted loop is not Hurwitz, which verification then rejects).
[[nodiscard]] GainSet pin_gains(const ModalModel& model, int N0, double delta, const Vector& K0,
                                const Vector& L0);

struct GainMargins {
    double controller = 0.0;  // lambda_max of the controller inequality
    double observer = 0.0;
    double controller_tol = 0.0;  // 1e-6 * ||left side||_F
    double observer_tol = 0.0;

    [[nodiscard]] bool controller_ok() const { return controller < -controller_tol; }
    [[nodiscard]] bool observer_ok() const { return observer < -observer_tol; }
    [[nodiscard]] bool ok() const { return controller_ok() && observer_ok(); }
};

[[nodiscard]] GainMargins verify_gains(const GainSet& gains, const ModalModel& model);

}  // namespace heatctl
