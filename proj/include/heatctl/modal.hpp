#pragma once

// Neumann–Neumann cosine eigenstructure of the 1D heat operator on [0,1] and
// the modal projection of plant input, measurement weight and initial state.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace heatctl {

// c = indicator of [a, b].
struct IndicatorWeight {
    double a = 0.0;
    double b = 1.0;
};

// Piecewise-linear weight through (position, value) samples, zero outside the
// sampled range.
struct TableWeight {
    std::vector<std::pair<double, double>> samples;
};

// Weight given directly by its modal coefficients c_0, c_1, ...; finite rank.
struct CoeffWeight {
    std::vector<double> values;
};

struct OutputWeightSpec {
    std::variant<IndicatorWeight, TableWeight, CoeffWeight> kind;
    // User-supplied exact ||c||^2 (replaces the computed value).
    std::optional<double> norm_sq_override;

    void validate() const;  // throws PreconditionError
};

struct ModalModel {
    double q = 0.0;
    int truncation = 0;            // highest retained mode index M
    std::vector<double> lambdas;   // lambda_n, n = 0..M
    std::vector<double> b;         // input coefficients
    std::vector<double> c;         // output coefficients
    double c_norm_sq = 0.0;        // ||c||^2

    // ||c||^2 - sum_{n<=N} c_n^2, clamped at zero. Requires N <= truncation.
    [[nodiscard]] double tail_norm_sq(int N) const;
};

[[nodiscard]] double eigenvalue(int n);
[[nodiscard]] double eigenfunction(int n, double x);
[[nodiscard]] double input_coeff(int n);

// Gauss–Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] const QuadratureRule& gauss_legendre(int points);

// int_lo^hi f(x) phi_n(x) dx for n = 0..M, composite 64-point Gauss–Legendre
// with panels narrow enough that each holds at most ~8 periods of phi_M.
[[nodiscard]] std::vector<double> project_on_modes(const std::function<double(double)>& f,
                                                   double lo, double hi, int M);

[[nodiscard]] std::vector<double> output_coeffs(const OutputWeightSpec& spec, int M);
[[nodiscard]] double weight_norm_sq(const OutputWeightSpec& spec);
[[nodiscard]] double tail_norm_sq(const OutputWeightSpec& spec, int N);

// Upper bound 2/(pi^2 N) on sum_{n>N} b_n^2 / lambda_n.
[[nodiscard]] double tail_input_bound(int N);

// Smallest N0 with lambda_{N0+1} > q + delta.
[[nodiscard]] int select_N0(double q, double delta);

[[nodiscard]] std::vector<double> project_initial(const std::function<double(double)>& z0, int M);
// z0(x) = sum_k coeffs[k] x^k
[[nodiscard]] std::vector<double> project_initial_polynomial(std::span<const double> coeffs, int M);

[[nodiscard]] ModalModel make_modal_model(double q, const OutputWeightSpec& spec, int M);

}  // namespace heatctl
