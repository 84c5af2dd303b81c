#pragma once

namespace heatctl {

struct RateSpec {
    double delta0 = 0.0;
    double delta1 = 0.0;
    double tauM = 0.0;

    void validate() const;  // throws DomainError
};

// Unique positive root x of x = delta0 - delta1 * exp(2 x tauM).
[[nodiscard]] double solve_decay_rate(const RateSpec& spec);

// x - delta0 + delta1 * exp(2 x tauM)
[[nodiscard]] double decay_rate_residual(const RateSpec& spec, double x);

}  // namespace heatctl
