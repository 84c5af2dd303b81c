#include "heatctl/halanay.hpp"

#include <cmath>

#include "heatctl/errors.hpp"

namespace heatctl {

void RateSpec::validate() const {
    if (!(delta0 > 0.0)) throw DomainError("delta0 must be positive");
    if (!(delta1 >= 0.0)) throw DomainError("delta1 must be nonnegative");
    if (!(delta1 < delta0)) throw DomainError("Halanay rate needs delta1 < delta0");
    if (!(tauM >= 0.0)) throw DomainError("tauM must be nonnegative");
}

double decay_rate_residual(const RateSpec& spec, double x) {
    return x - spec.delta0 + spec.delta1 * std::exp(2.0 * x * spec.tauM);
}

double solve_decay_rate(const RateSpec& spec) {
    spec.validate();
    const double top = spec.delta0 - spec.delta1;
    if (spec.delta1 == 0.0 || spec.tauM == 0.0) return top;

    // residual is strictly increasing, negative at 0 and >= 0 at top
    double lo = 0.0;
    double hi = top;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (decay_rate_residual(spec, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::abs(decay_rate_residual(spec, lo)) <= std::abs(decay_rate_residual(spec, hi)) ? lo
                                                                                              : hi;
}

}  // namespace heatctl
