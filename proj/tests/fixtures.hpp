#pragma once

#include "heatctl/gains.hpp"
#include "heatctl/lmi.hpp"
#include "heatctl/modal.hpp"

namespace fx {

inline heatctl::ModalModel plant(int M = 50, double q = 3.0) {
    return heatctl::make_modal_model(q, heatctl::OutputWeightSpec{heatctl::IndicatorWeight{0.3, 0.9}, std::nullopt},
                                     M);
}

inline heatctl::GainSet scalar_gains(const heatctl::ModalModel& m, double K0, double L0, double delta = 0.0) {
    return heatctl::pin_gains(m, 0, delta, heatctl::Vector::Constant(1, K0), heatctl::Vector::Constant(1, L0));
}

// Worked-example delayed setting: gains -5.5 / 5.5, delta = 0.
inline heatctl::TheoremParams delayed(int theorem, double r, double bound) {
    heatctl::TheoremParams p;
    p.theorem = theorem;
    p.delays = {r, bound, bound};
    p.rates = {0.0, 1.0};
    p.delta1_grid = heatctl::default_delta1_grid();
    return p;
}

}  // namespace fx
