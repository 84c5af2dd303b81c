// Serial vs OpenMP Schur-complement assembly, on its own and inside a full
// feasibility solve.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "heatctl/feasibility.hpp"
#include "heatctl/gains.hpp"
#include "heatctl/lmi.hpp"
#include "heatctl/sdp.hpp"

using namespace heatctl;
using Clock = std::chrono::steady_clock;

namespace {

struct Synthetic {
    std::vector<sdp::Matrix> G1, G2;
    std::vector<std::vector<sdp::Piece>> pieces;
    std::vector<std::vector<int>> offsets, active;
    std::vector<sdp::SchurBlock> views;
};

// block sizes and piece density roughly those of a delayed-theorem instance
Synthetic synthetic(int m, int order, int pool, int per_var, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> col(0, pool - 1);
    Synthetic s;
    for (int k = 0; k < 2; ++k) {
        sdp::Matrix P(order, pool), Z(order, order);
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < pool; ++j) P(i, j) = g(rng);
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j) Z(i, j) = g(rng);
        Z = Z * Z.transpose() + order * sdp::Matrix::Identity(order, order);
        s.G1.push_back(P.transpose() * Z * P);
        s.G2.push_back(P.transpose() * Z.inverse() * P);
        std::vector<sdp::Piece> pcs;
        for (int v = 0; v < m; ++v)
            for (int t = 0; t < per_var; ++t) pcs.push_back({v, g(rng), col(rng), col(rng)});
        std::vector<int> off(m + 1, 0), act;
        for (auto& p : pcs) ++off[p.var + 1];
        for (int i = 0; i < m; ++i) {
            if (off[i + 1] > 0) act.push_back(i);
            off[i + 1] += off[i];
        }
        s.pieces.push_back(std::move(pcs));
        s.offsets.push_back(std::move(off));
        s.active.push_back(std::move(act));
    }
    for (std::size_t k = 0; k < s.G1.size(); ++k)
        s.views.push_back({&s.G1[k], &s.G2[k], &s.pieces[k], &s.offsets[k], &s.active[k]});
    return s;
}

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    for (int m : {200, 600, 1200}) {
        const auto s = synthetic(m, 60, 120, 6, 1);
        sdp::Matrix Ms = sdp::Matrix::Zero(m, m), Mp = Ms;
        const double ts = best_of(3, [&] { sdp::schur_complement_serial(s.views, Ms); });
        const double tp = best_of(3, [&] { sdp::schur_complement_parallel(s.views, Mp); });
        const bool same = Ms.triangularView<Eigen::Lower>().toDenseMatrix() ==
                          Mp.triangularView<Eigen::Lower>().toDenseMatrix();
        std::printf("schur m=%4d  serial %.4fs  parallel %.4fs  speedup %.2f  identical %s\n", m, ts, tp,
                    ts / tp, same ? "yes" : "NO");
    }

    const auto model = make_modal_model(3.0, OutputWeightSpec{IndicatorWeight{0.3, 0.9}, std::nullopt}, 50);
    const auto gains = pin_gains(model, 0, 0.0, Vector::Constant(1, -5.5), Vector::Constant(1, 5.5));
    for (int N : {12, 20}) {
        const auto inst = assemble_thm4(model, gains, N, {0.26, 1e-7, 1e-7}, {0.0, 1.0});
        FeasibilityOptions ser, par;
        ser.parallel = false;
        par.parallel = true;
        FeasibilityReport rs, rp;
        const double ts = best_of(1, [&] { rs = check_feasibility(inst, ser); });
        const double tp = best_of(1, [&] { rp = check_feasibility(inst, par); });
        std::printf("thm4 N=%d  serial %.3fs  parallel %.3fs  speedup %.2f  status %s/%s  same iterate %s\n", N, ts,
                    tp, ts / tp, to_string(rs.status), to_string(rp.status), rs.x == rp.x ? "yes" : "NO");
    }
}
