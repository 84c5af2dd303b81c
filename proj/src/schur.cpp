#include <algorithm>

#include "heatctl/sdp.hpp"

namespace heatctl::sdp {

namespace {

inline double piece_pair_sum(const SchurBlock& blk, int i, int j) {
    const Matrix& G1 = *blk.G1;
    const Matrix& G2 = *blk.G2;
    const auto& pieces = *blk.pieces;
    const auto& off = *blk.offsets;
    double s = 0.0;
    for (int a = off[i]; a < off[i + 1]; ++a) {
        const int ua = pieces[a].u;
        const int va = pieces[a].v;
        double t = 0.0;
        for (int b = off[j]; b < off[j + 1]; ++b) {
            const int ub = pieces[b].u;
            const int vb = pieces[b].v;
            t += pieces[b].coef * (G1(va, ub) * G2(vb, ua) + G1(va, vb) * G2(ub, ua) +
                                   G1(ua, ub) * G2(vb, va) + G1(ua, vb) * G2(ub, va));
        }
        s += pieces[a].coef * t;
    }
    return s;
}

// Column i of the lower triangle.
inline void fill_column(const std::vector<SchurBlock>& blocks, int i, Matrix& M) {
    const auto m = static_cast<int>(M.rows());
    for (int j = i; j < m; ++j) M(j, i) = 0.0;
    for (const auto& blk : blocks) {
        const auto& active = *blk.active;
        auto it = std::lower_bound(active.begin(), active.end(), i);
        if (it == active.end() || *it != i) continue;
        for (; it != active.end(); ++it) M(*it, i) += piece_pair_sum(blk, i, *it);
    }
}

}  // namespace

void schur_complement_serial(const std::vector<SchurBlock>& blocks, Matrix& M) {
    const auto m = static_cast<int>(M.rows());
    for (int i = 0; i < m; ++i) fill_column(blocks, i, M);
}

void schur_complement_parallel(const std::vector<SchurBlock>& blocks, Matrix& M) {
    const auto m = static_cast<int>(M.rows());
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < m; ++i) fill_column(blocks, i, M);
}

}  // namespace heatctl::sdp
