#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "heatctl/feasibility.hpp"
#include "heatctl/sdp.hpp"

using namespace heatctl;
using sdp::Matrix;

namespace {

struct RandomSchur {
    std::vector<Matrix> G1, G2;
    std::vector<std::vector<sdp::Piece>> pieces;
    std::vector<std::vector<int>> offsets, active;
    std::vector<Matrix> pool, Zinv, X;
    std::vector<sdp::SchurBlock> views;
};

Matrix random_spd(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    return A * A.transpose() + n * Matrix::Identity(n, n);
}

RandomSchur make_problem(int m, std::mt19937& rng) {
    RandomSchur p;
    std::uniform_int_distribution<int> pick_var(0, m - 1);
    std::normal_distribution<double> g;
    const int nb = 3;
    for (int k = 0; k < nb; ++k) {
        const int order = 4 + 3 * k, P = 6 + k;
        Matrix pool(order, P);
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < P; ++j) pool(i, j) = g(rng);
        std::vector<sdp::Piece> pcs;
        for (int t = 0; t < 5 * m; ++t) {
            std::uniform_int_distribution<int> col(0, P - 1);
            pcs.push_back({pick_var(rng), g(rng), col(rng), col(rng)});
        }
        std::stable_sort(pcs.begin(), pcs.end(), [](auto& a, auto& b) { return a.var < b.var; });
        std::vector<int> off(m + 1, 0), act;
        for (auto& pc : pcs) ++off[pc.var + 1];
        for (int i = 0; i < m; ++i) {
            if (off[i + 1] > 0) act.push_back(i);
            off[i + 1] += off[i];
        }
        const Matrix Zi = random_spd(order, rng), Xk = random_spd(order, rng);
        p.pool.push_back(pool);
        p.Zinv.push_back(Zi);
        p.X.push_back(Xk);
        p.G1.push_back(pool.transpose() * Zi * pool);
        p.G2.push_back(pool.transpose() * Xk * pool);
        p.pieces.push_back(pcs);
        p.offsets.push_back(off);
        p.active.push_back(act);
    }
    for (int k = 0; k < nb; ++k) p.views.push_back({&p.G1[k], &p.G2[k], &p.pieces[k], &p.offsets[k], &p.active[k]});
    return p;
}

Matrix dense_coefficient(const RandomSchur& p, int k, int var) {
    const auto& pool = p.pool[k];
    Matrix A = Matrix::Zero(pool.rows(), pool.rows());
    for (const auto& pc : p.pieces[k])
        if (pc.var == var) A += pc.coef * (pool.col(pc.u) * pool.col(pc.v).transpose() +
                                           pool.col(pc.v) * pool.col(pc.u).transpose());
    return A;
}

}  // namespace

TEST_CASE("Schur kernels: serial equals parallel and the dense oracle") {
    std::mt19937 rng(7);
    const int m = 23;
    auto p = make_problem(m, rng);
    Matrix Ms = Matrix::Zero(m, m), Mp = Matrix::Zero(m, m);
    sdp::schur_complement_serial(p.views, Ms);
    sdp::schur_complement_parallel(p.views, Mp);
    CHECK(Ms.triangularView<Eigen::Lower>().toDenseMatrix() == Mp.triangularView<Eigen::Lower>().toDenseMatrix());

    double worst = 0, scale = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double ref = 0;
            for (std::size_t k = 0; k < p.views.size(); ++k)
                ref += (dense_coefficient(p, k, i) * p.Zinv[k] * dense_coefficient(p, k, j) * p.X[k]).trace();
            worst = std::max(worst, std::abs(Ms(j, i) - ref));
            scale = std::max(scale, std::abs(ref));
        }
    CHECK(worst <= 1e-11 * scale);
}

TEST_CASE("a constant positive strict block is infeasible") {
    LmiInstance inst;
    const int a = inst.add_variable("alpha", VarKind::PositiveScalar);
    BlockLayout one;
    one.add("x", 1);
    auto& c = inst.add_constraint("constant", one, Sense::StrictNegative);
    inst.place_constant(c, 0, 0, Matrix::Constant(1, 1, 0.5));  // B + B' = 1
    inst.place_scalar(c, a, 0, 0, Matrix::Zero(1, 1));
    const auto rep = check_feasibility(inst);
    CHECK(rep.status == FeasStatus::Infeasible);
}

TEST_CASE("small problem solved to optimality") {
    // maximize y s.t. [[1, y],[y, 1]] >= 0  ->  y = 1
    sdp::Problem pr;
    pr.num_vars = 1;
    pr.b = sdp::Vector::Constant(1, 1.0);
    sdp::Block blk;
    blk.order = 2;
    blk.C = Matrix::Identity(2, 2);
    blk.pool = Matrix::Identity(2, 2);
    blk.pieces = {{0, -1.0, 0, 1}};  // -(e0 e1' + e1 e0')
    pr.blocks.push_back(blk);
    for (bool par : {false, true}) {
        sdp::Settings s;
        s.parallel = par;
        const auto res = sdp::solve(pr, s);
        CHECK(res.status == sdp::Status::Optimal);
        CHECK(res.y(0) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("feasibility is identical with serial and parallel Schur assembly") {
    const auto m = fx::plant();
    const auto g = fx::scalar_gains(m, -5.5, 5.5);
    const auto inst = assemble_thm2(m, g, 10, {0.1, 1e-7, 1e-7}, {0.0, 1.0});
    FeasibilityOptions a, b;
    a.parallel = false;
    b.parallel = true;
    const auto ra = check_feasibility(inst, a);
    const auto rb = check_feasibility(inst, b);
    CHECK(ra.status == rb.status);
    CHECK(ra.iterations == rb.iterations);
    CHECK(ra.x == rb.x);
}
