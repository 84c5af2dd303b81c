#pragma once

// Primal-dual interior-point solver for semidefinite programs in dual form
//
//     maximize  b'y   s.t.  Z_k = C_k - sum_i y_i A_{k,i} >= 0   (SDP blocks)
//                           c_r - a_r'y >= 0                     (LP rows)
//
// Coefficient matrices are stored as sums of symmetric rank-two pieces
// coef * (u v' + v u') over a per-block pool of vectors, which keeps the
// Schur complement cheap for the sparse, selector-heavy LMIs assembled here.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace heatctl::sdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Piece {
    int var = 0;
    double coef = 0.0;
    int u = 0;  // pool column
    int v = 0;  // pool column
};

struct Block {
    int order = 0;
    Matrix C;                   // constant part
    Matrix pool;                // order x P
    std::vector<Piece> pieces;  // sorted by var
};

struct LpRow {
    double c = 0.0;
    std::vector<std::pair<int, double>> a;  // (var, coefficient)
};

struct Problem {
    int num_vars = 0;
    Vector b;
    std::vector<Block> blocks;
    std::vector<LpRow> lp;
};

struct Settings {
    double tol = 1e-8;
    int max_iter = 120;
    double step_fraction = 0.95;
    bool parallel = true;
    // Called with the current y after every iteration; returning true stops
    // the run with status EarlyStop.
    std::function<bool(const Vector&)> early_stop;
};

enum class Status { Optimal, EarlyStop, MaxIter, Stalled, Breakdown };

struct Result {
    Status status = Status::Breakdown;
    Vector y;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;
    double pinf = 0.0;
    double dinf = 0.0;
    int iterations = 0;
    std::string log;
};

[[nodiscard]] Result solve(const Problem& problem, const Settings& settings = {});

[[nodiscard]] const char* to_string(Status s);

// ---- Schur complement kernels -------------------------------------------

// Per-block view used by the kernels. `offsets` is CSR-style over variables
// into `pieces`; `active` lists the variables with at least one piece.
struct SchurBlock {
    const Matrix* G1 = nullptr;  // pool' Z^{-1} pool
    const Matrix* G2 = nullptr;  // pool' X pool
    const std::vector<Piece>* pieces = nullptr;
    const std::vector<int>* offsets = nullptr;
    const std::vector<int>* active = nullptr;
};

// Fills the lower triangle of M (m x m) with tr(A_i Z^{-1} A_j X) summed over
// blocks, in a fixed order so both variants agree bit for bit.
void schur_complement_serial(const std::vector<SchurBlock>& blocks, Matrix& M);
void schur_complement_parallel(const std::vector<SchurBlock>& blocks, Matrix& M);

}  // namespace heatctl::sdp
