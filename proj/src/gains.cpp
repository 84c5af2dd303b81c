#include "heatctl/gains.hpp"

#include <cmath>
#include <string>

#include "heatctl/errors.hpp"

namespace heatctl {

namespace {

void require_modes(const ModalModel& model, int N0) {
    if (N0 < 0) throw DomainError("N0 must be nonnegative");
    if (N0 > model.truncation) throw DomainError("N0 exceeds the model truncation");
}

bool is_spd(const Matrix& P) {
    if (P.rows() != P.cols() || P.rows() == 0) return false;
    if (!P.isApprox(P.transpose(), 1e-12)) return false;
    Eigen::LLT<Matrix> llt(P);
    return llt.info() == Eigen::Success;
}

double lambda_max(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

Matrix certificate(const Matrix& Acl, double delta) {
    const auto n = Acl.rows();
    const Matrix shifted = Acl + delta * Matrix::Identity(n, n);
    const Eigen::VectorXcd ev = shifted.eigenvalues();
    if (ev.real().maxCoeff() >= 0.0) return Matrix::Identity(n, n);
    Matrix P = solve_lyapunov(shifted, Matrix::Identity(n, n));
    return 0.5 * (P + P.transpose());
}

nlohmann::json matrix_json(const Matrix& M) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto m = n ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix M(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != m) throw PreconditionError("ragged matrix");
        for (Eigen::Index k = 0; k < m; ++k) M(i, k) = j[i][k].get<double>();
    }
    return M;
}

Vector vector_from_json(const nlohmann::json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

}  // namespace

Matrix modal_A0(const ModalModel& model, int N0) {
    require_modes(model, N0);
    Matrix A = Matrix::Zero(N0 + 1, N0 + 1);
    for (int i = 0; i <= N0; ++i) A(i, i) = -model.lambdas[i] + model.q;
    return A;
}

Vector modal_B0(const ModalModel& model, int N0) {
    require_modes(model, N0);
    return Eigen::Map<const Vector>(model.b.data(), N0 + 1);
}

Vector modal_C0(const ModalModel& model, int N0) {
    require_modes(model, N0);
    return Eigen::Map<const Vector>(model.c.data(), N0 + 1);
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
    const auto n = A.rows();
    if (A.cols() != n || Q.rows() != n || Q.cols() != n)
        throw PreconditionError("Lyapunov equation needs square matrices of equal order");
    const Matrix I = Matrix::Identity(n, n);
    Matrix K = Matrix::Zero(n * n, n * n);
    // vec(A'P + PA) = (I kron A' + A' kron I) vec(P)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            K.block(i * n, j * n, n, n) += I(i, j) * A.transpose();
            K.block(i * n, j * n, n, n) += A(j, i) * I;
        }
    const Vector rhs = -Eigen::Map<const Vector>(Q.data(), n * n);
    const Vector p = K.fullPivLu().solve(rhs);
    return Eigen::Map<const Matrix>(p.data(), n, n);
}

ControllerDesign design_state_feedback(const Matrix& A, const Vector& B, double delta,
                                       const GainDesignOptions& opts) {
    if (delta < 0.0) throw DomainError("decay rate must be nonnegative");
    const auto n = static_cast<int>(A.rows());
    const double rate = delta + opts.design_margin;

    LmiInstance inst;
    const int Q = inst.add_variable("Q", VarKind::PsdMatrix, n);
    std::vector<int> Y(n);
    for (int j = 0; j < n; ++j) Y[j] = inst.add_variable("Y" + std::to_string(j), VarKind::FreeScalar);
    const int kappa = inst.add_variable("kappa", VarKind::PositiveScalar);

    BlockLayout one;
    one.add("x", n);
    auto& lyap = inst.add_constraint("lyapunov", one, Sense::StrictNegative);
    inst.place_right(lyap, Q, 0, 0, A.transpose() + rate * Matrix::Identity(n, n));
    for (int j = 0; j < n; ++j)
        inst.place_scalar(lyap, Y[j], 0, 0, B, Matrix(Vector::Unit(n, j)));

    auto& lower = inst.add_constraint("Q >= I", one, Sense::WeakNonneg);
    inst.place_right(lower, Q, 0, 0, Matrix::Identity(n, n), 0.5);
    inst.place_constant(lower, 0, 0, -0.5 * Matrix::Identity(n, n));

    BlockLayout two;
    two.add("kappa", 1);
    two.add("Y", n);
    auto& bound = inst.add_constraint("gain bound", two, Sense::WeakNonneg);
    inst.place_scalar(bound, kappa, 0, 0, Matrix::Constant(1, 1, 0.5));
    for (int j = 0; j < n; ++j)
        inst.place_scalar(bound, Y[j], 0, 1, Matrix::Ones(1, 1), Matrix(Vector::Unit(n, j)));
    inst.place_constant(bound, 1, 1, 0.5 * Matrix::Identity(n, n));

    Vector cost = Vector::Zero(inst.num_entries());
    cost[inst.variable(kappa).offset] = 1.0;
    const auto res = minimize(inst, cost, opts.solver);
    if (res.status != sdp::Status::Optimal || res.x.size() != inst.num_entries())
        throw SolverError(std::string("gain synthesis did not converge (") +
                          sdp::to_string(res.status) + ")\n" + res.log);

    const Matrix Qv = inst.unpack(Q, res.x);
    Vector y(n);
    for (int j = 0; j < n; ++j) y[j] = res.x[inst.variable(Y[j]).offset];
    Eigen::LLT<Matrix> llt(Qv);
    if (llt.info() != Eigen::Success) throw SolverError("synthesized Q is not positive definite");
    ControllerDesign out;
    out.Pc = llt.solve(Matrix::Identity(n, n));
    out.Pc = 0.5 * (out.Pc + out.Pc.transpose()).eval();
    out.K0 = out.Pc * y;  // K = Y Q^{-1}, stored as a column
    return out;
}

ControllerDesign design_controller_gain(const ModalModel& model, int N0, double delta,
                                        const GainDesignOptions& opts) {
    return design_state_feedback(modal_A0(model, N0), modal_B0(model, N0), delta, opts);
}

ObserverDesign design_observer_gain(const ModalModel& model, int N0, double delta,
                                    const GainDesignOptions& opts) {
    const Vector C0 = modal_C0(model, N0);
    for (int n = 0; n <= N0; ++n)
        if (C0[n] == 0.0)
            throw PreconditionError("output coefficient c_" + std::to_string(n) + " vanishes", n);
    const auto dual = design_state_feedback(modal_A0(model, N0).transpose(), C0, delta, opts);
    ObserverDesign out;
    out.L0 = -dual.K0;
    // The dual Q certifies A0 - L0 C0 directly.
    out.Po = dual.Pc.inverse();
    out.Po = 0.5 * (out.Po + out.Po.transpose()).eval();
    return out;
}

GainSet pin_gains(const ModalModel& model, int N0, double delta, const Vector& K0, const Vector& L0) {
    if (K0.size() != N0 + 1 || L0.size() != N0 + 1)
        throw PreconditionError("gain length must be N0 + 1");
    GainSet g;
    g.N0 = N0;
    g.delta = delta;
    g.K0 = K0;
    g.L0 = L0;
    const Matrix A0 = modal_A0(model, N0);
    const Vector B0 = modal_B0(model, N0);
    const Vector C0 = modal_C0(model, N0);
    g.Pc = certificate(A0 + B0 * K0.transpose(), delta);
    g.Po = certificate(A0 - L0 * C0.transpose(), delta);
    return g;
}

GainMargins verify_gains(const GainSet& g, const ModalModel& model) {
    const int n = g.N0 + 1;
    if (g.K0.size() != n || g.L0.size() != n || g.Pc.rows() != n || g.Pc.cols() != n ||
        g.Po.rows() != n || g.Po.cols() != n)
        throw PreconditionError("gain set dimensions are inconsistent with N0");
    if (!is_spd(g.Pc)) throw PreconditionError("controller certificate is not positive definite");
    if (!is_spd(g.Po)) throw PreconditionError("observer certificate is not positive definite");
    const Matrix A0 = modal_A0(model, g.N0);
    const Vector B0 = modal_B0(model, g.N0);
    const Vector C0 = modal_C0(model, g.N0);
    const Matrix Ac = A0 + B0 * g.K0.transpose();
    const Matrix Ao = A0 - g.L0 * C0.transpose();
    const Matrix Sc = g.Pc * Ac + Ac.transpose() * g.Pc + 2.0 * g.delta * g.Pc;
    const Matrix So = g.Po * Ao + Ao.transpose() * g.Po + 2.0 * g.delta * g.Po;
    GainMargins m;
    m.controller = lambda_max(Sc);
    m.observer = lambda_max(So);
    m.controller_tol = 1e-6 * Sc.norm();
    m.observer_tol = 1e-6 * So.norm();
    return m;
}

nlohmann::json GainSet::to_json() const {
    nlohmann::json j;
    j["N0"] = N0;
    j["delta"] = delta;
    j["K0"] = std::vector<double>(K0.data(), K0.data() + K0.size());
    j["L0"] = std::vector<double>(L0.data(), L0.data() + L0.size());
    j["Pc"] = matrix_json(Pc);
    j["Po"] = matrix_json(Po);
    return j;
}

GainSet GainSet::from_json(const nlohmann::json& j) {
    GainSet g;
    g.N0 = j.at("N0").get<int>();
    g.delta = j.at("delta").get<double>();
    g.K0 = vector_from_json(j.at("K0"));
    g.L0 = vector_from_json(j.at("L0"));
    g.Pc = matrix_from_json(j.at("Pc"));
    g.Po = matrix_from_json(j.at("Po"));
    return g;
}

}  // namespace heatctl
