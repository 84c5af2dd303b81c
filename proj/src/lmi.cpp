#include "heatctl/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "heatctl/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace heatctl {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void check_dims(const ModalModel& model, const GainSet& gains, int N) {
    if (N <= gains.N0) throw DomainError("N must exceed N0");
    if (model.truncation < N) throw DomainError("model truncation is below N");
    if (gains.K0.size() != gains.N0 + 1 || gains.L0.size() != gains.N0 + 1)
        throw PreconditionError("gain length must be N0 + 1");
}

Matrix I(Eigen::Index n) { return Matrix::Identity(n, n); }
Matrix one(double v = 1.0) { return Matrix::Constant(1, 1, v); }
Matrix col(const Vector& v) { return v; }

// Tail norm with the positivity guard shared by all theorems.
double tail_or_throw(const ModalModel& model, int N) {
    const double t = model.tail_norm_sq(N);
    if (!(t > 0.0))
        throw PreconditionError("||c||_N^2 vanishes; the zeta entries need its inverse", N);
    return t;
}

// Congruence factor for the zeta row/column. Brings the zeta diagonal to O(1)
// instead of O(1/||c||_N^2); feasibility is unchanged.
double zeta_scale(double tail) { return std::sqrt(tail); }

struct DelayedForm {
    int n = 0;
    Matrix F;
    Vector calL;
    Vector calC;
    Vector calK;
    Vector Bu;
    Vector Br;  // empty when the r-slot carries no input term
};

double effective_delta(double delta) {
    if (delta < 0.0) throw DomainError("decay rate must be nonnegative");
    return delta == 0.0 ? kDeltaFloor : delta;
}

void check_delays(const DelayBounds& d) {
    if (!(d.r >= 0.0) || !(d.thetaM >= 0.0) || !(d.tauM >= 0.0) || !std::isfinite(d.r) ||
        !std::isfinite(d.thetaM) || !std::isfinite(d.tauM))
        throw DomainError("delay bounds must be finite and nonnegative");
}

// Shared structure of the delayed theorems: constraints (a), (b), (c) and the
// main inequality over eta = [X, zeta, Uy, Qy, Uu, Ur, Qu].
LmiInstance assemble_delayed(int theorem, const ModalModel& model, const GainSet& gains, int N,
                             const DelayBounds& d, const RateParams& rates, const DelayedForm& f) {
    check_delays(d);
    if (!(rates.delta1 > 0.0)) throw DomainError("delta1 must be positive");
    const double delta = effective_delta(rates.delta);
    const double delta1 = rates.delta1;
    const double delta0 = delta + delta1;
    const double lamN1 = eigenvalue(N + 1);
    if (!(lamN1 > model.q + delta))
        throw PreconditionError("lambda_{N+1} must exceed q + delta", N + 1);
    const double tail = tail_or_throw(model, N);
    const double s = zeta_scale(tail);

    const double eps_r = std::exp(-2.0 * delta0 * d.r);
    const double eps_rM = std::exp(-2.0 * delta0 * (d.r + d.thetaM));
    const double eps_M = std::exp(-2.0 * delta0 * d.tauM);
    const double piN = 1.0 / (kPi2 * N);
    const int n = f.n;

    LmiInstance inst;
    inst.meta = LmiMeta{theorem, N, gains.N0, delta, delta0, delta1, d.r, d.thetaM, d.tauM, s};
    const int P0 = inst.add_variable("P0", VarKind::PsdMatrix, n);
    const int S2 = inst.add_variable("S2", VarKind::PsdMatrix, n);
    const int R2 = inst.add_variable("R2", VarKind::PsdMatrix, n);
    const int S0 = inst.add_variable("S0", VarKind::PositiveScalar);
    const int R0 = inst.add_variable("R0", VarKind::PositiveScalar);
    const int S1 = inst.add_variable("S1", VarKind::PositiveScalar);
    const int R1 = inst.add_variable("R1", VarKind::PositiveScalar);
    const int al = inst.add_variable("alpha", VarKind::PositiveScalar);
    const int al1 = inst.add_variable("alpha1", VarKind::PositiveScalar);
    const int al2 = inst.add_variable("alpha2", VarKind::PositiveScalar);
    const int G1 = inst.add_variable("G1", VarKind::FreeScalar);
    const int G2 = inst.add_variable("G2", VarKind::FreeMatrix, n);

    {
        BlockLayout lay;
        lay.add("a0", 1);
        lay.add("a1", 1);
        auto& c = inst.add_constraint("(a) [R1 G1; G1 R1] >= 0", lay, Sense::WeakNonneg);
        inst.place_scalar(c, R1, 0, 0, one(), 0.5);
        inst.place_scalar(c, R1, 1, 1, one(), 0.5);
        inst.place_scalar(c, G1, 0, 1, one());
    }
    {
        BlockLayout lay;
        lay.add("b0", n);
        lay.add("b1", n);
        auto& c = inst.add_constraint("(b) [R2 G2; G2' R2] >= 0", lay, Sense::WeakNonneg);
        inst.place_right(c, R2, 0, 0, I(n), 0.5);
        inst.place_right(c, R2, 1, 1, I(n), 0.5);
        inst.place_right(c, G2, 0, 1, I(n));
    }
    {
        BlockLayout lay;
        for (const char* nm : {"c0", "c1", "c2", "c3"}) lay.add(nm, 1);
        // congruence diag(1/sqrt(lambda), sqrt(lambda/2) I3) keeps every entry O(1)
        auto& c = inst.add_constraint("(c) tail modes", lay, Sense::StrictNegative);
        inst.place_constant(c, 0, 0, one(0.5 * (-lamN1 + model.q + delta0) / lamN1));
        for (int k = 1; k <= 3; ++k) inst.place_constant(c, 0, k, one(std::sqrt(0.5)));
        inst.place_scalar(c, al, 1, 1, one(), -0.5);
        inst.place_scalar(c, al1, 2, 2, one(), -0.5);
        inst.place_scalar(c, al2, 3, 3, one(), -0.5);
    }

    BlockLayout lay;
    lay.add("X", n);
    lay.add("zeta", 1);
    lay.add("Uy", n);
    lay.add("Qy", n);
    lay.add("Uu", 1);
    lay.add("Ur", 1);
    lay.add("Qu", 1);
    enum { X, Z, Uy, Qy, Uu, Ur, Qu };
    auto& c = inst.add_constraint("(d) main", lay, Sense::StrictNegative);
    if (c.order != 3 * n + 4) throw std::logic_error("eta ordering does not add up");

    const Matrix k = col(f.calK);  // n x 1
    // X-X
    inst.place_right(c, P0, X, X, f.F + delta * I(n));
    inst.place_scalar(c, al, X, X, k, k, piN);
    inst.place_scalar(c, S0, X, X, k, k, 0.5 * (1.0 - eps_r));
    inst.place_scalar(c, S1, X, X, k, k, 0.5 * (eps_r - eps_rM));
    inst.place_right(c, S2, X, X, I(n), 0.5 * (1.0 - eps_M));
    // X-zeta, zeta-zeta
    inst.place_right(c, P0, X, Z, s * col(f.calL));
    inst.place_constant(c, Z, Z, one(-delta1 * s * s / tail));
    // X-Uy, X-Qy
    inst.place_right(c, P0, X, Uy, f.calL * f.calC.transpose() - 2.0 * delta1 * I(n));
    inst.place_right(c, S2, X, Uy, I(n), -eps_M);
    inst.place_right(c, S2, X, Qy, I(n), -eps_M);
    // X-Uu, X-Ur, X-Qu
    inst.place_right(c, P0, X, Uu, col(f.Bu));
    inst.place_scalar(c, S1, X, Uu, k, one(), -eps_rM);
    if (f.Br.size() == n) inst.place_right(c, P0, X, Ur, col(f.Br));
    inst.place_scalar(c, S0, X, Ur, k, one(), -eps_r);
    inst.place_scalar(c, S1, X, Ur, k, one(), eps_r - eps_rM);
    inst.place_scalar(c, S1, X, Qu, k, one(), -eps_rM);
    // Uy, Qy
    inst.place_right(c, P0, Uy, Uy, -delta1 * I(n));
    inst.place_right(c, R2, Uy, Uy, I(n), -0.5 * eps_M);
    inst.place_right(c, S2, Uy, Uy, I(n), -0.5 * eps_M);
    inst.place_right(c, S2, Uy, Qy, I(n), -eps_M);
    inst.place_right(c, G2, Uy, Qy, I(n), -eps_M);
    inst.place_right(c, R2, Qy, Qy, I(n), -0.5 * eps_M);
    inst.place_right(c, S2, Qy, Qy, I(n), -0.5 * eps_M);
    // Uu, Ur, Qu
    inst.place_scalar(c, R1, Uu, Uu, one(), -0.5 * eps_rM);
    inst.place_scalar(c, S1, Uu, Uu, one(), -0.5 * eps_rM);
    inst.place_scalar(c, al1, Uu, Uu, one(), piN);
    inst.place_scalar(c, S1, Uu, Ur, one(), -eps_rM);
    inst.place_scalar(c, S1, Uu, Qu, one(), -eps_rM);
    inst.place_scalar(c, G1, Uu, Qu, one(), -eps_rM);
    inst.place_scalar(c, al2, Ur, Ur, one(), piN);
    inst.place_scalar(c, R0, Ur, Ur, one(), -0.5 * eps_r);
    inst.place_scalar(c, S0, Ur, Ur, one(), -0.5 * eps_r);
    inst.place_scalar(c, S1, Ur, Ur, one(), 0.5 * (eps_r - eps_rM));
    inst.place_scalar(c, S1, Ur, Qu, one(), -eps_rM);
    inst.place_scalar(c, R1, Qu, Qu, one(), -0.5 * eps_rM);
    inst.place_scalar(c, S1, Qu, Qu, one(), -0.5 * eps_rM);

    // Lambda' [K'(r^2 R0 + thetaM^2 R1) K + tauM^2 R2] Lambda
    Matrix Lam = Matrix::Zero(n, c.order);
    Lam.block(0, lay.offsets[X], n, n) = f.F;
    Lam.col(lay.offsets[Z]) = s * f.calL;
    Lam.block(0, lay.offsets[Uy], n, n) = f.calL * f.calC.transpose();
    Lam.col(lay.offsets[Uu]) = f.Bu;
    if (f.Br.size() == n) Lam.col(lay.offsets[Ur]) = f.Br;
    const Matrix KLam = f.calK.transpose() * Lam;
    if (d.r > 0.0) inst.add_congruence(c, R0, KLam, d.r * d.r);
    if (d.thetaM > 0.0) inst.add_congruence(c, R1, KLam, d.thetaM * d.thetaM);
    if (d.tauM > 0.0) inst.add_congruence(c, R2, Lam, d.tauM * d.tauM);
    return inst;
}

}  // namespace

AugmentedMatrices assemble_augmented(const ModalModel& model, const GainSet& gains, int N, double r) {
    check_dims(model, gains, N);
    if (!(r >= 0.0)) throw DomainError("input delay r must be nonnegative");
    const int N0 = gains.N0;
    const int n0 = N0 + 1;
    const int n1 = N - N0;
    AugmentedMatrices a;
    a.N0 = N0;
    a.N = N;
    a.r = r;
    a.A0 = modal_A0(model, N0);
    a.B0 = modal_B0(model, N0);
    a.C0 = modal_C0(model, N0);
    a.K0 = gains.K0;
    a.L0 = gains.L0;
    a.A1 = Matrix::Zero(n1, n1);
    a.B1.resize(n1);
    a.C1.resize(n1);
    for (int i = 0; i < n1; ++i) {
        const int m = N0 + 1 + i;
        a.A1(i, i) = -model.lambdas[m] + model.q;
        a.B1[i] = model.b[m];
        a.C1[i] = model.c[m];
    }
    a.expA0r = Matrix::Zero(n0, n0);
    for (int i = 0; i < n0; ++i) a.expA0r(i, i) = std::exp(a.A0(i, i) * r);

    const Matrix LC = a.L0 * a.C0.transpose();
    const Matrix eL = a.expA0r * a.L0;

    a.F0 = Matrix::Zero(2 * n0, 2 * n0);
    a.F0.topLeftCorner(n0, n0) = a.A0 + a.B0 * a.K0.transpose();
    a.F0.topRightCorner(n0, n0) = LC;
    a.F0.bottomRightCorner(n0, n0) = a.A0 - LC;
    a.barF0 = a.F0;
    a.barF0.topRightCorner(n0, n0) = a.expA0r * LC;

    const int n4 = N + N0 + 2;
    a.barF = Matrix::Zero(n4, n4);
    a.barF.block(0, 0, n0, n0) = a.F0.topLeftCorner(n0, n0);
    a.barF.block(0, n0, n0, n0) = a.expA0r * LC;
    a.barF.block(0, 2 * n0, n0, n1) = eL * a.C1.transpose();
    a.barF.block(n0, n0, n0, n0) = a.A0 - LC;
    a.barF.block(n0, 2 * n0, n0, n1) = -a.L0 * a.C1.transpose();
    a.barF.block(2 * n0, 2 * n0, n1, n1) = a.A1;

    a.calL0 = Vector::Zero(2 * n0);
    a.calL0 << a.L0, -a.L0;
    a.barcalL0 = Vector::Zero(2 * n0);
    a.barcalL0 << eL, -a.L0;
    a.barcalL = Vector::Zero(n4);
    a.barcalL.head(n0) = eL;
    a.barcalL.segment(n0, n0) = -a.L0;

    a.calK0 = Vector::Zero(2 * n0);
    a.calK0.head(n0) = a.K0;
    a.calK = Vector::Zero(n4);
    a.calK.head(n0) = a.K0;

    a.calB0 = Vector::Zero(2 * n0);
    a.calB0.head(n0) = a.B0;
    a.barcalB0 = Vector::Zero(2 * n0);
    a.barcalB0.head(n0) = a.expA0r * a.B0;
    a.barcalB = Vector::Zero(n4);
    a.barcalB.segment(n0, n0) = a.B0;
    a.barcalB.tail(n1) = a.B1;

    a.calC0 = Vector::Zero(2 * n0);
    a.calC0.tail(n0) = a.C0;
    a.calC = Vector::Zero(n4);
    a.calC.segment(n0, n0) = a.C0;
    a.calC.tail(n1) = a.C1;
    return a;
}

LmiInstance assemble_thm1(const ModalModel& model, const GainSet& gains, int N, double delta) {
    check_dims(model, gains, N);
    if (delta < 0.0) throw DomainError("decay rate must be nonnegative");
    const double lamN1 = eigenvalue(N + 1);
    if (!(lamN1 > model.q + delta))
        throw PreconditionError("lambda_{N+1} must exceed q + delta", N + 1);
    const double tail = tail_or_throw(model, N);
    const double s = zeta_scale(tail);
    const auto a = assemble_augmented(model, gains, N, 0.0);
    const int n = 2 * (gains.N0 + 1);

    LmiInstance inst;
    inst.meta = LmiMeta{1, N, gains.N0, delta, 0.0, 0.0, 0.0, 0.0, 0.0, s};
    const int P0 = inst.add_variable("P0", VarKind::PsdMatrix, n);
    const int al = inst.add_variable("alpha", VarKind::PositiveScalar);

    BlockLayout lay;
    lay.add("X", n);
    lay.add("zeta", 1);
    lay.add("w", 1);
    auto& c = inst.add_constraint("reduced", lay, Sense::StrictNegative);
    const Matrix k = col(a.calK0);
    inst.place_right(c, P0, 0, 0, a.F0 + delta * I(n));
    inst.place_scalar(c, al, 0, 0, k, k, 1.0 / (kPi2 * N));
    inst.place_right(c, P0, 0, 1, s * col(a.calL0));
    // w is scaled by sqrt(lambda_{N+1}) / s so its diagonal reads -alpha
    const double sw = std::sqrt(lamN1) / s;
    inst.place_constant(c, 1, 1, one(-(lamN1 - model.q - delta) * s * s / tail));
    inst.place_constant(c, 1, 2, one(s * sw));
    inst.place_scalar(c, al, 2, 2, one(), -0.5 * sw * sw * tail / lamN1);
    return inst;
}

LmiInstance assemble_thm2(const ModalModel& model, const GainSet& gains, int N, const DelayBounds& d,
                          const RateParams& rates) {
    const auto a = assemble_augmented(model, gains, N, d.r);
    DelayedForm f{static_cast<int>(a.F0.rows()), a.F0, a.calL0, a.calC0, a.calK0, a.calB0, a.calB0};
    return assemble_delayed(2, model, gains, N, d, rates, f);
}

LmiInstance assemble_thm3(const ModalModel& model, const GainSet& gains, int N, const DelayBounds& d,
                          const RateParams& rates) {
    const auto a = assemble_augmented(model, gains, N, d.r);
    if (d.r == 0.0 && a.barF0 != a.F0) throw std::logic_error("zero horizon must leave F0 unchanged");
    DelayedForm f{static_cast<int>(a.barF0.rows()), a.barF0, a.barcalL0, a.calC0, a.calK0, a.barcalB0,
                  Vector()};
    return assemble_delayed(3, model, gains, N, d, rates, f);
}

LmiInstance assemble_thm4(const ModalModel& model, const GainSet& gains, int N, const DelayBounds& d,
                          const RateParams& rates) {
    const auto a = assemble_augmented(model, gains, N, d.r);
    DelayedForm f{static_cast<int>(a.barF.rows()), a.barF, a.barcalL, a.calC, a.calK, a.barcalB, Vector()};
    return assemble_delayed(4, model, gains, N, d, rates, f);
}

LmiInstance assemble_theorem(const ModalModel& model, const GainSet& gains, int N,
                             const TheoremParams& p) {
    LmiInstance inst;
    switch (p.theorem) {
        case 1: inst = assemble_thm1(model, gains, N, p.rates.delta); break;
        case 2: inst = assemble_thm2(model, gains, N, p.delays, p.rates); break;
        case 3: inst = assemble_thm3(model, gains, N, p.delays, p.rates); break;
        case 4: inst = assemble_thm4(model, gains, N, p.delays, p.rates); break;
        default: throw DomainError("theorem id must be 1, 2, 3 or 4");
    }
    inst.strictness = p.strictness > 0.0 ? p.strictness : default_strictness(inst);
    return inst;
}

namespace {

NProbe probe_one(const ModalModel& model, const GainSet& gains, const TheoremParams& p, int N,
                 const FeasibilityOptions& solver) {
    NProbe out;
    out.N = N;
    out.r = p.delays.r;
    out.delta1 = p.rates.delta1;
    const auto inst = assemble_theorem(model, gains, N, p);
    const auto rep = check_feasibility(inst, solver);
    out.status = rep.status;
    out.margin = rep.margin;
    out.iterations = rep.iterations;
    if (rep.status == FeasStatus::SolverFailure) {
        std::ostringstream os;
        os << "solver failure for theorem " << p.theorem << " at N=" << N << ", r=" << p.delays.r
           << ", delta1=" << p.rates.delta1 << " (" << rep.solver_status << "); treated as not feasible";
        warn(os.str());
    }
    return out;
}

// Over the delta1 grid: feasible if any value is; infeasible only if every
// value is certified infeasible.
NProbe probe(const ModalModel& model, const GainSet& gains, const TheoremParams& p, int N,
             const FeasibilityOptions& solver) {
    if (p.theorem == 1 || p.delta1_grid.empty()) return probe_one(model, gains, p, N, solver);
    NProbe out;
    bool any_failure = false;
    int iterations = 0;
    for (double d1 : p.delta1_grid) {
        TheoremParams q = p;
        q.rates.delta1 = d1;
        out = probe_one(model, gains, q, N, solver);
        iterations += out.iterations;
        if (out.status == FeasStatus::Feasible) break;
        any_failure = any_failure || out.status == FeasStatus::SolverFailure;
    }
    out.iterations = iterations;
    if (out.status != FeasStatus::Feasible && any_failure) out.status = FeasStatus::SolverFailure;
    return out;
}

}  // namespace

std::vector<double> default_delta1_grid() { return {1.0, 2.0, 4.0, 0.5, 8.0, 16.0, 0.25}; }

namespace {

// Probes a batch of (N, r) points, in parallel when jobs allow.
std::vector<NProbe> probe_batch(const ModalModel& model, const GainSet& gains, const TheoremParams& p,
                                const std::vector<std::pair<int, double>>& points,
                                const SearchOptions& opts) {
    std::vector<NProbe> out(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    FeasibilityOptions solver = opts.solver;
    const auto count = static_cast<int>(points.size());
#ifdef _OPENMP
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
    if (count > 1 && threads > 1) solver.parallel = false;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (count > 1 && threads > 1)
#endif
    for (int i = 0; i < count; ++i) {
        try {
            TheoremParams q = p;
            q.delays.r = points[i].second;
            out[i] = probe(model, gains, q, points[i].first, solver);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

int batch_size(const SearchOptions& opts) {
#ifdef _OPENMP
    return std::max(1, opts.jobs > 0 ? opts.jobs : omp_get_max_threads());
#else
    (void)opts;
    return 1;
#endif
}

}  // namespace

MinNResult min_feasible_N(const ModalModel& model, const GainSet& gains, const TheoremParams& p,
                          int N_max, const SearchOptions& opts) {
    if (N_max < gains.N0 + 1) throw DomainError("N_max must be at least N0 + 1");
    MinNResult res;
    if (opts.n_strategy == SearchOptions::NStrategy::Bisect) {
        auto feasible_at = [&](int N) {
            const auto pr = probe_batch(model, gains, p, {{N, p.delays.r}}, opts).front();
            res.probes.push_back(pr);
            return pr.status == FeasStatus::Feasible;
        };
        if (feasible_at(N_max)) {
            int lo = gains.N0;  // known (or assumed) infeasible
            int hi = N_max;
            while (hi - lo > 1) {
                const int mid = lo + (hi - lo) / 2;
                if (feasible_at(mid))
                    hi = mid;
                else
                    lo = mid;
            }
            res.N = hi;
        }
        std::sort(res.probes.begin(), res.probes.end(),
                  [](const NProbe& a, const NProbe& b) { return a.N < b.N; });
        return res;
    }
    const int width = batch_size(opts);
    for (int N = gains.N0 + 1; N <= N_max && !res.N; N += width) {
        std::vector<std::pair<int, double>> pts;
        for (int k = N; k < std::min(N + width, N_max + 1); ++k) pts.emplace_back(k, p.delays.r);
        for (const auto& pr : probe_batch(model, gains, p, pts, opts)) {
            res.probes.push_back(pr);
            if (!res.N && pr.status == FeasStatus::Feasible) res.N = pr.N;
        }
    }
    return res;
}

MaxRResult max_feasible_r(const ModalModel& model, const GainSet& gains, const TheoremParams& p,
                          const std::vector<double>& r_grid, int N_max, const SearchOptions& opts) {
    MaxRResult res;
    if (r_grid.empty()) return res;
    if (!std::is_sorted(r_grid.begin(), r_grid.end()))
        throw PreconditionError("r grid must be ascending");

    std::optional<std::size_t> best;
    if (opts.r_strategy == SearchOptions::RStrategy::Scan) {
        std::vector<std::pair<int, double>> pts;
        for (double r : r_grid) pts.emplace_back(N_max, r);
        res.probes = probe_batch(model, gains, p, pts, opts);
        for (std::size_t i = 0; i < r_grid.size(); ++i)
            if (res.probes[i].status == FeasStatus::Feasible) best = i;
    } else {
        // Largest feasible index, assuming feasibility is monotone in r.
        auto feasible_at = [&](std::size_t i) {
            const auto pr = probe_batch(model, gains, p, {{N_max, r_grid[i]}}, opts).front();
            res.probes.push_back(pr);
            return pr.status == FeasStatus::Feasible;
        };
        if (feasible_at(0)) {
            std::size_t lo = 0;
            std::size_t hi = r_grid.size();  // first index known (or assumed) infeasible
            while (hi - lo > 1) {
                const std::size_t mid = lo + (hi - lo) / 2;
                if (feasible_at(mid))
                    lo = mid;
                else
                    hi = mid;
            }
            best = lo;
        }
    }
    if (!best) return res;
    res.r = r_grid[*best];
    res.N = N_max;
    if (opts.find_min_N) {
        TheoremParams q = p;
        q.delays.r = *res.r;
        const auto mn = min_feasible_N(model, gains, q, N_max, opts);
        for (const auto& pr : mn.probes) res.probes.push_back(pr);
        if (mn.N) res.N = mn.N;
    }
    return res;
}

}  // namespace heatctl
