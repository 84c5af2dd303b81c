#include "heatctl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "heatctl/errors.hpp"

namespace heatctl {

using Eigen::VectorXd;

double DelayProfile::operator()(double t) const {
    switch (shape) {
        case Shape::Constant: return base;
        case Shape::SinSquared: {
            const double s = std::sin(omega * t);
            return base + amplitude * s * s;
        }
        case Shape::CosSquared: {
            const double c = std::cos(omega * t);
            return base + amplitude * c * c;
        }
    }
    return base;
}

double DelayProfile::min_value() const {
    if (shape == Shape::Constant || omega == 0.0)
        return shape == Shape::CosSquared && omega == 0.0 ? base + amplitude : base;
    return base + std::min(0.0, amplitude);
}

double DelayProfile::max_value() const {
    if (shape == Shape::Constant || omega == 0.0)
        return shape == Shape::CosSquared && omega == 0.0 ? base + amplitude : base;
    return base + std::max(0.0, amplitude);
}

double DelayProfile::period() const {
    if (shape == Shape::Constant || omega == 0.0 || amplitude == 0.0)
        return std::numeric_limits<double>::infinity();
    return std::numbers::pi / std::abs(omega);  // sin^2 and cos^2 repeat every pi/omega
}

const char* to_string(DelayProfile::Shape s) {
    switch (s) {
        case DelayProfile::Shape::Constant: return "constant";
        case DelayProfile::Shape::SinSquared: return "sin2";
        case DelayProfile::Shape::CosSquared: return "cos2";
    }
    return "?";
}

DelayProfile::Shape delay_shape_from_string(const std::string& s) {
    if (s == "constant") return DelayProfile::Shape::Constant;
    if (s == "sin2") return DelayProfile::Shape::SinSquared;
    if (s == "cos2") return DelayProfile::Shape::CosSquared;
    throw PreconditionError("unknown delay profile '" + s + "' (constant, sin2, cos2)");
}

const char* to_string(ControllerMode m) {
    return m == ControllerMode::Static ? "static" : "predictor";
}

namespace {

constexpr double kBoundTol = 1e-12;

std::string fmt(const char* what, double a, double b) {
    std::ostringstream os;
    os << what << " (" << a << " vs " << b << ")";
    return os.str();
}

}  // namespace

void DelaySpec::validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!finite_nonneg(r)) throw PreconditionError("r must be finite and nonnegative");
    if (!finite_nonneg(thetaM)) throw PreconditionError("thetaM must be finite and nonnegative");
    if (!finite_nonneg(tau_m) || !finite_nonneg(tauM) || tau_m > tauM)
        throw PreconditionError("output delay bounds need 0 <= tau_m <= tauM");
    if (tau_u.min_value() < r - kBoundTol || tau_u.max_value() > r + thetaM + kBoundTol)
        throw PreconditionError(fmt("tau_u profile leaves [r, r + thetaM]", tau_u.min_value(), r));
    if (tau_y.min_value() < tau_m - kBoundTol || tau_y.max_value() > tauM + kBoundTol)
        throw PreconditionError(fmt("tau_y profile leaves [tau_m, tauM]", tau_y.min_value(), tau_m));
}

void SimConfig::validate() const {
    delays.validate();
    const int M = model.truncation;
    const int N0 = gains.N0;
    if (gains.K0.size() != N0 + 1 || gains.L0.size() != N0 + 1)
        throw PreconditionError("gain length must be N0 + 1");
    if (!(N >= N0 + 1 && N <= M)) throw PreconditionError("need N0 + 1 <= N <= M", N);
    if (static_cast<int>(z0.size()) != M + 1)
        throw PreconditionError("initial amplitudes must have M + 1 entries");
    if (!(h > 0.0) || !(T > 0.0) || !std::isfinite(h) || !std::isfinite(T))
        throw PreconditionError("step and horizon must be positive");
    if (delays.tau_m > 0.0 && h > delays.tau_m / 10.0)
        throw PreconditionError(fmt("step must not exceed tau_m / 10", h, delays.tau_m / 10.0));
    for (const auto* p : {&delays.tau_u, &delays.tau_y})
        if (std::isfinite(p->period()) && p->period() / h < 50.0)
            throw PreconditionError(fmt("step resolves a delay period with fewer than 50 steps",
                                        p->period() / h, 50.0));
    if (record_every < 1) throw PreconditionError("record_every must be positive");
    if (!(divergence_factor > 0.0)) throw PreconditionError("divergence factor must be positive");
}

namespace {

// Trapezoid weights and kernel for the predictor integral over [t - r, t].
struct PredictorKernel {
    int J = 0;          // whole steps inside the horizon
    double rho = 0.0;   // leftover at the far end
    Eigen::MatrixXd E;  // E(j, i) = exp(a_i j h), j = 0..J
    VectorXd Erho;      // exp(a_i (J h + rho)) = exp(a_i r)
    VectorXd a;
    VectorXd B0;
    double h = 0.0;

    PredictorKernel(const ModalModel& model, int N0, double h_, double r) : h(h_) {
        a = modal_A0(model, N0).diagonal();
        B0 = modal_B0(model, N0);
        J = static_cast<int>(std::floor(r / h + 1e-9));
        rho = std::max(0.0, r - J * h);
        if (rho < 1e-12 * std::max(1.0, r)) rho = 0.0;
        E.resize(J + 1, a.size());
        for (int j = 0; j <= J; ++j)
            for (Eigen::Index i = 0; i < a.size(); ++i) E(j, i) = std::exp(a[i] * j * h);
        Erho = (a.array() * r).exp();
    }

    // Sum over every node except s = t; u_at(j) returns u(t - j h) and u_far
    // is u(t - r). w0 is the weight multiplying B0 u(t).
    template <class U>
    VectorXd partial(const U& u_at, double u_far, double& w0) const {
        VectorXd acc = VectorXd::Zero(a.size());
        if (J == 0) {
            w0 = 0.5 * rho;
            acc += 0.5 * rho * Erho.cwiseProduct(B0) * u_far;
            return acc;
        }
        w0 = 0.5 * h;
        for (int j = 1; j <= J; ++j) {
            const double w = (j == J) ? 0.5 * h : h;
            const double uj = u_at(j);
            if (uj != 0.0) acc += w * E.row(j).transpose().cwiseProduct(B0) * uj;
        }
        if (rho > 0.0) {
            acc += 0.5 * rho * E.row(J).transpose().cwiseProduct(B0) * u_at(J);
            acc += 0.5 * rho * Erho.cwiseProduct(B0) * u_far;
        }
        return acc;
    }
};

// Cubic Lagrange through the four grid values around s (fewer near the ends).
template <class Get>
double lagrange_cubic(double s, double t0, double h, long kmin, long kmax, const Get& get) {
    const double x = (s - t0) / h;
    long k = static_cast<long>(std::floor(x)) - 1;
    k = std::clamp(k, kmin, std::max(kmin, kmax - 3));
    const long hi = std::min(kmax, k + 3);
    double acc = 0.0;
    for (long i = k; i <= hi; ++i) {
        double w = 1.0;
        for (long j = k; j <= hi; ++j)
            if (j != i) w *= (x - static_cast<double>(j)) / static_cast<double>(i - j);
        acc += w * get(i);
    }
    return acc;
}

class Simulator {
public:
    explicit Simulator(const SimConfig& cfg)
        : cfg_(cfg),
          M_(cfg.model.truncation),
          N_(cfg.N),
          N0_(cfg.gains.N0),
          dim_(M_ + 1 + N_ + 1),
          kernel_(cfg.model, cfg.gains.N0, cfg.h, cfg.delays.r) {
        D_.resize(dim_);
        for (int n = 0; n <= M_; ++n) D_[n] = -cfg.model.lambdas[n] + cfg.model.q;
        for (int n = 0; n <= N_; ++n) D_[M_ + 1 + n] = -cfg.model.lambdas[n] + cfg.model.q;
        full_ = coeffs(cfg.h);
        b_ = Eigen::Map<const VectorXd>(cfg.model.b.data(), M_ + 1);
        c_ = Eigen::Map<const VectorXd>(cfg.model.c.data(), M_ + 1);
        w_init_ = VectorXd::Zero(dim_);
        for (int n = 0; n <= M_; ++n) w_init_[n] = cfg.z0[n];
        const double lookback = std::max({cfg.delays.r + cfg.delays.thetaM, cfg.delays.tauM,
                                          cfg.delays.tau_u.max_value(), cfg.delays.tau_y.max_value()});
        cap_ = static_cast<long>(std::ceil(lookback / cfg.h)) + 16;
        lookback_ = lookback + cfg.h;
        W_.assign(cap_, VectorXd());
        F_.assign(cap_, VectorXd());
        U_.assign(cap_, 0.0);
    }

    SimTrace run() {
        SimTrace tr;
        const double h = cfg_.h;
        const long steps = static_cast<long>(std::llround(cfg_.T / h));
        const double z0norm = std::max(w_init_.head(M_ + 1).norm(), 1e-300);
        const double limit = cfg_.divergence_factor * z0norm;

        VectorXd w = w_init_;
        n_ = 0;
        store(0, w, control_at_grid(0, w));
        record(tr, 0.0, w);
        for (long n = 0; n < steps; ++n) {
            const double t = n * h;
            if (auto ev = check_delays(t)) {
                tr.events.push_back(*ev);
                return tr;
            }
            // Split the step where a delayed argument crosses 0: the history has a
            // corner there and a step straddling it drops to second order.
            const std::vector<double> cuts = breakpoints(t, t + h);
            if (cuts.empty()) {
                w = step(t, w, F_gvals_, full_);
            } else {
                double ta = t;
                VectorXd k1 = F_gvals_;
                for (std::size_t i = 0; i <= cuts.size(); ++i) {
                    const double tb = i < cuts.size() ? cuts[i] : t + h;
                    w = step(ta, w, k1, coeffs(tb - ta));
                    ta = tb;
                    if (i < cuts.size()) k1 = g(ta, w);
                }
            }
            if (!w.allFinite()) {
                tr.events.push_back({t + h, "overflow", "state became non-finite"});
                return tr;
            }
            store(n + 1, w, control_at_grid(n + 1, w));
            const bool last = n + 1 == steps;
            const double nz = w.head(M_ + 1).norm();
            if (last || (n + 1) % cfg_.record_every == 0 || nz > limit) record(tr, (n + 1) * h, w);
            if (nz > limit) {
                tr.diverged = true;
                tr.divergence_time = (n + 1) * h;
                std::ostringstream os;
                os << "||z|| exceeded " << cfg_.divergence_factor << " x ||z(0)||";
                tr.events.push_back({(n + 1) * h, "divergence", os.str()});
                return tr;
            }
        }
        tr.completed = true;
        return tr;
    }

private:
    std::optional<SimEvent> check_delays(double t) const {
        const auto& d = cfg_.delays;
        const double tu = d.tau_u(t);
        const double ty = d.tau_y(t);
        if (tu < d.r - kBoundTol || tu > d.r + d.thetaM + kBoundTol) {
            std::ostringstream os;
            os << "tau_u(" << t << ") = " << tu << " outside [r, r + thetaM]";
            return SimEvent{t, "delay-bound", os.str()};
        }
        if (ty < d.tau_m - kBoundTol || ty > d.tauM + kBoundTol) {
            std::ostringstream os;
            os << "tau_y(" << t << ") = " << ty << " outside [tau_m, tauM]";
            return SimEvent{t, "delay-bound", os.str()};
        }
        return std::nullopt;
    }

    long slot(long k) const { return ((k % cap_) + cap_) % cap_; }

    void store(long k, const VectorXd& w, double u) {
        W_[slot(k)] = w;
        U_[slot(k)] = u;
        n_ = std::max(0L, k - 1);  // F_ at k is not known yet
        F_gvals_ = g(k * cfg_.h, w);
        F_[slot(k)] = D_.cwiseProduct(w) + F_gvals_;
        n_ = k;
    }

    // State at a past (or slightly future) time from the stored grid.
    VectorXd state_at(double s) const {
        if (s <= 0.0) return w_init_;
        const double h = cfg_.h;
        const double x = s / h;
        long k = static_cast<long>(std::floor(x));
        if (k >= n_) {
            if (n_ == 0) return W_[slot(0)] + s * F_[slot(0)];
            k = n_ - 1;  // extrapolate the last cubic
        }
        const double th = x - static_cast<double>(k);
        const VectorXd& w0 = W_[slot(k)];
        const VectorXd& w1 = W_[slot(k + 1)];
        const VectorXd& f0 = F_[slot(k)];
        const VectorXd& f1 = F_[slot(k + 1)];
        const double th2 = th * th;
        const double th3 = th2 * th;
        const double h00 = 2 * th3 - 3 * th2 + 1;
        const double h10 = th3 - 2 * th2 + th;
        const double h01 = -2 * th3 + 3 * th2;
        const double h11 = th3 - th2;
        return h00 * w0 + h10 * h * f0 + h01 * w1 + h11 * h * f1;
    }

    // u(s); `now` and `w` are the stage time and state, used when s reaches now.
    double input_at(double s, double now, const VectorXd& w) const {
        if (cfg_.force_zero_input || s <= 0.0) return 0.0;
        if (cfg_.mode == ControllerMode::Static) {
            const VectorXd ws = s >= now - 1e-14 ? w : state_at(s);
            return cfg_.gains.K0.dot(ws.segment(M_ + 1, N0_ + 1));
        }
        const long kmin = std::max(0L, n_ - cap_ + 1);
        return lagrange_cubic(s, 0.0, cfg_.h, kmin, n_, [this](long i) { return U_[slot(i)]; });
    }

    double control_at_grid(long k, const VectorXd& w) {
        if (cfg_.force_zero_input) return 0.0;
        const VectorXd zhat0 = w.segment(M_ + 1, N0_ + 1);
        if (cfg_.mode == ControllerMode::Static) return cfg_.gains.K0.dot(zhat0);
        if (k == 0) return 0.0;  // zhat(0) = 0 and u vanishes on the horizon
        const double t = k * cfg_.h;
        auto u_at = [&](int j) { return k - j <= 0 ? 0.0 : U_[slot(k - j)]; };
        const double u_far = input_at_before(t - cfg_.delays.r, k);
        double w0 = 0.0;
        const VectorXd rest =
            kernel_.Erho.cwiseProduct(zhat0) + kernel_.partial(u_at, u_far, w0);
        const double kb = cfg_.gains.K0.dot(kernel_.B0);
        return cfg_.gains.K0.dot(rest) / (1.0 - w0 * kb);
    }

    // u at s < t_k from the grid already stored up to k - 1.
    double input_at_before(double s, long k) const {
        if (s <= 0.0) return 0.0;
        const long kmin = std::max(0L, k - cap_ + 1);
        return lagrange_cubic(s, 0.0, cfg_.h, kmin, k - 1, [this](long i) { return U_[slot(i)]; });
    }

    VectorXd g(double t, const VectorXd& w) const {
        const auto& d = cfg_.delays;
        const double u_del = input_at(t - d.tau_u(t), t, w);
        const double u_obs = d.input_known ? u_del : input_at(t - d.r, t, w);
        const double sy = t - d.tau_y(t);
        const VectorXd wy = sy >= t - 1e-14 ? w : state_at(sy);
        const double y = c_.dot(wy.head(M_ + 1));
        const double yhat = c_.head(N_ + 1).dot(wy.segment(M_ + 1, N_ + 1));
        VectorXd out(dim_);
        out.head(M_ + 1) = b_ * u_del;
        out.segment(M_ + 1, N_ + 1) = b_.head(N_ + 1) * u_obs;
        for (int n = 0; n <= N0_; ++n) out[M_ + 1 + n] -= cfg_.gains.L0[n] * (yhat - y);
        return out;
    }

    void record(SimTrace& tr, double t, const VectorXd& w) const {
        tr.times.push_back(t);
        const VectorXd z = w.head(M_ + 1);
        const VectorXd zh = w.segment(M_ + 1, N_ + 1);
        tr.z.push_back(z);
        tr.zhat.push_back(zh);
        tr.u.push_back(U_[slot(static_cast<long>(std::llround(t / cfg_.h)))]);
        tr.norm_z.push_back(z.norm());
        const double e2 = (z.head(N_ + 1) - zh).squaredNorm() + z.tail(M_ - N_).squaredNorm();
        tr.norm_err.push_back(std::sqrt(e2));
    }

    const SimConfig& cfg_;
    int M_, N_, N0_, dim_;
    PredictorKernel kernel_;
    // phi_k(z) = sum_j z^j / (j + k)!, series near zero where the closed form cancels
    static double phi(int k, double z) {
        if (std::abs(z) < 0.5) {
            double term = 1.0, sum = 0.0;
            for (int j = 1; j <= k; ++j) term /= j;
            for (int j = 0; j < 30; ++j) {
                sum += term;
                term *= z / (j + k + 1);
            }
            return sum;
        }
        double v = std::exp(z);
        double fact = 1.0, pw = 1.0;
        for (int j = 0; j < k; ++j) {
            v -= pw / fact;
            pw *= z;
            fact *= j + 1;
        }
        return v / pw;
    }

    struct Etd {
        double dt = 0.0;
        VectorXd E, E2, Q, f1, f2, f3;
    };

    Etd coeffs(double dt) const {
        Etd c;
        c.dt = dt;
        c.E = (D_ * dt).array().exp();
        c.E2 = (D_ * (0.5 * dt)).array().exp();
        c.Q.resize(dim_);
        c.f1.resize(dim_);
        c.f2.resize(dim_);
        c.f3.resize(dim_);
        for (int i = 0; i < dim_; ++i) {
            const double z = D_[i] * dt;
            c.Q[i] = 0.5 * dt * phi(1, 0.5 * z);
            const double p1 = phi(1, z), p2 = phi(2, z), p3 = phi(3, z);
            c.f1[i] = dt * (p1 - 3 * p2 + 4 * p3);
            c.f2[i] = dt * (p2 - 2 * p3);
            c.f3[i] = dt * (4 * p3 - p2);
        }
        return c;
    }

    // exponential RK4 on the diagonal linear part (Cox-Matthews); k1 = g(t, w)
    VectorXd step(double t, const VectorXd& w, const VectorXd& k1, const Etd& c) const {
        const VectorXd wa = c.E2.cwiseProduct(w) + c.Q.cwiseProduct(k1);
        const VectorXd ka = g(t + 0.5 * c.dt, wa);
        const VectorXd wb = c.E2.cwiseProduct(w) + c.Q.cwiseProduct(ka);
        const VectorXd kb = g(t + 0.5 * c.dt, wb);
        const VectorXd wc = c.E2.cwiseProduct(wa) + c.Q.cwiseProduct(2.0 * kb - k1);
        const VectorXd kc = g(t + c.dt, wc);
        return c.E.cwiseProduct(w) + c.f1.cwiseProduct(k1) + 2.0 * c.f2.cwiseProduct(ka + kb) +
               c.f3.cwiseProduct(kc);
    }

    // Times in (ta, tb) where t - tau_u(t), t - tau_y(t) or t - r cross zero.
    std::vector<double> breakpoints(double ta, double tb) const {
        std::vector<double> out;
        if (ta > lookback_) return out;
        const auto& d = cfg_.delays;
        const std::function<double(double)> args[] = {
            [&d](double t) { return t - d.tau_u(t); },
            [&d](double t) { return t - d.tau_y(t); },
            [&d](double t) { return t - d.r; },
        };
        constexpr int kSamples = 4;
        for (const auto& s : args) {
            double lo = ta, slo = s(ta);
            for (int i = 1; i <= kSamples; ++i) {
                const double hi = ta + (tb - ta) * i / kSamples;
                const double shi = s(hi);
                if ((slo < 0.0 && shi > 0.0) || (slo > 0.0 && shi < 0.0)) {
                    double a = lo, b = hi, sa = slo;
                    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
                        const double m = 0.5 * (a + b);
                        const double sm = s(m);
                        if ((sm < 0.0) == (sa < 0.0)) a = m, sa = sm;
                        else b = m;
                    }
                    const double root = 0.5 * (a + b);
                    const double gap = 1e-9 * (tb - ta);
                    if (root > ta + gap && root < tb - gap) out.push_back(root);
                }
                lo = hi;
                slo = shi;
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end(),
                              [&](double x, double y) { return y - x < 1e-9 * (tb - ta); }),
                  out.end());
        return out;
    }

    VectorXd D_, b_, c_, w_init_;
    Etd full_;
    long cap_ = 0;
    double lookback_ = 0.0;
    long n_ = 0;  // last stored grid index
    std::vector<VectorXd> W_, F_;
    std::vector<double> U_;
    VectorXd F_gvals_;
};

}  // namespace

SimTrace simulate(const SimConfig& cfg) {
    cfg.validate();
    Simulator sim(cfg);
    return sim.run();
}

VectorXd predictor_state(const PredictorHistory& history, double t, const ModalModel& model,
                         const GainSet& gains, double r) {
    if (!(r >= 0.0)) throw DomainError("prediction horizon must be nonnegative");
    if (!(history.h > 0.0)) throw PreconditionError("history step must be positive");
    const int N0 = gains.N0;
    const double x = (t - history.t0) / history.h;
    const long k = std::lround(x);
    if (std::abs(x - static_cast<double>(k)) > 1e-6)
        throw PreconditionError("predictor time must be a history grid point");
    const long size = static_cast<long>(history.u.size());
    if (k < 0 || k >= size || static_cast<long>(history.zhat0.size()) != size)
        throw std::logic_error("predictor history does not cover t");
    const VectorXd& zh = history.zhat0[k];
    if (zh.size() != N0 + 1) throw PreconditionError("history amplitudes must have N0 + 1 entries");

    PredictorKernel ker(model, N0, history.h, r);
    auto u_grid = [&](long i) -> double {
        if (history.t0 + i * history.h <= 0.0) return 0.0;
        if (i < 0 || i >= size) throw std::logic_error("predictor history does not cover [t - r, t]");
        return history.u[i];
    };
    auto u_at = [&](int j) { return u_grid(k - j); };
    const double s_far = t - r;
    double u_far = 0.0;
    if (s_far > 0.0) {
        const long lo = static_cast<long>(std::floor((s_far - history.t0) / history.h));
        if (lo < 0) throw std::logic_error("predictor history does not cover [t - r, t]");
        u_far = lagrange_cubic(s_far, history.t0, history.h, std::max(0L, lo - 1), std::min(k, lo + 2),
                               u_grid);
    }
    double w0 = 0.0;
    VectorXd out = ker.Erho.cwiseProduct(zh) + ker.partial(u_at, u_far, w0);
    out += w0 * ker.B0 * u_grid(k);
    return out;
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& norms,
                      std::pair<double, double> window) {
    if (times.size() != norms.size()) throw PreconditionError("times and norms differ in length");
    const auto [ta, tb] = window;
    if (!(tb > ta)) throw PreconditionError("empty fit window");
    if (times.empty() || times.front() > ta + 1e-12 || times.back() < tb - 1e-12)
        throw PreconditionError("trace does not cover the fit window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < ta || times[i] > tb) continue;
        if (!(norms[i] >= 1e-300)) break;  // underflow: keep the part before it
        const double x = times[i];
        const double y = -std::log(norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw PreconditionError("fewer than two usable samples in the fit window");
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) throw PreconditionError("degenerate fit window");
    return (n * sxy - sx * sy) / den;
}

double fit_decay_rate(const SimTrace& trace, std::pair<double, double> window) {
    return fit_decay_rate(trace.times, trace.norm_z, window);
}

void SimTrace::write_csv(std::ostream& os) const {
    const auto M = z.empty() ? -1 : static_cast<long>(z.front().size()) - 1;
    const auto N = zhat.empty() ? -1 : static_cast<long>(zhat.front().size()) - 1;
    os << "t,u,norm_z,norm_err";
    for (long n = 0; n <= M; ++n) os << ",z" << n;
    for (long n = 0; n <= N; ++n) os << ",zhat" << n;
    os << '\n';
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i] << ',' << u[i] << ',' << norm_z[i] << ',' << norm_err[i];
        for (long n = 0; n <= M; ++n) os << ',' << z[i][n];
        for (long n = 0; n <= N; ++n) os << ',' << zhat[i][n];
        os << '\n';
    }
    os.precision(old);
}

}  // namespace heatctl
