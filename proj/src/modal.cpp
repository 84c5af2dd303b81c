#include "heatctl/modal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "heatctl/errors.hpp"

namespace heatctl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelNodes = 64;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Piecewise-linear interpolation through sorted samples.
double table_value(const TableWeight& t, double x) {
    const auto& s = t.samples;
    if (s.empty() || x < s.front().first || x > s.back().first) return 0.0;
    auto it = std::upper_bound(s.begin(), s.end(), x,
                               [](double v, const auto& p) { return v < p.first; });
    if (it == s.end()) return s.back().second;
    if (it == s.begin()) return s.front().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (x - lo.first) / (hi.first - lo.first);
    return (1.0 - w) * lo.second + w * hi.second;
}

}  // namespace

void OutputWeightSpec::validate() const {
    std::visit(Overloaded{
                   [](const IndicatorWeight& w) {
                       if (!(w.a >= 0.0 && w.a < w.b && w.b <= 1.0)) {
                           std::ostringstream os;
                           os << "indicator weight requires 0 <= a < b <= 1, got a=" << w.a
                              << " b=" << w.b;
                           throw PreconditionError(os.str());
                       }
                   },
                   [](const TableWeight& w) {
                       if (w.samples.size() < 2)
                           throw PreconditionError("table weight needs at least two samples");
                       for (std::size_t i = 0; i < w.samples.size(); ++i) {
                           const double x = w.samples[i].first;
                           if (!(x >= 0.0 && x <= 1.0))
                               throw PreconditionError("table sample position outside [0,1]",
                                                       static_cast<int>(i));
                           if (i > 0 && !(x > w.samples[i - 1].first))
                               throw PreconditionError(
                                   "table samples must be sorted strictly by position",
                                   static_cast<int>(i));
                           if (!std::isfinite(w.samples[i].second))
                               throw PreconditionError("table sample value is not finite",
                                                       static_cast<int>(i));
                       }
                   },
                   [](const CoeffWeight& w) {
                       for (std::size_t i = 0; i < w.values.size(); ++i)
                           if (!std::isfinite(w.values[i]))
                               throw PreconditionError("weight coefficient is not finite",
                                                       static_cast<int>(i));
                   },
               },
               kind);
    if (norm_sq_override && !(*norm_sq_override >= 0.0))
        throw PreconditionError("norm_sq override must be nonnegative");
}

double eigenvalue(int n) {
    if (n < 0) throw DomainError("mode index must be nonnegative");
    const double k = static_cast<double>(n) * kPi;
    return k * k;
}

double eigenfunction(int n, double x) {
    if (n < 0) throw DomainError("mode index must be nonnegative");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("eigenfunction evaluated outside [0,1]");
    if (n == 0) return 1.0;
    return std::numbers::sqrt2 * std::cos(static_cast<double>(n) * kPi * x);
}

double input_coeff(int n) {
    if (n < 0) throw DomainError("mode index must be nonnegative");
    if (n == 0) return 1.0;
    return (n % 2 == 0 ? 1.0 : -1.0) * std::numbers::sqrt2;
}

const QuadratureRule& gauss_legendre(int points) {
    if (points < 1) throw DomainError("quadrature needs at least one node");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(points); it != cache.end()) return it->second;

    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const int half = (points + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(kPi * (i + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= points; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (points == 1) p0 = 1.0, p1 = x;
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= points; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = points == 1 ? 1.0 : points * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[points - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[points - 1 - i] = w;
    }
    if (points % 2 == 1) rule.nodes[points / 2] = 0.0;
    return cache.emplace(points, std::move(rule)).first->second;
}

std::vector<double> project_on_modes(const std::function<double(double)>& f, double lo,
                                     double hi, int M) {
    if (M < 0) throw DomainError("truncation must be nonnegative");
    std::vector<double> out(static_cast<std::size_t>(M) + 1, 0.0);
    if (!(hi > lo)) return out;
    const auto& rule = gauss_legendre(kPanelNodes);
    const int panels =
        std::max(1, static_cast<int>(std::ceil((hi - lo) * (static_cast<double>(M) + 1.0) / 16.0)));
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * width;
        const double mid = a + 0.5 * width;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double x = std::clamp(mid + 0.5 * width * rule.nodes[k], 0.0, 1.0);
            const double fw = f(x) * 0.5 * width * rule.weights[k];
            out[0] += fw;
            for (int n = 1; n <= M; ++n)
                out[n] += fw * std::numbers::sqrt2 * std::cos(n * kPi * x);
        }
    }
    return out;
}

std::vector<double> output_coeffs(const OutputWeightSpec& spec, int M) {
    if (M < 0) throw DomainError("truncation must be nonnegative");
    spec.validate();
    return std::visit(
        Overloaded{
            [M](const IndicatorWeight& w) {
                std::vector<double> c(static_cast<std::size_t>(M) + 1);
                c[0] = w.b - w.a;
                for (int n = 1; n <= M; ++n) {
                    const double k = n * kPi;
                    c[n] = std::numbers::sqrt2 * (std::sin(k * w.b) - std::sin(k * w.a)) / k;
                }
                return c;
            },
            [M](const TableWeight& w) {
                std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
                for (std::size_t s = 0; s + 1 < w.samples.size(); ++s) {
                    const auto seg = project_on_modes([&w](double x) { return table_value(w, x); },
                                                      w.samples[s].first, w.samples[s + 1].first, M);
                    for (int n = 0; n <= M; ++n) c[n] += seg[n];
                }
                return c;
            },
            [M](const CoeffWeight& w) {
                std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
                for (std::size_t n = 0; n < w.values.size() && n <= static_cast<std::size_t>(M); ++n)
                    c[n] = w.values[n];
                return c;
            },
        },
        spec.kind);
}

double weight_norm_sq(const OutputWeightSpec& spec) {
    spec.validate();
    if (spec.norm_sq_override) return *spec.norm_sq_override;
    return std::visit(Overloaded{
                          [](const IndicatorWeight& w) { return w.b - w.a; },
                          [](const TableWeight& w) {
                              // Linear segments: c^2 is quadratic, exact under Gauss–Legendre.
                              const auto& rule = gauss_legendre(kPanelNodes);
                              double sum = 0.0;
                              for (std::size_t s = 0; s + 1 < w.samples.size(); ++s) {
                                  const double lo = w.samples[s].first;
                                  const double hi = w.samples[s + 1].first;
                                  const double mid = 0.5 * (lo + hi);
                                  const double half = 0.5 * (hi - lo);
                                  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                                      const double v = table_value(w, mid + half * rule.nodes[k]);
                                      sum += half * rule.weights[k] * v * v;
                                  }
                              }
                              return sum;
                          },
                          [](const CoeffWeight& w) {
                              double sum = 0.0;
                              for (double v : w.values) sum += v * v;
                              return sum;
                          },
                      },
                      spec.kind);
}

namespace {

double clamp_tail(double tail, double norm_sq) {
    if (tail >= 0.0) return tail;
    if (-tail > 1e-12 * std::max(1.0, norm_sq)) {
        std::ostringstream os;
        os << "tail norm ||c||_N^2 came out negative (" << tail << "); clamped to 0";
        warn(os.str());
    }
    return 0.0;
}

}  // namespace

double tail_norm_sq(const OutputWeightSpec& spec, int N) {
    if (N < 0) throw DomainError("N must be nonnegative");
    const double norm = weight_norm_sq(spec);
    const auto c = output_coeffs(spec, N);
    double partial = 0.0;
    for (double v : c) partial += v * v;
    return clamp_tail(norm - partial, norm);
}

double ModalModel::tail_norm_sq(int N) const {
    if (N < 0 || N > truncation)
        throw DomainError("tail norm requested beyond the model truncation");
    double partial = 0.0;
    for (int n = 0; n <= N; ++n) partial += c[n] * c[n];
    return clamp_tail(c_norm_sq - partial, c_norm_sq);
}

double tail_input_bound(int N) {
    if (N < 1) throw DomainError("tail input bound needs N >= 1");
    return 2.0 / (kPi * kPi * N);
}

int select_N0(double q, double delta) {
    if (delta < 0.0) throw DomainError("decay rate must be nonnegative");
    int n0 = 0;
    while (eigenvalue(n0 + 1) <= q + delta) ++n0;
    return n0;
}

std::vector<double> project_initial(const std::function<double(double)>& z0, int M) {
    return project_on_modes(z0, 0.0, 1.0, M);
}

std::vector<double> project_initial_polynomial(std::span<const double> coeffs, int M) {
    std::vector<double> poly(coeffs.begin(), coeffs.end());
    return project_initial(
        [&poly](double x) {
            double acc = 0.0;
            for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
            return acc;
        },
        M);
}

ModalModel make_modal_model(double q, const OutputWeightSpec& spec, int M) {
    if (M < 0) throw DomainError("truncation must be nonnegative");
    ModalModel model;
    model.q = q;
    model.truncation = M;
    model.lambdas.resize(static_cast<std::size_t>(M) + 1);
    model.b.resize(static_cast<std::size_t>(M) + 1);
    for (int n = 0; n <= M; ++n) {
        model.lambdas[n] = eigenvalue(n);
        model.b[n] = input_coeff(n);
    }
    model.c = output_coeffs(spec, M);
    model.c_norm_sq = weight_norm_sq(spec);
    return model;
}

}  // namespace heatctl
