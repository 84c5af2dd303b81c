#include "heatctl/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "heatctl/errors.hpp"

namespace heatctl::sdp {

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::EarlyStop: return "early-stop";
        case Status::MaxIter: return "max-iter";
        case Status::Stalled: return "stalled";
        case Status::Breakdown: return "breakdown";
    }
    return "?";
}

namespace {

struct BlockIndex {
    std::vector<int> offsets;
    std::vector<int> active;
};

struct BlockState {
    Matrix X, Z, Zinv;
    Matrix G1, G2;
    Matrix Rd;
    Matrix dX, dZ;
};

Matrix sym(const Matrix& A) { return 0.5 * (A + A.transpose()); }

// <A_i, W> accumulated into out for every piece of the block.
void apply_A(const Block& blk, const Matrix& W, Vector& out) {
    if (blk.pieces.empty()) return;
    const Matrix WV = W * blk.pool;
    for (const auto& p : blk.pieces)
        out[p.var] += p.coef * (blk.pool.col(p.u).dot(WV.col(p.v)) +
                                blk.pool.col(p.v).dot(WV.col(p.u)));
}

// sum_i y_i A_i
Matrix apply_At(const Block& blk, const Vector& y) {
    const auto P = blk.pool.cols();
    Matrix S = Matrix::Zero(P, P);
    for (const auto& p : blk.pieces) S(p.u, p.v) += p.coef * y[p.var];
    const Matrix T = blk.pool * S * blk.pool.transpose();
    return T + T.transpose();
}

// Largest alpha with X + alpha dX >= 0 (infinity if unbounded).
double max_step_psd(const Eigen::LLT<Matrix>& cholX, const Matrix& dX) {
    if (dX.rows() == 0) return std::numeric_limits<double>::infinity();
    Matrix T = cholX.matrixL().solve(dX);
    T = cholX.matrixL().solve(T.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(T), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (!std::isfinite(lmin)) return 0.0;
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step_lp(const Vector& x, const Vector& dx) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < x.size(); ++r)
        if (dx[r] < 0.0) a = std::min(a, -x[r] / dx[r]);
    return a;
}

void append_log(std::string& log, const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    log += buf;
}

}  // namespace

Result solve(const Problem& prob, const Settings& settings) {
    const int m = prob.num_vars;
    if (prob.b.size() != m) throw PreconditionError("objective length does not match variables");
    const auto nb = prob.blocks.size();
    const auto nlp = static_cast<Eigen::Index>(prob.lp.size());

    std::vector<BlockIndex> index(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        const auto& blk = prob.blocks[k];
        if (blk.C.rows() != blk.order || blk.C.cols() != blk.order || blk.pool.rows() != blk.order)
            throw PreconditionError("block dimensions inconsistent", static_cast<int>(k));
        auto& idx = index[k];
        idx.offsets.assign(m + 1, 0);
        int prev = -1;
        for (const auto& p : blk.pieces) {
            if (p.var < prev || p.var < 0 || p.var >= m)
                throw PreconditionError("block pieces must be sorted by variable", static_cast<int>(k));
            prev = p.var;
            ++idx.offsets[p.var + 1];
        }
        for (int i = 0; i < m; ++i) {
            if (idx.offsets[i + 1] > 0) idx.active.push_back(i);
            idx.offsets[i + 1] += idx.offsets[i];
        }
    }

    int ntot = static_cast<int>(nlp);
    double normC = 0.0;
    for (const auto& blk : prob.blocks) {
        ntot += blk.order;
        normC = std::max(normC, blk.C.cwiseAbs().maxCoeff());
    }
    Vector c_lp(nlp);
    for (Eigen::Index r = 0; r < nlp; ++r) c_lp[r] = prob.lp[r].c;
    const double normb = prob.b.norm();
    double normCf = 0.0;
    for (const auto& blk : prob.blocks) normCf += blk.C.squaredNorm();
    normCf = std::sqrt(normCf + c_lp.squaredNorm());

    // Initial point.
    std::vector<BlockState> st(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        const auto& blk = prob.blocks[k];
        const double eta = std::max(10.0, 10.0 * blk.C.cwiseAbs().maxCoeff());
        st[k].X = 10.0 * Matrix::Identity(blk.order, blk.order);
        st[k].Z = eta * Matrix::Identity(blk.order, blk.order);
    }
    Vector xl = Vector::Constant(nlp, 10.0);
    Vector zl(nlp);
    for (Eigen::Index r = 0; r < nlp; ++r) zl[r] = std::max(10.0, std::abs(c_lp[r]));
    Vector y = Vector::Zero(m);

    std::vector<SchurBlock> views(nb);
    Result res;
    Matrix M(m, m);
    const double frac = settings.step_fraction;

    // Best iterate by max(gap, pinf, dinf); returned when the run ends without
    // converging, since late iterations can lose accuracy.
    Result best;
    double best_merit = std::numeric_limits<double>::infinity();
    int best_iter = -1;
    auto finish = [&]() {
        if (best_iter >= 0 && best_iter != res.iterations) {
            res.y = best.y;
            res.primal_obj = best.primal_obj;
            res.dual_obj = best.dual_obj;
            res.gap = best.gap;
            res.pinf = best.pinf;
            res.dinf = best.dinf;
            append_log(res.log, "returning iterate %d\n", best_iter);
        }
        return res;
    };

    for (int iter = 0; iter < settings.max_iter; ++iter) {
        res.iterations = iter;
        // Residuals and objective values.
        Vector AX = Vector::Zero(m);
        double pobj = 0.0;
        double dinf2 = 0.0;
        std::vector<Eigen::LLT<Matrix>> cholX(nb), cholZ(nb);
        bool ok = true;
        for (std::size_t k = 0; k < nb && ok; ++k) {
            const auto& blk = prob.blocks[k];
            auto& s = st[k];
            apply_A(blk, s.X, AX);
            pobj += (blk.C.cwiseProduct(s.X)).sum();
            s.Rd = blk.C - s.Z - apply_At(blk, y);
            dinf2 += s.Rd.squaredNorm();
            cholZ[k].compute(s.Z);
            cholX[k].compute(s.X);
            if (cholZ[k].info() != Eigen::Success || cholX[k].info() != Eigen::Success) ok = false;
        }
        Vector rd_lp(nlp);
        for (Eigen::Index r = 0; r < nlp; ++r) {
            double ay = 0.0;
            for (auto [v, a] : prob.lp[r].a) {
                ay += a * y[v];
                AX[v] += a * xl[r];
            }
            rd_lp[r] = c_lp[r] - ay - zl[r];
        }
        if (!ok) {
            res.status = Status::Breakdown;
            append_log(res.log, "iter %d: iterate left the cone\n", iter);
            break;
        }
        pobj += c_lp.dot(xl);
        dinf2 += rd_lp.squaredNorm();
        const Vector rp = prob.b - AX;
        const double dobj = prob.b.dot(y);

        double xz = xl.dot(zl);
        for (std::size_t k = 0; k < nb; ++k) xz += st[k].X.cwiseProduct(st[k].Z).sum();
        const double mu = xz / std::max(1, ntot);

        res.y = y;
        res.primal_obj = pobj;
        res.dual_obj = dobj;
        res.gap = std::abs(pobj - dobj) / std::max(1.0, 0.5 * (std::abs(pobj) + std::abs(dobj)));
        res.pinf = rp.norm() / (1.0 + normb);
        res.dinf = std::sqrt(dinf2) / (1.0 + normCf);
        append_log(res.log, "iter %3d  pobj % .6e  dobj % .6e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e\n",
                   iter, pobj, dobj, res.gap, res.pinf, res.dinf, mu);
        if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
            res.status = Status::Breakdown;
            break;
        }
        if (const double merit = std::max({res.gap, res.pinf, res.dinf}); merit < best_merit) {
            best_merit = merit;
            best_iter = iter;
            best.y = y;
            best.primal_obj = pobj;
            best.dual_obj = dobj;
            best.gap = res.gap;
            best.pinf = res.pinf;
            best.dinf = res.dinf;
        } else if (best_merit < 1e-4 && iter - best_iter >= 6) {
            res.status = Status::Stalled;
            append_log(res.log, "iter %d: no progress since iterate %d\n", iter, best_iter);
            break;
        }
        if (settings.early_stop && settings.early_stop(y)) {
            res.status = Status::EarlyStop;
            return res;
        }
        if (res.gap < settings.tol && res.pinf < settings.tol && res.dinf < settings.tol) {
            res.status = Status::Optimal;
            return res;
        }

        // Schur complement.
        for (std::size_t k = 0; k < nb; ++k) {
            const auto& blk = prob.blocks[k];
            auto& s = st[k];
            s.Zinv = cholZ[k].solve(Matrix::Identity(blk.order, blk.order));
            s.Zinv = sym(s.Zinv);
            const Matrix ZV = s.Zinv * blk.pool;
            const Matrix XV = s.X * blk.pool;
            s.G1 = blk.pool.transpose() * ZV;
            s.G2 = blk.pool.transpose() * XV;
            views[k] = SchurBlock{&s.G1, &s.G2, &blk.pieces, &index[k].offsets, &index[k].active};
        }
        if (settings.parallel)
            schur_complement_parallel(views, M);
        else
            schur_complement_serial(views, M);
        for (Eigen::Index r = 0; r < nlp; ++r) {
            const double w = xl[r] / zl[r];
            const auto& a = prob.lp[r].a;
            for (std::size_t p = 0; p < a.size(); ++p)
                for (std::size_t q = 0; q < a.size(); ++q) {
                    const int i = a[p].first;
                    const int j = a[q].first;
                    if (j >= i) M(j, i) += w * a[p].second * a[q].second;
                }
        }
        Matrix Mfull = M.selfadjointView<Eigen::Lower>();
        Eigen::LLT<Matrix> cholM(Mfull);
        Eigen::LDLT<Matrix> ldltM;
        bool use_ldlt = false;
        if (cholM.info() != Eigen::Success) {
            const double reg = 1e-13 * std::max(1.0, Mfull.diagonal().cwiseAbs().maxCoeff());
            Mfull.diagonal().array() += reg;
            cholM.compute(Mfull);
            if (cholM.info() != Eigen::Success) {
                ldltM.compute(Mfull);
                use_ldlt = true;
                if (ldltM.info() != Eigen::Success) {
                    res.status = Status::Breakdown;
                    append_log(res.log, "iter %d: Schur complement factorization failed\n", iter);
                    break;
                }
            }
        }
        auto solveM = [&](const Vector& rhs) -> Vector {
            return use_ldlt ? Vector(ldltM.solve(rhs)) : Vector(cholM.solve(rhs));
        };

        // One Newton solve for the given centering target and corrector.
        std::vector<Matrix> corr(nb);
        Vector corr_lp = Vector::Zero(nlp);
        Vector dy(m), dxl(nlp), dzl(nlp);
        auto newton = [&](double target, bool with_corr) {
            Vector rhs = rp;
            Vector Aw = Vector::Zero(m);
            for (std::size_t k = 0; k < nb; ++k) {
                const auto& s = st[k];
                Matrix W = target * s.Zinv - s.X - s.X * s.Rd * s.Zinv;
                if (with_corr) W -= corr[k];
                apply_A(prob.blocks[k], sym(W), Aw);
            }
            Vector wl(nlp);
            for (Eigen::Index r = 0; r < nlp; ++r) {
                wl[r] = target / zl[r] - xl[r] - xl[r] * rd_lp[r] / zl[r];
                if (with_corr) wl[r] -= corr_lp[r];
                for (auto [v, a] : prob.lp[r].a) Aw[v] += a * wl[r];
            }
            rhs -= Aw;
            dy = solveM(rhs);
            for (std::size_t k = 0; k < nb; ++k) {
                auto& s = st[k];
                s.dZ = s.Rd - apply_At(prob.blocks[k], dy);
                Matrix W = target * s.Zinv - s.X - s.X * s.dZ * s.Zinv;
                if (with_corr) W -= corr[k];
                s.dX = sym(W);
            }
            for (Eigen::Index r = 0; r < nlp; ++r) {
                double ady = 0.0;
                for (auto [v, a] : prob.lp[r].a) ady += a * dy[v];
                dzl[r] = rd_lp[r] - ady;
                dxl[r] = target / zl[r] - xl[r] - xl[r] * dzl[r] / zl[r];
                if (with_corr) dxl[r] -= corr_lp[r];
            }
        };
        auto step_lengths = [&]() {
            double ap = max_step_lp(xl, dxl);
            double ad = max_step_lp(zl, dzl);
            for (std::size_t k = 0; k < nb; ++k) {
                ap = std::min(ap, max_step_psd(cholX[k], st[k].dX));
                ad = std::min(ad, max_step_psd(cholZ[k], st[k].dZ));
            }
            return std::pair{std::min(1.0, frac * ap), std::min(1.0, frac * ad)};
        };

        // Predictor.
        newton(0.0, false);
        auto [ap, ad] = step_lengths();
        double xz_aff = (xl + ap * dxl).dot(zl + ad * dzl);
        for (std::size_t k = 0; k < nb; ++k)
            xz_aff += (st[k].X + ap * st[k].dX).cwiseProduct(st[k].Z + ad * st[k].dZ).sum();
        const double mu_aff = std::max(0.0, xz_aff / std::max(1, ntot));
        double sigma = std::pow(mu_aff / mu, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector.
        for (std::size_t k = 0; k < nb; ++k) corr[k] = st[k].dX * st[k].dZ * st[k].Zinv;
        for (Eigen::Index r = 0; r < nlp; ++r) corr_lp[r] = dxl[r] * dzl[r] / zl[r];
        newton(sigma * mu, true);
        std::tie(ap, ad) = step_lengths();
        if (!dy.allFinite()) {
            res.status = Status::Breakdown;
            append_log(res.log, "iter %d: non-finite search direction\n", iter);
            break;
        }

        for (std::size_t k = 0; k < nb; ++k) {
            st[k].X = sym(st[k].X + ap * st[k].dX);
            st[k].Z = sym(st[k].Z + ad * st[k].dZ);
        }
        xl += ap * dxl;
        zl += ad * dzl;
        y += ad * dy;
        res.status = Status::MaxIter;
    }
    return finish();
}

}  // namespace heatctl::sdp
