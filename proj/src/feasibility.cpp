#include "heatctl/feasibility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "heatctl/errors.hpp"

namespace heatctl {

const char* to_string(FeasStatus s) {
    switch (s) {
        case FeasStatus::Feasible: return "feasible";
        case FeasStatus::Infeasible: return "infeasible";
        case FeasStatus::SolverFailure: return "solver-failure";
    }
    return "?";
}

namespace {

// Dual-form SDP for the instance. With `with_t` an extra last variable t is
// added to every strict constraint (F <= t I); otherwise strict constraints
// are shifted to F <= -shift I.
sdp::Problem to_sdp(const LmiInstance& inst, bool with_t, double shift, double box) {
    const int ne = inst.num_entries();
    const int t = ne;
    sdp::Problem prob;
    prob.num_vars = ne + (with_t ? 1 : 0);
    prob.b = Vector::Zero(prob.num_vars);

    for (const auto& c : inst.constraints()) {
        const bool strict = c.sense == Sense::StrictNegative;
        const double sign = strict ? 1.0 : -1.0;
        const auto ex = inst.expand(c);
        if (c.order == 1) {
            sdp::LpRow row;
            row.c = strict ? -c.constant(0, 0) - (with_t ? 0.0 : shift) : c.constant(0, 0);
            for (const auto& p : ex.pieces) {
                const double val = 2.0 * p.coef * ex.pool(0, p.u) * ex.pool(0, p.v);
                if (!row.a.empty() && row.a.back().first == p.entry)
                    row.a.back().second += sign * val;
                else
                    row.a.emplace_back(p.entry, sign * val);
            }
            if (strict && with_t) row.a.emplace_back(t, -1.0);
            prob.lp.push_back(std::move(row));
            continue;
        }
        sdp::Block blk;
        blk.order = c.order;
        blk.C = strict ? Matrix(-c.constant) : c.constant;
        if (strict && !with_t) blk.C.diagonal().array() -= shift;
        const auto P = ex.pool.cols();
        blk.pool.resize(c.order, P + (strict && with_t ? c.order : 0));
        blk.pool.leftCols(P) = ex.pool;
        for (const auto& p : ex.pieces) blk.pieces.push_back({p.entry, sign * p.coef, p.u, p.v});
        if (strict && with_t) {
            blk.pool.rightCols(c.order).setIdentity();
            for (int k = 0; k < c.order; ++k)
                blk.pieces.push_back({t, -0.5, static_cast<int>(P) + k, static_cast<int>(P) + k});
        }
        prob.blocks.push_back(std::move(blk));
    }

    for (int e = 0; e < ne; ++e) {
        prob.lp.push_back({box, {{e, 1.0}}});
        prob.lp.push_back({box, {{e, -1.0}}});
    }
    if (with_t) {
        prob.lp.push_back({1.0, {{t, -1.0}}});
        prob.lp.push_back({box, {{t, 1.0}}});
        prob.b[t] = -1.0;
    }
    return prob;
}

double min_slack(const std::vector<ConstraintCheck>& checks) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) s = std::min(s, c.slack);
    return s;
}

}  // namespace

std::vector<ConstraintCheck> verify_point(const LmiInstance& inst, const Vector& x, double threshold) {
    std::vector<ConstraintCheck> out;
    out.reserve(inst.constraints().size());
    for (const auto& c : inst.constraints()) {
        const Matrix F = inst.evaluate(c, x);
        Eigen::SelfAdjointEigenSolver<Matrix> es(F, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        ConstraintCheck chk;
        chk.name = c.name;
        chk.sense = c.sense;
        if (!ev.allFinite()) {
            chk.extreme = std::numeric_limits<double>::quiet_NaN();
            chk.slack = -std::numeric_limits<double>::infinity();
        } else if (c.sense == Sense::StrictNegative) {
            chk.extreme = ev.maxCoeff();
            chk.slack = -threshold - chk.extreme;
        } else {
            chk.extreme = ev.minCoeff();
            chk.slack = chk.extreme + 1e-12 * (1.0 + F.norm());
        }
        out.push_back(std::move(chk));
    }
    return out;
}

FeasibilityReport check_feasibility(const LmiInstance& inst, const FeasibilityOptions& opts) {
    FeasibilityReport rep;
    const double eps = inst.strictness > 0.0 ? inst.strictness : default_strictness(inst);
    rep.strictness = eps;
    const int ne = inst.num_entries();

    const auto prob = to_sdp(inst, true, 0.0, opts.box);
    sdp::Settings set;
    set.tol = opts.tol;
    set.max_iter = opts.max_iter;
    set.parallel = opts.parallel;
    const auto start = std::chrono::steady_clock::now();
    bool timed_out = false;
    set.early_stop = [&](const Vector& y) {
        if (opts.time_limit > 0.0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
                opts.time_limit) {
            timed_out = true;
            return true;
        }
        if (!(y[ne] <= -eps)) return false;
        return min_slack(verify_point(inst, y.head(ne), eps)) >= 0.0;
    };
    const auto res = opts.oracle ? opts.oracle(prob, set) : sdp::solve(prob, set);

    rep.iterations = res.iterations;
    rep.solver_status = timed_out ? "time-limit" : sdp::to_string(res.status);
    if (opts.keep_log) rep.log = res.log;
    if (res.y.size() != prob.num_vars) {
        rep.status = FeasStatus::SolverFailure;
        rep.log = res.log;
        return rep;
    }
    rep.t_star = res.y[ne];
    rep.x = res.y.head(ne);
    rep.checks = verify_point(inst, rep.x, 0.5 * eps);
    rep.margin = min_slack(rep.checks);

    const bool verified = rep.margin >= 0.0;
    const bool converged = res.status == sdp::Status::Optimal ||
                           (res.gap < 1e-6 && res.pinf < 1e-6 && res.dinf < 1e-6);
    // A nearly feasible primal point bounds t from below by -pobj.
    const bool certified = res.pinf < 1e-6 && res.primal_obj < eps;
    if (verified) {
        rep.status = FeasStatus::Feasible;
    } else if (!timed_out && ((converged && rep.t_star > -eps) || certified)) {
        rep.status = FeasStatus::Infeasible;
    } else {
        rep.status = FeasStatus::SolverFailure;
        if (!opts.keep_log) rep.log = res.log;
    }
    return rep;
}

OptimizeResult minimize(const LmiInstance& inst, const Vector& cost, const FeasibilityOptions& opts) {
    const int ne = inst.num_entries();
    if (cost.size() != ne) throw PreconditionError("cost length does not match the instance");
    const double eps = inst.strictness > 0.0 ? inst.strictness : default_strictness(inst);
    auto prob = to_sdp(inst, false, eps, opts.box);
    prob.b = -cost;
    sdp::Settings set;
    set.tol = opts.tol;
    set.max_iter = opts.max_iter;
    set.parallel = opts.parallel;
    const auto res = opts.oracle ? opts.oracle(prob, set) : sdp::solve(prob, set);
    OptimizeResult out;
    out.status = res.status;
    out.x = res.y;
    out.objective = res.y.size() == ne ? cost.dot(res.y) : 0.0;
    out.log = res.log;
    return out;
}

nlohmann::json FeasibilityReport::to_json(const LmiInstance& inst, bool with_values) const {
    using nlohmann::json;
    json j;
    j["status"] = heatctl::to_string(status);
    j["margin"] = margin;
    j["strictness"] = strictness;
    j["t_star"] = t_star;
    j["iterations"] = iterations;
    j["solver_status"] = solver_status;
    j["theorem"] = inst.meta.theorem;
    j["N"] = inst.meta.N;
    j["N0"] = inst.meta.N0;
    j["r"] = inst.meta.r;
    j["thetaM"] = inst.meta.thetaM;
    j["tauM"] = inst.meta.tauM;
    j["delta"] = inst.meta.delta;
    j["delta0"] = inst.meta.delta0;
    j["delta1"] = inst.meta.delta1;
    json cs = json::array();
    for (const auto& c : checks)
        cs.push_back({{"name", c.name}, {"sense", heatctl::to_string(c.sense)},
                      {"extreme_eigenvalue", c.extreme}, {"slack", c.slack}});
    j["constraints"] = cs;
    if (with_values && x.size() == inst.num_entries()) {
        json vals = json::object();
        for (int v = 0; v < static_cast<int>(inst.variables().size()); ++v) {
            const Matrix X = inst.unpack(v, x);
            json rows = json::array();
            for (Eigen::Index p = 0; p < X.rows(); ++p) {
                json row = json::array();
                for (Eigen::Index q = 0; q < X.cols(); ++q) row.push_back(X(p, q));
                rows.push_back(row);
            }
            vals[inst.variable(v).name] = rows;
        }
        j["values"] = vals;
    }
    return j;
}

}  // namespace heatctl
