#include "heatctl/lmi_instance.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include "heatctl/errors.hpp"

namespace heatctl {

const char* to_string(VarKind k) {
    switch (k) {
        case VarKind::PsdMatrix: return "psd-matrix";
        case VarKind::FreeMatrix: return "free-matrix";
        case VarKind::PositiveScalar: return "positive-scalar";
        case VarKind::FreeScalar: return "free-scalar";
    }
    return "?";
}

const char* to_string(Sense s) {
    return s == Sense::StrictNegative ? "strict-negative" : "weak-nonneg";
}

void BlockLayout::add(const std::string& name, int size) {
    if (size <= 0) throw DomainError("block size must be positive: " + name);
    names.push_back(name);
    sizes.push_back(size);
    offsets.push_back(total);
    total += size;
}

int BlockLayout::index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw PreconditionError("unknown block " + name);
}

Matrix BlockLayout::selector(int block) const {
    Matrix S = Matrix::Zero(sizes.at(block), total);
    S.block(0, offsets[block], sizes[block], sizes[block]).setIdentity();
    return S;
}

int LmiInstance::add_variable(const std::string& name, VarKind kind, int order) {
    if (find_variable(name) >= 0) throw PreconditionError("duplicate variable " + name);
    Variable v;
    v.name = name;
    v.kind = kind;
    v.order = (kind == VarKind::PositiveScalar || kind == VarKind::FreeScalar) ? 1 : order;
    if (v.order <= 0) throw DomainError("variable order must be positive: " + name);
    v.offset = num_entries_;
    switch (kind) {
        case VarKind::PsdMatrix: v.count = v.order * (v.order + 1) / 2; break;
        case VarKind::FreeMatrix: v.count = v.order * v.order; break;
        default: v.count = 1;
    }
    num_entries_ += v.count;
    vars_.push_back(v);
    const int id = static_cast<int>(vars_.size()) - 1;

    if (kind == VarKind::PsdMatrix || kind == VarKind::PositiveScalar) {
        BlockLayout lay;
        lay.add(name, v.order);
        auto& c = add_constraint(name + " > 0", lay, Sense::StrictNegative);
        place_right(c, id, 0, 0, Matrix::Identity(v.order, v.order), -0.5);
    }
    return id;
}

int LmiInstance::find_variable(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    return -1;
}

Constraint& LmiInstance::add_constraint(const std::string& name, BlockLayout layout, Sense sense) {
    Constraint c;
    c.name = name;
    c.order = layout.total;
    c.sense = sense;
    c.constant = Matrix::Zero(c.order, c.order);
    c.layout = std::move(layout);
    cons_.push_back(std::move(c));
    return cons_.back();
}

void LmiInstance::place_right(Constraint& c, int var, int rb, int cb, const Matrix& M, double scale) {
    const auto& v = vars_.at(var);
    const int nr = c.layout.sizes.at(rb);
    const int nc = c.layout.sizes.at(cb);
    if (M.rows() != nr || M.cols() != nc)
        throw PreconditionError("place_right: block shape mismatch in " + c.name);
    if (!v.is_scalar() && v.order != nr)
        throw PreconditionError("place_right: variable order mismatch for " + v.name);
    c.terms.push_back(Term{var, c.layout.selector(rb), M * c.layout.selector(cb), scale});
}

void LmiInstance::place_scalar(Constraint& c, int var, int rb, int cb, const Matrix& U,
                               const Matrix& V, double scale) {
    const auto& v = vars_.at(var);
    if (!v.is_scalar()) throw PreconditionError("place_scalar needs a scalar variable: " + v.name);
    if (U.rows() != c.layout.sizes.at(rb) || V.rows() != c.layout.sizes.at(cb) ||
        U.cols() != V.cols())
        throw PreconditionError("place_scalar: block shape mismatch in " + c.name);
    c.terms.push_back(
        Term{var, V.transpose() * c.layout.selector(cb), U.transpose() * c.layout.selector(rb), scale});
}

void LmiInstance::place_scalar(Constraint& c, int var, int rb, int cb, const Matrix& D, double scale) {
    place_scalar(c, var, rb, cb, D, Matrix::Identity(D.cols(), D.cols()), scale);
}

void LmiInstance::add_congruence(Constraint& c, int var, const Matrix& T, double scale) {
    const auto& v = vars_.at(var);
    if (T.cols() != c.order) throw PreconditionError("congruence width mismatch in " + c.name);
    if (v.kind == VarKind::FreeMatrix)
        throw PreconditionError("congruence needs a symmetric variable: " + v.name);
    if (!v.is_scalar() && T.rows() != v.order)
        throw PreconditionError("congruence height mismatch for " + v.name);
    c.terms.push_back(Term{var, T, T, 0.5 * scale});
}

void LmiInstance::place_constant(Constraint& c, int rb, int cb, const Matrix& M) {
    const int r0 = c.layout.offsets.at(rb);
    const int c0 = c.layout.offsets.at(cb);
    if (M.rows() != c.layout.sizes[rb] || M.cols() != c.layout.sizes[cb])
        throw PreconditionError("place_constant: block shape mismatch in " + c.name);
    c.constant.block(r0, c0, M.rows(), M.cols()) += M;
    c.constant.block(c0, r0, M.cols(), M.rows()) += M.transpose();
}

Matrix LmiInstance::unpack(int var, const Vector& x) const {
    const auto& v = vars_.at(var);
    const int n = v.order;
    Matrix X(n, n);
    switch (v.kind) {
        case VarKind::PsdMatrix:
            for (int q = 0; q < n; ++q)
                for (int p = 0; p <= q; ++p) X(p, q) = X(q, p) = x[v.offset + q * (q + 1) / 2 + p];
            break;
        case VarKind::FreeMatrix:
            for (int q = 0; q < n; ++q)
                for (int p = 0; p < n; ++p) X(p, q) = x[v.offset + q * n + p];
            break;
        default: X(0, 0) = x[v.offset];
    }
    return X;
}

Matrix LmiInstance::evaluate(const Constraint& c, const Vector& x) const {
    if (x.size() < num_entries_) throw PreconditionError("decision vector too short");
    Matrix F = c.constant;
    for (const auto& t : c.terms) {
        const auto& v = vars_[t.var];
        Matrix T;
        if (v.is_scalar())
            T = (t.scale * x[v.offset]) * (t.L.transpose() * t.R);
        else
            T = t.scale * (t.L.transpose() * unpack(t.var, x) * t.R);
        F += T + T.transpose();
    }
    F.triangularView<Eigen::StrictlyLower>() = F.transpose().triangularView<Eigen::StrictlyLower>();
    return F;
}

namespace {

// Deduplicating pool of direction vectors. Each stored vector is scaled so
// its largest-magnitude entry equals one.
class VectorPool {
public:
    explicit VectorPool(int dim) : dim_(dim) {}

    // Returns (column, factor) with v = factor * column, or (-1, 0) for zero.
    std::pair<int, double> add(const Eigen::Ref<const Vector>& v) {
        Eigen::Index imax = 0;
        const double amax = v.cwiseAbs().maxCoeff(&imax);
        if (amax == 0.0) return {-1, 0.0};
        const double s = v[imax];
        Vector w = v / s;
        std::string key(reinterpret_cast<const char*>(w.data()), sizeof(double) * w.size());
        auto [it, inserted] = index_.try_emplace(std::move(key), static_cast<int>(cols_.size()));
        if (inserted) cols_.push_back(std::move(w));
        return {it->second, s};
    }

    Matrix matrix() const {
        Matrix P(dim_, static_cast<Eigen::Index>(cols_.size()));
        for (std::size_t k = 0; k < cols_.size(); ++k) P.col(static_cast<Eigen::Index>(k)) = cols_[k];
        return P;
    }

private:
    int dim_;
    std::vector<Vector> cols_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace

PieceExpansion LmiInstance::expand(const Constraint& c) const {
    // Merge terms that share a variable and a left factor.
    struct Merged {
        int var;
        Matrix L;
        Matrix R;
    };
    std::vector<Merged> merged;
    for (const auto& t : c.terms) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const Merged& m) {
            return m.var == t.var && m.L.rows() == t.L.rows() && m.L == t.L;
        });
        if (it == merged.end())
            merged.push_back(Merged{t.var, t.L, t.scale * t.R});
        else
            it->R += t.scale * t.R;
    }

    VectorPool pool(c.order);
    PieceExpansion out;
    for (const auto& mt : merged) {
        const auto& v = vars_[mt.var];
        const auto k = mt.L.rows();
        std::vector<std::pair<int, double>> l(k), r(k);
        for (Eigen::Index p = 0; p < k; ++p) {
            l[p] = pool.add(mt.L.row(p).transpose());
            r[p] = pool.add(mt.R.row(p).transpose());
        }
        auto emit = [&](int entry, int p, int q) {
            if (l[p].first < 0 || r[q].first < 0) return;
            out.pieces.push_back({entry, l[p].second * r[q].second, l[p].first, r[q].first});
        };
        switch (v.kind) {
            case VarKind::PsdMatrix:
                for (int q = 0; q < v.order; ++q)
                    for (int p = 0; p <= q; ++p) {
                        const int e = v.offset + q * (q + 1) / 2 + p;
                        emit(e, p, q);
                        if (p != q) emit(e, q, p);
                    }
                break;
            case VarKind::FreeMatrix:
                for (int q = 0; q < v.order; ++q)
                    for (int p = 0; p < v.order; ++p) emit(v.offset + q * v.order + p, p, q);
                break;
            default:
                for (Eigen::Index p = 0; p < k; ++p) emit(v.offset, static_cast<int>(p), static_cast<int>(p));
        }
    }

    // Canonical order, then fold duplicates.
    for (auto& p : out.pieces)
        if (p.u > p.v) std::swap(p.u, p.v);
    std::stable_sort(out.pieces.begin(), out.pieces.end(), [](const auto& a, const auto& b) {
        return std::tie(a.entry, a.u, a.v) < std::tie(b.entry, b.u, b.v);
    });
    std::vector<PieceExpansion::Piece> folded;
    for (const auto& p : out.pieces) {
        if (!folded.empty() && folded.back().entry == p.entry && folded.back().u == p.u &&
            folded.back().v == p.v)
            folded.back().coef += p.coef;
        else
            folded.push_back(p);
    }
    std::erase_if(folded, [](const auto& p) { return p.coef == 0.0; });
    out.pieces = std::move(folded);
    out.pool = pool.matrix();
    return out;
}

double LmiInstance::constant_norm() const {
    double s = 0.0;
    for (const auto& c : cons_) s += c.constant.squaredNorm();
    return std::sqrt(s);
}

double default_strictness(const LmiInstance& inst, double rel) {
    return rel * (1.0 + inst.constant_norm());
}

nlohmann::json LmiInstance::to_json() const {
    using nlohmann::json;
    json j;
    j["meta"] = {{"theorem", meta.theorem}, {"N", meta.N},           {"N0", meta.N0},
                 {"delta", meta.delta},     {"delta0", meta.delta0}, {"delta1", meta.delta1},
                 {"r", meta.r},             {"thetaM", meta.thetaM}, {"tauM", meta.tauM},
                 {"zeta_scale", meta.zeta_scale}};
    j["strictness"] = strictness > 0.0 ? strictness : default_strictness(*this);
    j["num_entries"] = num_entries_;
    json vars = json::array();
    for (const auto& v : vars_)
        vars.push_back({{"name", v.name}, {"kind", to_string(v.kind)}, {"order", v.order},
                        {"offset", v.offset}, {"count", v.count}});
    j["variables"] = vars;

    auto upper_triplets = [](const Matrix& A) {
        json t = json::array();
        for (Eigen::Index q = 0; q < A.cols(); ++q)
            for (Eigen::Index p = 0; p <= q; ++p)
                if (A(p, q) != 0.0) t.push_back({p, q, A(p, q)});
        return t;
    };

    json cons = json::array();
    for (const auto& c : cons_) {
        json jc;
        jc["name"] = c.name;
        jc["sense"] = to_string(c.sense);
        jc["order"] = c.order;
        json blocks = json::array();
        for (std::size_t b = 0; b < c.layout.names.size(); ++b)
            blocks.push_back({{"name", c.layout.names[b]}, {"size", c.layout.sizes[b]}});
        jc["blocks"] = blocks;
        json rows = json::array();
        for (Eigen::Index p = 0; p < c.order; ++p) {
            json row = json::array();
            for (Eigen::Index q = 0; q < c.order; ++q) row.push_back(c.constant(p, q));
            rows.push_back(row);
        }
        jc["constant"] = rows;

        const auto ex = expand(c);
        json coeffs = json::array();
        std::size_t a = 0;
        while (a < ex.pieces.size()) {
            const int e = ex.pieces[a].entry;
            Matrix A = Matrix::Zero(c.order, c.order);
            for (; a < ex.pieces.size() && ex.pieces[a].entry == e; ++a) {
                const auto& p = ex.pieces[a];
                const Matrix uv = ex.pool.col(p.u) * ex.pool.col(p.v).transpose();
                A += p.coef * (uv + uv.transpose());
            }
            coeffs.push_back({{"entry", e}, {"triplets", upper_triplets(A)}});
        }
        jc["coefficients"] = coeffs;
        cons.push_back(jc);
    }
    j["constraints"] = cons;
    return j;
}

}  // namespace heatctl
