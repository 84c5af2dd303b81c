#pragma once

// A small registry of decision variables and affine symmetric-matrix
// constraints over them. Only the constraint families used by the theorems
// are supported; every term is linear in exactly one variable.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace heatctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class VarKind { PsdMatrix, FreeMatrix, PositiveScalar, FreeScalar };
enum class Sense { StrictNegative, WeakNonneg };

[[nodiscard]] const char* to_string(VarKind k);
[[nodiscard]] const char* to_string(Sense s);

struct Variable {
    std::string name;
    VarKind kind = VarKind::FreeScalar;
    int order = 1;
    int offset = 0;  // first entry in the flat decision vector
    int count = 1;   // number of scalar entries

    [[nodiscard]] bool is_scalar() const {
        return kind == VarKind::PositiveScalar || kind == VarKind::FreeScalar;
    }
};

// scale * (L' X R + R' X' L). For scalar variables X = x * I_k, where k is the
// row count of L and R.
struct Term {
    int var = 0;
    Matrix L;
    Matrix R;
    double scale = 1.0;
};

struct BlockLayout {
    std::vector<std::string> names;
    std::vector<int> sizes;
    std::vector<int> offsets;
    int total = 0;

    void add(const std::string& name, int size);
    [[nodiscard]] int index(const std::string& name) const;
    [[nodiscard]] Matrix selector(int block) const;  // size x total
};

struct Constraint {
    std::string name;
    int order = 0;
    Sense sense = Sense::StrictNegative;
    Matrix constant;
    std::vector<Term> terms;
    BlockLayout layout;
};

// Rank-two expansion of a constraint: coefficient of flat entry `entry` is the
// sum of coef * (u v' + v u') over its pieces, u and v columns of `pool`.
struct PieceExpansion {
    Matrix pool;
    struct Piece {
        int entry;
        double coef;
        int u;
        int v;
    };
    std::vector<Piece> pieces;  // sorted by entry
};

struct LmiMeta {
    int theorem = 0;
    int N = 0;
    int N0 = 0;
    double delta = 0.0;
    double delta0 = 0.0;
    double delta1 = 0.0;
    double r = 0.0;
    double thetaM = 0.0;
    double tauM = 0.0;
    double zeta_scale = 1.0;  // congruence applied to the zeta row/column
};

class LmiInstance {
public:
    int add_variable(const std::string& name, VarKind kind, int order = 1);
    [[nodiscard]] const Variable& variable(int id) const { return vars_.at(id); }
    [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
    [[nodiscard]] int find_variable(const std::string& name) const;
    [[nodiscard]] int num_entries() const { return num_entries_; }

    Constraint& add_constraint(const std::string& name, BlockLayout layout, Sense sense);
    [[nodiscard]] const std::vector<Constraint>& constraints() const { return cons_; }
    [[nodiscard]] std::vector<Constraint>& constraints() { return cons_; }

    // Block helpers. Each adds S_rb' B S_cb plus its transpose, where S_k
    // selects block k; on a diagonal block that is B + B'.
    // B = scale * X * M
    void place_right(Constraint& c, int var, int rb, int cb, const Matrix& M, double scale = 1.0);
    // B = scale * x * U V'
    void place_scalar(Constraint& c, int var, int rb, int cb, const Matrix& U, const Matrix& V,
                      double scale = 1.0);
    void place_scalar(Constraint& c, int var, int rb, int cb, const Matrix& D, double scale = 1.0);
    // whole matrix += scale * T' X T, X symmetric or scalar
    void add_congruence(Constraint& c, int var, const Matrix& T, double scale = 1.0);
    void place_constant(Constraint& c, int rb, int cb, const Matrix& M);

    // Variable value as a dense matrix (order x order) from the flat vector.
    [[nodiscard]] Matrix unpack(int var, const Vector& x) const;
    [[nodiscard]] Matrix evaluate(const Constraint& c, const Vector& x) const;
    [[nodiscard]] PieceExpansion expand(const Constraint& c) const;

    [[nodiscard]] double constant_norm() const;  // Frobenius over all constraints

    [[nodiscard]] nlohmann::json to_json() const;

    double strictness = 0.0;  // epsilon; 0 means "use the default rule"
    LmiMeta meta;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    int num_entries_ = 0;
};

// Default strictness rule: rel * (1 + ||constant parts||_F).
[[nodiscard]] double default_strictness(const LmiInstance& inst, double rel = 1e-7);

}  // namespace heatctl
