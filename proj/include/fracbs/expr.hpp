#pragma once

// Payoff-expression DSL: an immutable expression tree with parsing, printing,
// evaluation, exact symbolic differentiation and algebraic simplification.
//
// Subtraction, division and negation have no node kinds of their own:
//   a - b  ->  Add(a, Mul(-1, b))
//   a / b  ->  Mul(a, Pow(b, -1))
//   -a     ->  Mul(-1, a)
// Add and Mul are n-ary. Every other kind has a fixed arity.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracbs::expr {

enum class Var : std::uint8_t { s1, s2, u, v, x, y };
inline constexpr std::size_t kVarCount = 6;

std::string_view var_name(Var v) noexcept;
std::optional<Var> var_from_name(std::string_view name) noexcept;

enum class Kind : std::uint8_t { Constant, Variable, Add, Mul, Pow, Exp, Ln, Sin, Cos, Max };

std::string_view kind_name(Kind k) noexcept;

struct Node;

class Expr {
public:
    /// The constant 0.
    Expr();

    /// Throws ValidationError for NaN or infinity. -0.0 is stored as 0.0.
    static Expr constant(double value);
    static Expr variable(Var v);
    /// n-ary sum; an empty list is 0, a single element is returned unchanged.
    static Expr add(std::vector<Expr> terms);
    /// n-ary product; an empty list is 1, a single element is returned unchanged.
    static Expr mul(std::vector<Expr> factors);
    static Expr pow(Expr base, Expr exponent);
    /// One-argument function application; `fn` is Exp, Ln, Sin or Cos.
    static Expr apply(Kind fn, Expr argument);
    static Expr max(Expr a, Expr b);

    Kind kind() const noexcept;
    double value() const noexcept;  // Constant nodes only
    Var var() const noexcept;       // Variable nodes only
    std::span<const Expr> args() const noexcept;
    const Expr& arg(std::size_t i) const noexcept { return args()[i]; }

    bool is_constant() const noexcept { return kind() == Kind::Constant; }
    bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

    /// Bit i set when Var(i) occurs somewhere in the tree.
    std::uint8_t var_mask() const noexcept;
    bool depends_on(Var v) const noexcept {
        return (var_mask() >> static_cast<unsigned>(v)) & 1u;
    }
    bool contains_max() const noexcept;
    /// Number of nodes, counting shared subtrees once per occurrence.
    std::size_t node_count() const noexcept;
    std::size_t hash() const noexcept;

    friend bool operator==(const Expr& a, const Expr& b) noexcept;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Expr make(Kind kind, std::vector<Expr> args);

    std::shared_ptr<const Node> node_;
};

/// Canonical total order used for like-term collection and printing:
/// constants first, then by (function name, variable name, exponent).
/// Returns <0, 0, >0.
int compare(const Expr& a, const Expr& b) noexcept;

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const noexcept { return compare(a, b) < 0; }
};

// Raw builders. They do not simplify.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr max(const Expr& a, const Expr& b);

inline Expr num(double value) { return Expr::constant(value); }
inline Expr var(Var v) { return Expr::variable(v); }

inline constexpr std::size_t kMaxInputBytes = 64 * 1024;

/// Parses `text` and returns the simplified tree. `pi` becomes the constant pi.
/// Throws ParseError (with byte position) on syntax errors, unknown
/// identifiers, wrong function arity and oversize input.
Expr parse_expr(std::string_view text);

/// Same grammar as parse_expr but returns the tree exactly as written.
Expr parse_expr_raw(std::string_view text);

/// Infix text. parse_expr(to_string(e)) is structurally equal to simplify(e).
std::string to_string(const Expr& e);

/// Variable bindings for evaluation.
class Bindings {
public:
    Bindings() = default;
    Bindings(std::initializer_list<std::pair<Var, double>> values);

    Bindings& set(Var v, double value) noexcept;
    std::optional<double> get(Var v) const noexcept;

private:
    std::array<double, kVarCount> values_{};
    std::array<bool, kVarCount> bound_{};
};

/// IEEE double evaluation. Throws DomainError for an unbound variable, ln of a
/// non-positive value, division by zero, a negative base with a non-integer
/// exponent, or any non-finite intermediate.
double eval_expr(const Expr& e, const Bindings& env);

/// Exact symbolic derivative, simplified. Throws ValidationError when the
/// tree contains `max`.
Expr differentiate(const Expr& e, Var v);

/// Constant folding, neutral-element removal, flattening, expansion of
/// products over sums, power collection and like-term collection into a
/// canonically ordered sum of products. Idempotent.
///
/// A collected coefficient whose magnitude is within a few ulps of the
/// magnitudes that cancelled into it is treated as exact zero.
Expr simplify(const Expr& e);

/// Replaces every `max(a, b)` by its non-constant branch. Throws
/// ValidationError when both branches are non-constant.
Expr strip_max(const Expr& e);

/// Replaces every occurrence of `v` by `replacement` (no simplification).
Expr substitute(const Expr& e, Var v, const Expr& replacement);

/// Structural node for Expr. Exposed for visitors; construct through Expr.
struct Node {
    Kind kind = Kind::Constant;
    Var var = Var::s1;
    double value = 0.0;
    std::vector<Expr> args;
    std::size_t hash = 0;
    std::size_t count = 1;
    std::uint8_t var_mask = 0;
    bool has_max = false;
};

}  // namespace fracbs::expr
