#include "fracbs/expr.hpp"

#include <bit>
#include <cmath>
#include <functional>

#include "fracbs/error.hpp"

namespace fracbs::expr {

namespace {

constexpr std::array<std::string_view, kVarCount> kVarNames = {"s1", "s2", "u", "v", "x", "y"};

std::size_t mix(std::size_t seed, std::size_t value) noexcept {
    return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t arity(Kind k) noexcept {
    switch (k) {
        case Kind::Constant:
        case Kind::Variable: return 0;
        case Kind::Exp:
        case Kind::Ln:
        case Kind::Sin:
        case Kind::Cos: return 1;
        case Kind::Pow:
        case Kind::Max: return 2;
        case Kind::Add:
        case Kind::Mul: return 0;  // n-ary, checked separately
    }
    return 0;
}

}  // namespace

std::string_view var_name(Var v) noexcept { return kVarNames[static_cast<std::size_t>(v)]; }

std::optional<Var> var_from_name(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kVarCount; ++i) {
        if (kVarNames[i] == name) return static_cast<Var>(i);
    }
    return std::nullopt;
}

std::string_view kind_name(Kind k) noexcept {
    switch (k) {
        case Kind::Constant: return "const";
        case Kind::Variable: return "var";
        case Kind::Add: return "add";
        case Kind::Mul: return "mul";
        case Kind::Pow: return "pow";
        case Kind::Exp: return "exp";
        case Kind::Ln: return "ln";
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Max: return "max";
    }
    return "?";
}

Expr::Expr() {
    static const auto zero = [] {
        auto n = std::make_shared<Node>();
        n->hash = mix(static_cast<std::size_t>(Kind::Constant), std::hash<double>{}(0.0));
        return std::shared_ptr<const Node>(std::move(n));
    }();
    node_ = zero;
}

Expr Expr::constant(double value) {
    if (!std::isfinite(value)) throw ValidationError("expression constants must be finite");
    if (value == 0.0) return Expr();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    n->hash = mix(static_cast<std::size_t>(Kind::Constant), std::hash<double>{}(value));
    return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = v;
    n->var_mask = static_cast<std::uint8_t>(1u << static_cast<unsigned>(v));
    n->hash = mix(static_cast<std::size_t>(Kind::Variable), static_cast<std::size_t>(v) + 1);
    return Expr(std::move(n));
}

Expr Expr::make(Kind kind, std::vector<Expr> args) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ULL;
    for (const Expr& a : args) {
        h = mix(h, a.hash());
        n->count += a.node_count();
        n->var_mask |= a.var_mask();
        n->has_max = n->has_max || a.contains_max();
    }
    n->has_max = n->has_max || kind == Kind::Max;
    n->hash = h;
    n->args = std::move(args);
    return Expr(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
    if (terms.empty()) return Expr();
    if (terms.size() == 1) return std::move(terms.front());
    return make(Kind::Add, std::move(terms));
}

Expr Expr::mul(std::vector<Expr> factors) {
    if (factors.empty()) return constant(1.0);
    if (factors.size() == 1) return std::move(factors.front());
    return make(Kind::Mul, std::move(factors));
}

Expr Expr::pow(Expr base, Expr exponent) {
    return make(Kind::Pow, {std::move(base), std::move(exponent)});
}

Expr Expr::apply(Kind fn, Expr argument) {
    if (arity(fn) != 1) throw ValidationError("not a one-argument function: " + std::string(kind_name(fn)));
    return make(fn, {std::move(argument)});
}

Expr Expr::max(Expr a, Expr b) { return make(Kind::Max, {std::move(a), std::move(b)}); }

Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
Var Expr::var() const noexcept { return node_->var; }
std::span<const Expr> Expr::args() const noexcept { return node_->args; }
std::uint8_t Expr::var_mask() const noexcept { return node_->var_mask; }
bool Expr::contains_max() const noexcept { return node_->has_max; }
std::size_t Expr::node_count() const noexcept { return node_->count; }
std::size_t Expr::hash() const noexcept { return node_->hash; }

bool operator==(const Expr& a, const Expr& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Kind::Constant: return a.value() == b.value();
        case Kind::Variable: return a.var() == b.var();
        default: break;
    }
    auto x = a.args();
    auto y = b.args();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] == y[i])) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Canonical order

namespace {

// Rank of a non-power base. Function applications sort by name.
int base_rank(const Expr& e) noexcept {
    switch (e.kind()) {
        case Kind::Constant: return 0;
        case Kind::Variable: return 1;
        case Kind::Cos:
        case Kind::Exp:
        case Kind::Ln:
        case Kind::Max:
        case Kind::Sin: return 2;
        case Kind::Mul: return 3;
        case Kind::Add: return 4;
        case Kind::Pow: return 5;
    }
    return 6;
}

int cmp_double(double a, double b) noexcept { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_args(std::span<const Expr> a, std::span<const Expr> b) noexcept {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(a[i], b[i]); c != 0) return c;
    }
    return cmp_double(static_cast<double>(a.size()), static_cast<double>(b.size()));
}

int compare_base(const Expr& a, const Expr& b) noexcept {
    int ra = base_rank(a), rb = base_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case Kind::Constant: return cmp_double(a.value(), b.value());
        case Kind::Variable:
            return cmp_double(static_cast<double>(a.var()), static_cast<double>(b.var()));
        case Kind::Pow: return compare_args(a.args(), b.args());
        default: break;
    }
    if (a.kind() != b.kind()) {
        // Both are function applications: order by function name.
        return kind_name(a.kind()) < kind_name(b.kind()) ? -1 : 1;
    }
    return compare_args(a.args(), b.args());
}

}  // namespace

int compare(const Expr& a, const Expr& b) noexcept {
    if (a == b) return 0;
    bool ca = a.is_constant(), cb = b.is_constant();
    if (ca || cb) {
        if (ca && cb) return cmp_double(a.value(), b.value());
        return ca ? -1 : 1;
    }
    static const Expr one = Expr::constant(1.0);
    const Expr& ba = a.kind() == Kind::Pow ? a.arg(0) : a;
    const Expr& bb = b.kind() == Kind::Pow ? b.arg(0) : b;
    const Expr& ea = a.kind() == Kind::Pow ? a.arg(1) : one;
    const Expr& eb = b.kind() == Kind::Pow ? b.arg(1) : one;
    if (int c = compare_base(ba, bb); c != 0) return c;
    return compare(ea, eb);
}

// ---------------------------------------------------------------------------
// Builders

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
    return Expr::mul({a, Expr::pow(b, Expr::constant(-1.0))});
}
Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.value());
    return Expr::mul({Expr::constant(-1.0), a});
}
Expr pow(const Expr& base, const Expr& exponent) { return Expr::pow(base, exponent); }
Expr exp(const Expr& a) { return Expr::apply(Kind::Exp, a); }
Expr ln(const Expr& a) { return Expr::apply(Kind::Ln, a); }
Expr sin(const Expr& a) { return Expr::apply(Kind::Sin, a); }
Expr cos(const Expr& a) { return Expr::apply(Kind::Cos, a); }
Expr max(const Expr& a, const Expr& b) { return Expr::max(a, b); }

// ---------------------------------------------------------------------------

Bindings::Bindings(std::initializer_list<std::pair<Var, double>> values) {
    for (const auto& [v, x] : values) set(v, x);
}

Bindings& Bindings::set(Var v, double value) noexcept {
    auto i = static_cast<std::size_t>(v);
    values_[i] = value;
    bound_[i] = true;
    return *this;
}

std::optional<double> Bindings::get(Var v) const noexcept {
    auto i = static_cast<std::size_t>(v);
    if (!bound_[i]) return std::nullopt;
    return values_[i];
}

Expr strip_max(const Expr& e) {
    if (!e.contains_max()) return e;
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const Expr& a : e.args()) args.push_back(strip_max(a));
    if (e.kind() == Kind::Max) {
        const bool c0 = args[0].var_mask() == 0;
        const bool c1 = args[1].var_mask() == 0;
        if (c1) return args[0];
        if (c0) return args[1];
        throw ValidationError("max(a, b) with two non-constant branches has no single smooth branch");
    }
    switch (e.kind()) {
        case Kind::Add: return Expr::add(std::move(args));
        case Kind::Mul: return Expr::mul(std::move(args));
        case Kind::Pow: return Expr::pow(args[0], args[1]);
        default: return Expr::apply(e.kind(), args[0]);
    }
}

Expr substitute(const Expr& e, Var v, const Expr& replacement) {
    if (!e.depends_on(v)) return e;
    if (e.kind() == Kind::Variable) return replacement;
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const Expr& a : e.args()) args.push_back(substitute(a, v, replacement));
    switch (e.kind()) {
        case Kind::Add: return Expr::add(std::move(args));
        case Kind::Mul: return Expr::mul(std::move(args));
        case Kind::Pow: return Expr::pow(args[0], args[1]);
        case Kind::Max: return Expr::max(args[0], args[1]);
        default: return Expr::apply(e.kind(), args[0]);
    }
}

}  // namespace fracbs::expr
