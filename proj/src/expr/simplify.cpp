#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fracbs/error.hpp"
#include "fracbs/expr.hpp"

namespace fracbs::expr {

namespace {

// Cancellation below this many ulps of the contributing magnitudes is zero.
constexpr double kCancelUlps = 4.0;

Expr folded(double value) {
    if (!std::isfinite(value)) throw NumericalError("constant overflow during simplification");
    return num(value);
}

bool is_integer(const Expr& e) { return e.is_constant() && e.value() == std::trunc(e.value()); }

bool cancelled(double sum, double magnitude) {
    return std::abs(sum) <= kCancelUlps * std::numeric_limits<double>::epsilon() * magnitude;
}

Expr make_add(std::vector<Expr> terms);
Expr make_mul(std::vector<Expr> factors);
Expr make_pow(const Expr& base, const Expr& exponent);

Expr make_func(Kind kind, const Expr& a) {
    if (a.is_constant()) {
        const double x = a.value();
        double r = std::numeric_limits<double>::quiet_NaN();
        switch (kind) {
            case Kind::Exp: r = std::exp(x); break;
            case Kind::Ln: r = x > 0.0 ? std::log(x) : r; break;
            case Kind::Sin: r = std::sin(x); break;
            case Kind::Cos: r = std::cos(x); break;
            default: break;
        }
        // Out-of-domain or overflowing constants stay symbolic so that
        // evaluation reports them.
        if (std::isfinite(r)) return num(r);
    }
    if (kind == Kind::Ln && a.kind() == Kind::Exp) return a.arg(0);
    return Expr::apply(kind, a);
}

Expr make_pow(const Expr& b, const Expr& x) {
    if (x.is_constant(0.0)) return num(1.0);
    if (x.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return num(1.0);
    if (b.is_constant() && x.is_constant()) {
        const double bv = b.value(), xv = x.value();
        const bool defined = !(bv == 0.0 && xv < 0.0) && (bv >= 0.0 || is_integer(x));
        if (defined) {
            const double r = std::pow(bv, xv);
            if (std::isfinite(r)) return num(r);
        }
        return Expr::pow(b, x);
    }
    if (b.is_constant(0.0) && x.is_constant() && x.value() > 0.0) return num(0.0);
    if (b.kind() == Kind::Exp) return make_func(Kind::Exp, make_mul({b.arg(0), x}));
    if (is_integer(x)) {
        if (b.kind() == Kind::Pow) return make_pow(b.arg(0), make_mul({b.arg(1), x}));
        if (b.kind() == Kind::Mul) {
            std::vector<Expr> f;
            f.reserve(b.args().size());
            for (const Expr& a : b.args()) f.push_back(make_pow(a, x));
            return make_mul(std::move(f));
        }
    }
    return Expr::pow(b, x);
}

Expr make_mul(std::vector<Expr> in) {
    double coeff = 1.0;
    std::vector<Expr> factors;

    for (int pass = 0;; ++pass) {
        std::vector<Expr> flat;
        flat.reserve(in.size());
        for (Expr& f : in) {
            if (f.is_constant()) {
                coeff *= f.value();
            } else if (f.kind() == Kind::Mul) {
                for (const Expr& g : f.args()) {
                    if (g.is_constant()) coeff *= g.value();
                    else flat.push_back(g);
                }
            } else {
                flat.push_back(std::move(f));
            }
        }
        if (!std::isfinite(coeff)) throw NumericalError("constant overflow during simplification");
        if (coeff == 0.0) return num(0.0);

        std::map<Expr, std::vector<Expr>, ExprLess> powers;
        std::vector<Expr> exp_args;
        for (const Expr& f : flat) {
            if (f.kind() == Kind::Exp) exp_args.push_back(f.arg(0));
            else if (f.kind() == Kind::Pow) powers[f.arg(0)].push_back(f.arg(1));
            else powers[f].push_back(num(1.0));
        }

        factors.clear();
        bool again = false;
        for (auto& [base, exps] : powers) {
            Expr p = make_pow(base, make_add(std::move(exps)));
            if (p.is_constant()) coeff *= p.value();
            else {
                again = again || p.kind() == Kind::Mul || p.kind() == Kind::Exp;
                factors.push_back(std::move(p));
            }
        }
        if (!exp_args.empty()) {
            Expr e = make_func(Kind::Exp, make_add(std::move(exp_args)));
            if (e.is_constant()) coeff *= e.value();
            else factors.push_back(std::move(e));
        }
        if (!again || pass > 8) break;
        in = std::move(factors);
        factors = {};
    }
    if (!std::isfinite(coeff)) throw NumericalError("constant overflow during simplification");
    if (coeff == 0.0) return num(0.0);

    // Distribute over sums so that like terms can be collected.
    auto first_sum = std::find_if(factors.begin(), factors.end(),
                                  [](const Expr& f) { return f.kind() == Kind::Add; });
    if (first_sum != factors.end()) {
        Expr sum = *first_sum;
        factors.erase(first_sum);
        factors.push_back(folded(coeff));
        Expr rest = make_mul(std::move(factors));
        std::vector<Expr> terms;
        terms.reserve(sum.args().size());
        for (const Expr& t : sum.args()) terms.push_back(make_mul({rest, t}));
        return make_add(std::move(terms));
    }

    std::sort(factors.begin(), factors.end(), ExprLess{});
    if (coeff != 1.0 || factors.empty()) factors.insert(factors.begin(), folded(coeff));
    return Expr::mul(std::move(factors));
}

struct Accum {
    double sum = 0.0;
    double magnitude = 0.0;
    void add(double x) {
        sum += x;
        magnitude += std::abs(x);
    }
};

Expr make_add(std::vector<Expr> in) {
    Accum constant;
    std::map<Expr, Accum, ExprLess> like;

    auto take = [&](const Expr& t) {
        if (t.is_constant()) {
            constant.add(t.value());
            return;
        }
        if (t.kind() == Kind::Mul && t.arg(0).is_constant()) {
            auto a = t.args();
            std::vector<Expr> rest(a.begin() + 1, a.end());
            like[Expr::mul(std::move(rest))].add(a[0].value());
        } else {
            like[t].add(1.0);
        }
    };
    for (const Expr& t : in) {
        if (t.kind() == Kind::Add) {
            for (const Expr& u : t.args()) take(u);
        } else {
            take(t);
        }
    }

    std::vector<Expr> terms;
    terms.reserve(like.size() + 1);
    for (const auto& [rest, acc] : like) {
        if (!std::isfinite(acc.sum)) throw NumericalError("coefficient overflow during simplification");
        if (acc.sum == 0.0 || cancelled(acc.sum, acc.magnitude)) continue;
        if (acc.sum == 1.0) {
            terms.push_back(rest);
        } else if (rest.kind() == Kind::Mul) {
            std::vector<Expr> f;
            f.reserve(rest.args().size() + 1);
            f.push_back(num(acc.sum));
            f.insert(f.end(), rest.args().begin(), rest.args().end());
            terms.push_back(Expr::mul(std::move(f)));
        } else {
            terms.push_back(Expr::mul({num(acc.sum), rest}));
        }
    }
    if (!std::isfinite(constant.sum)) throw NumericalError("constant overflow during simplification");
    if (constant.sum != 0.0 && !cancelled(constant.sum, constant.magnitude))
        terms.push_back(num(constant.sum));
    return Expr::add(std::move(terms));
}

}  // namespace

Expr simplify(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::Variable: return e;
        case Kind::Add:
        case Kind::Mul: {
            std::vector<Expr> args;
            args.reserve(e.args().size());
            for (const Expr& a : e.args()) args.push_back(simplify(a));
            return e.kind() == Kind::Add ? make_add(std::move(args)) : make_mul(std::move(args));
        }
        case Kind::Pow: return make_pow(simplify(e.arg(0)), simplify(e.arg(1)));
        case Kind::Max: {
            Expr a = simplify(e.arg(0));
            Expr b = simplify(e.arg(1));
            if (a.is_constant() && b.is_constant()) return num(std::fmax(a.value(), b.value()));
            return Expr::max(a, b);
        }
        default: return make_func(e.kind(), simplify(e.arg(0)));
    }
}

}  // namespace fracbs::expr
