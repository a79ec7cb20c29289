#include "fracbs/error.hpp"
#include "fracbs/expr.hpp"

namespace fracbs::expr {

namespace {

Expr d(const Expr& e, Var v) {
    if (!e.depends_on(v)) return num(0.0);
    switch (e.kind()) {
        case Kind::Constant: return num(0.0);
        case Kind::Variable: return num(1.0);
        case Kind::Add: {
            std::vector<Expr> terms;
            for (const Expr& a : e.args()) {
                if (a.depends_on(v)) terms.push_back(d(a, v));
            }
            return Expr::add(std::move(terms));
        }
        case Kind::Mul: {
            // Product rule: sum over factors of (d factor) * (the others).
            auto f = e.args();
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (!f[i].depends_on(v)) continue;
                std::vector<Expr> prod;
                prod.reserve(f.size());
                prod.push_back(d(f[i], v));
                for (std::size_t j = 0; j < f.size(); ++j) {
                    if (j != i) prod.push_back(f[j]);
                }
                terms.push_back(Expr::mul(std::move(prod)));
            }
            return Expr::add(std::move(terms));
        }
        case Kind::Pow: {
            const Expr& b = e.arg(0);
            const Expr& x = e.arg(1);
            if (!x.depends_on(v)) {
                return Expr::mul({x, Expr::pow(b, x - num(1.0)), d(b, v)});
            }
            if (!b.depends_on(v)) {
                return Expr::mul({e, ln(b), d(x, v)});
            }
            // b^x * (x' ln b + x b' / b)
            return Expr::mul(
                {e, d(x, v) * ln(b) + Expr::mul({x, d(b, v), Expr::pow(b, num(-1.0))})});
        }
        case Kind::Exp: return Expr::mul({e, d(e.arg(0), v)});
        case Kind::Ln: return Expr::mul({d(e.arg(0), v), Expr::pow(e.arg(0), num(-1.0))});
        case Kind::Sin: return Expr::mul({cos(e.arg(0)), d(e.arg(0), v)});
        case Kind::Cos: return Expr::mul({num(-1.0), sin(e.arg(0)), d(e.arg(0), v)});
        case Kind::Max:
            throw ValidationError("cannot differentiate through max(); strip it to its smooth branch first");
    }
    return num(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, Var v) {
    if (e.contains_max())
        throw ValidationError("cannot differentiate through max(); strip it to its smooth branch first");
    return simplify(d(e, v));
}

}  // namespace fracbs::expr
