#include <cmath>

#include "fracbs/error.hpp"
#include "fracbs/expr.hpp"

namespace fracbs::expr {

namespace {

double checked(double value, const char* what) {
    if (!std::isfinite(value))
        throw DomainError(std::string("non-finite result in ") + what);
    return value;
}

}  // namespace

double eval_expr(const Expr& e, const Bindings& env) {
    switch (e.kind()) {
        case Kind::Constant: return e.value();
        case Kind::Variable: {
            auto v = env.get(e.var());
            if (!v) throw DomainError("unbound variable '" + std::string(var_name(e.var())) + "'");
            return *v;
        }
        case Kind::Add: {
            double s = 0.0;
            for (const Expr& a : e.args()) s += eval_expr(a, env);
            return checked(s, "sum");
        }
        case Kind::Mul: {
            double p = 1.0;
            for (const Expr& a : e.args()) p *= eval_expr(a, env);
            return checked(p, "product");
        }
        case Kind::Pow: {
            const double b = eval_expr(e.arg(0), env);
            const double x = eval_expr(e.arg(1), env);
            if (b == 0.0 && x < 0.0) throw DomainError("division by zero");
            if (b < 0.0 && x != std::trunc(x))
                throw DomainError("negative base with non-integer exponent");
            return checked(std::pow(b, x), "power");
        }
        case Kind::Exp: return checked(std::exp(eval_expr(e.arg(0), env)), "exp");
        case Kind::Ln: {
            const double a = eval_expr(e.arg(0), env);
            if (!(a > 0.0)) throw DomainError("ln of non-positive value");
            return std::log(a);
        }
        case Kind::Sin: return std::sin(eval_expr(e.arg(0), env));
        case Kind::Cos: return std::cos(eval_expr(e.arg(0), env));
        case Kind::Max: return std::fmax(eval_expr(e.arg(0), env), eval_expr(e.arg(1), env));
    }
    throw DomainError("unknown node kind");
}

}  // namespace fracbs::expr
