#include "fracbs/program.hpp"

#include <cmath>
#include <string>

#include "fracbs/error.hpp"
#include "fracbs/kernels.hpp"

namespace fracbs::expr {

namespace {

constexpr std::size_t kBlock = 256;

class Compiler {
public:
    std::vector<Program::Instr> code;
    std::size_t high_water = 0;
    std::uint8_t inputs = 0;

    std::uint16_t compile(const Expr& e) {
        using Op = Program::Op;
        switch (e.kind()) {
            case Kind::Constant: {
                auto r = alloc();
                emit(Op::Const, r, 0, 0, e.value());
                return r;
            }
            case Kind::Variable: {
                auto r = alloc();
                inputs |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(e.var()));
                emit(Op::Load, r, 0, 0, static_cast<double>(e.var()));
                return r;
            }
            case Kind::Add: return compile_sum(e);
            case Kind::Mul: return compile_product(e);
            case Kind::Pow: {
                const Expr& x = e.arg(1);
                if (x.is_constant(2.0)) {
                    auto r = compile(e.arg(0));
                    emit(Op::Square, r, r, r, 0.0);
                    return r;
                }
                if (x.is_constant(-1.0)) {
                    auto one = alloc();
                    emit(Op::Const, one, 0, 0, 1.0);
                    auto r = compile(e.arg(0));
                    emit(Op::Div, one, one, r, 0.0);
                    release(r);
                    return one;
                }
                auto b = compile(e.arg(0));
                auto p = compile(x);
                emit(Op::Pow, b, b, p, 0.0);
                release(p);
                return b;
            }
            case Kind::Max: {
                auto a = compile(e.arg(0));
                auto b = compile(e.arg(1));
                emit(Op::Max, a, a, b, 0.0);
                release(b);
                return a;
            }
            case Kind::Exp: return unary(Op::Exp, e);
            case Kind::Ln: return unary(Op::Ln, e);
            case Kind::Sin: return unary(Op::Sin, e);
            case Kind::Cos: return unary(Op::Cos, e);
        }
        throw ValidationError("cannot compile expression node");
    }

private:
    std::vector<std::uint16_t> free_;
    std::size_t next_ = 0;

    std::uint16_t alloc() {
        if (!free_.empty()) {
            auto r = free_.back();
            free_.pop_back();
            return r;
        }
        if (next_ >= 0xffff) throw NumericalError("expression needs too many registers");
        high_water = std::max(high_water, next_ + 1);
        return static_cast<std::uint16_t>(next_++);
    }
    void release(std::uint16_t r) { free_.push_back(r); }

    void emit(Program::Op op, std::uint16_t dst, std::uint16_t a, std::uint16_t b, double c) {
        code.push_back({op, dst, a, b, c});
    }

    std::uint16_t unary(Program::Op op, const Expr& e) {
        auto r = compile(e.arg(0));
        emit(op, r, r, 0, 0.0);
        return r;
    }

    static bool negated_term(const Expr& t) {
        return t.kind() == Kind::Mul && t.arg(0).is_constant(-1.0) && t.args().size() >= 2;
    }

    static Expr without_sign(const Expr& t) {
        std::vector<Expr> f(t.args().begin() + 1, t.args().end());
        return Expr::mul(std::move(f));
    }

    std::uint16_t compile_sum(const Expr& e) {
        using Op = Program::Op;
        double constant = 0.0;
        bool have = false;
        std::uint16_t acc = 0;
        for (const Expr& t : e.args()) {
            if (t.is_constant()) {
                constant += t.value();
                continue;
            }
            if (!have) {
                acc = compile(t);
                have = true;
                continue;
            }
            const bool neg = negated_term(t);
            auto r = compile(neg ? without_sign(t) : t);
            emit(neg ? Op::Sub : Op::Add, acc, acc, r, 0.0);
            release(r);
        }
        if (!have) {
            acc = alloc();
            emit(Op::Const, acc, 0, 0, constant);
        } else if (constant != 0.0) {
            emit(Op::Shift, acc, acc, 0, constant);
        }
        return acc;
    }

    std::uint16_t compile_product(const Expr& e) {
        using Op = Program::Op;
        double coeff = 1.0;
        bool have = false;
        std::uint16_t acc = 0;
        std::vector<const Expr*> divisors;
        for (const Expr& f : e.args()) {
            if (f.is_constant()) {
                coeff *= f.value();
            } else if (f.kind() == Kind::Pow && f.arg(1).is_constant(-1.0)) {
                divisors.push_back(&f.arg(0));
            } else if (!have) {
                acc = compile(f);
                have = true;
            } else {
                auto r = compile(f);
                emit(Op::Mul, acc, acc, r, 0.0);
                release(r);
            }
        }
        if (!have) {
            acc = alloc();
            emit(Op::Const, acc, 0, 0, coeff);
            coeff = 1.0;
        }
        for (const Expr* d : divisors) {
            auto r = compile(*d);
            emit(Op::Div, acc, acc, r, 0.0);
            release(r);
        }
        if (coeff != 1.0) emit(Op::Scale, acc, acc, 0, coeff);
        return acc;
    }
};

[[noreturn]] void domain_failure(const char* what, std::size_t point) {
    throw DomainError(std::string(what) + " at point " + std::to_string(point));
}

}  // namespace

Program::Program(const Expr& e) {
    Compiler c;
    auto r = c.compile(e);
    // The result must end up in register 0.
    if (r != 0) c.code.push_back({Op::Scale, 0, r, 0, 1.0});
    code_ = std::move(c.code);
    registers_ = std::max<std::size_t>(c.high_water, 1);
    inputs_ = c.inputs;
}

void Program::evaluate(const Columns& inputs, std::span<double> out) const {
    const std::size_t n = out.size();
    for (std::size_t v = 0; v < kVarCount; ++v) {
        if (((inputs_ >> v) & 1u) && inputs[v].size() < n) {
            throw DomainError("unbound variable '" + std::string(var_name(static_cast<Var>(v))) + "'");
        }
    }

    const kernels::Table& k = kernels::active();
    std::vector<double> regs(registers_ * kBlock);
    auto reg = [&](std::uint16_t i) { return regs.data() + static_cast<std::size_t>(i) * kBlock; };

    for (std::size_t start = 0; start < n; start += kBlock) {
        const std::size_t len = std::min(kBlock, n - start);
        for (const Instr& in : code_) {
            double* d = reg(in.dst);
            const double* a = reg(in.a);
            const double* b = reg(in.b);
            switch (in.op) {
                case Op::Const:
                    std::fill(d, d + len, in.c);
                    break;
                case Op::Load: {
                    const auto& col = inputs[static_cast<std::size_t>(in.c)];
                    std::copy(col.begin() + static_cast<std::ptrdiff_t>(start),
                              col.begin() + static_cast<std::ptrdiff_t>(start + len), d);
                    break;
                }
                case Op::Add: k.add(a, b, d, len); break;
                case Op::Sub: k.sub(a, b, d, len); break;
                case Op::Mul: k.mul(a, b, d, len); break;
                case Op::Square: k.mul(a, a, d, len); break;
                case Op::Div:
                    for (std::size_t i = 0; i < len; ++i) {
                        if (b[i] == 0.0) domain_failure("division by zero", start + i);
                    }
                    k.div(a, b, d, len);
                    break;
                case Op::Scale: k.scale(in.c, a, d, len); break;
                case Op::Shift: k.shift(in.c, a, d, len); break;
                case Op::Max: k.max(a, b, d, len); break;
                case Op::Pow:
                    for (std::size_t i = 0; i < len; ++i) {
                        if (a[i] == 0.0 && b[i] < 0.0) domain_failure("division by zero", start + i);
                        if (a[i] < 0.0 && b[i] != std::trunc(b[i]))
                            domain_failure("negative base with non-integer exponent", start + i);
                        d[i] = std::pow(a[i], b[i]);
                    }
                    break;
                case Op::Exp:
                    for (std::size_t i = 0; i < len; ++i) d[i] = std::exp(a[i]);
                    break;
                case Op::Ln:
                    for (std::size_t i = 0; i < len; ++i) {
                        if (!(a[i] > 0.0)) domain_failure("ln of non-positive value", start + i);
                        d[i] = std::log(a[i]);
                    }
                    break;
                case Op::Sin:
                    for (std::size_t i = 0; i < len; ++i) d[i] = std::sin(a[i]);
                    break;
                case Op::Cos:
                    for (std::size_t i = 0; i < len; ++i) d[i] = std::cos(a[i]);
                    break;
            }
            if (!k.all_finite(d, len)) {
                for (std::size_t i = 0; i < len; ++i) {
                    if (!std::isfinite(d[i])) domain_failure("non-finite intermediate", start + i);
                }
            }
        }
        std::copy(reg(0), reg(0) + len, out.begin() + static_cast<std::ptrdiff_t>(start));
    }
}

}  // namespace fracbs::expr
