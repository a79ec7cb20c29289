#pragma once

// Batched evaluation of an Expr over many points. The tree is lowered once to
// a register program; each instruction then runs over a block of points
// through the dispatched kernels.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fracbs/expr.hpp"

namespace fracbs::expr {

/// Input columns, one per variable. Columns of variables the program does
/// not read may be empty.
using Columns = std::array<std::span<const double>, kVarCount>;

class Program {
public:
    explicit Program(const Expr& e);

    /// out[k] = eval_expr(e, point k). Same domain errors as eval_expr,
    /// reported with the index of the first offending point.
    void evaluate(const Columns& inputs, std::span<double> out) const;

    std::size_t instruction_count() const noexcept { return code_.size(); }
    std::size_t register_count() const noexcept { return registers_; }

    enum class Op : std::uint8_t {
        Const, Load, Add, Sub, Mul, Div, Scale, Shift, Square, Pow, Exp, Ln, Sin, Cos, Max
    };
    struct Instr {
        Op op;
        std::uint16_t dst;
        std::uint16_t a;
        std::uint16_t b;
        double c;
    };

private:
    std::vector<Instr> code_;
    std::size_t registers_ = 0;
    std::uint8_t inputs_ = 0;
};

}  // namespace fracbs::expr
