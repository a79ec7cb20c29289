#pragma once

// Finite-difference reference solver for the log-space equation
//   ∂^α c/∂t^α = -[(σ₁²/2)c_uu + (σ₂²/2)c_vv + ρσ₁σ₂c_uv - r c]
// with the Caputo derivative discretized by the L1 scheme and Dirichlet data
// on the rectangle's edges.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fracbs/expr.hpp"
#include "fracbs/solver.hpp"

namespace fracbs::oracle {

/// b_j = (j+1)^{1-α} - j^{1-α}, j = 0 … M-1.
std::vector<double> l1_weights(double alpha, std::size_t M);

struct GridSpec {
    double u0 = -1.0, u1 = 1.0;
    double v0 = -1.0, v1 = 1.0;
    /// Interior node counts; spacing is (u1-u0)/(nu+1).
    std::size_t nu = 31, nv = 31;
    /// Time steps to t_final.
    std::size_t steps = 200;
    double t_final = 1.0;
    /// Cross term implicit too, instead of lagged one step.
    bool fully_implicit = false;
    /// Reject explicit cross terms larger than the L1 diagonal.
    bool cross_guard = false;
};

/// Fills out[k] with the Dirichlet value at (u[k], v[k], t).
using Boundary = std::function<void(std::span<const double> u, std::span<const double> v, double t,
                                    std::span<double> out)>;

/// Boundary data from a series solution in log coordinates.
Boundary series_boundary(const solver::SeriesSolution& s);
/// Boundary data from a pointwise function.
Boundary pointwise_boundary(std::function<double(double u, double v, double t)> f);

class OracleGrid {
public:
    double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;
    std::size_t nu = 0, nv = 0, M = 0;
    double dt = 0.0;
    double hu = 0.0, hv = 0.0;
    /// Largest relative linear-solve residual seen over all steps.
    double max_residual = 0.0;

    /// Nodes per side including the boundary.
    std::size_t rows() const noexcept { return nu + 2; }
    std::size_t cols() const noexcept { return nv + 2; }
    double u(std::size_t i) const noexcept { return u0 + static_cast<double>(i) * hu; }
    double v(std::size_t j) const noexcept { return v0 + static_cast<double>(j) * hv; }
    double t(std::size_t m) const noexcept { return static_cast<double>(m) * dt; }

    /// c[m][i][j] with i ∈ [0, nu+1], j ∈ [0, nv+1]; boundary included.
    double at(std::size_t m, std::size_t i, std::size_t j) const noexcept {
        return field[(m * rows() + i) * cols() + j];
    }
    std::span<const double> level(std::size_t m) const noexcept {
        return {field.data() + m * rows() * cols(), rows() * cols()};
    }

    std::vector<double> field;
};

/// Steps the equation from ic at t = 0 to spec.t_final. ic must depend on u
/// and v only. Throws NumericalError on a failed or inaccurate linear solve or
/// a non-finite field.
OracleGrid solve_fd(const solver::ModelParams& p, const expr::Expr& ic, const GridSpec& spec,
                    const Boundary& boundary);

}  // namespace fracbs::oracle
