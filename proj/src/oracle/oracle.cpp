#include "fracbs/oracle.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <fmt/format.h>

#include "fracbs/error.hpp"
#include "fracbs/kernels.hpp"
#include "fracbs/program.hpp"
#include "fracbs/specfun.hpp"

namespace fracbs::oracle {

using expr::Var;

std::vector<double> l1_weights(double alpha, std::size_t M) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ValidationError(fmt::format("L1 weights need 0 < alpha <= 1, got {}", alpha));
    }
    if (M < 1) throw ValidationError("L1 weights need M >= 1");
    std::vector<double> b(M);
    const double e = 1.0 - alpha;
    b[0] = 1.0;
    for (std::size_t j = 1; j < M; ++j) {
        const double jd = static_cast<double>(j);
        b[j] = alpha == 1.0 ? 0.0 : std::pow(jd + 1.0, e) - std::pow(jd, e);
    }
    return b;
}

Boundary series_boundary(const solver::SeriesSolution& s) {
    if (s.space_mode() != solver::SpaceMode::Log) {
        throw ValidationError("oracle boundary needs a log-mode series");
    }
    return [&s](std::span<const double> u, std::span<const double> v, double t, std::span<double> out) {
        s.evaluate(u, v, t, out);
    };
}

Boundary pointwise_boundary(std::function<double(double, double, double)> f) {
    return [f = std::move(f)](std::span<const double> u, std::span<const double> v, double t,
                              std::span<double> out) {
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(u[k], v[k], t);
    };
}

namespace {

struct Edges {
    std::vector<std::size_t> index;
    std::vector<double> u, v;
};

Edges boundary_nodes(const OracleGrid& g) {
    Edges e;
    const std::size_t R = g.rows(), C = g.cols();
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            if (i == 0 || j == 0 || i + 1 == R || j + 1 == C) {
                e.index.push_back(i * C + j);
                e.u.push_back(g.u(i));
                e.v.push_back(g.v(j));
            }
        }
    }
    return e;
}

// out(i,j) = stencil applied at every interior node of a full-grid level.
void apply_stencil(const kernels::Stencil9& s, const double* level, double* out, std::size_t R, std::size_t C) {
    const auto& k = kernels::active();
    for (std::size_t i = 1; i + 1 < R; ++i) {
        k.stencil9(s, level + (i + 1) * C + 1, level + i * C + 1, level + (i - 1) * C + 1, out + i * C + 1, C - 2);
    }
}

}  // namespace

OracleGrid solve_fd(const solver::ModelParams& p, const expr::Expr& ic, const GridSpec& spec,
                    const Boundary& boundary) {
    p.validate();
    if (spec.nu < 3 || spec.nv < 3) throw ValidationError("oracle grid needs nu, nv >= 3");
    if (spec.steps < 1) throw ValidationError("oracle grid needs at least one time step");
    if (!(spec.t_final > 0.0)) throw ValidationError("oracle t_final must be > 0");
    if (!(spec.u1 > spec.u0 && spec.v1 > spec.v0)) throw ValidationError("oracle rectangle is empty");
    if (ic.contains_max()) throw ValidationError("oracle initial condition must be max-free");
    const unsigned uv = (1u << static_cast<unsigned>(Var::u)) | (1u << static_cast<unsigned>(Var::v));
    if ((ic.var_mask() & ~uv) != 0) throw ValidationError("oracle initial condition may use only u and v");

    OracleGrid g;
    g.u0 = spec.u0;
    g.u1 = spec.u1;
    g.v0 = spec.v0;
    g.v1 = spec.v1;
    g.nu = spec.nu;
    g.nv = spec.nv;
    g.M = spec.steps;
    g.dt = spec.t_final / static_cast<double>(spec.steps);
    g.hu = (spec.u1 - spec.u0) / static_cast<double>(spec.nu + 1);
    g.hv = (spec.v1 - spec.v0) / static_cast<double>(spec.nv + 1);

    const std::size_t R = g.rows(), C = g.cols(), size = R * C;
    g.field.assign((g.M + 1) * size, 0.0);

    // Initial level from ic on every node.
    {
        std::vector<double> us(size), vs(size);
        for (std::size_t i = 0; i < R; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                us[i * C + j] = g.u(i);
                vs[i * C + j] = g.v(j);
            }
        }
        expr::Columns cols;
        cols[static_cast<std::size_t>(Var::u)] = us;
        cols[static_cast<std::size_t>(Var::v)] = vs;
        expr::Program(ic).evaluate(cols, std::span(g.field.data(), size));
    }

    const double c1 = 0.5 * p.sigma1 * p.sigma1 / (g.hu * g.hu);
    const double c2 = 0.5 * p.sigma2 * p.sigma2 / (g.hv * g.hv);
    const double cx = p.rho * p.sigma1 * p.sigma2 / (4.0 * g.hu * g.hv);
    const double a0 = 1.0 / (specfun::gamma(2.0 - p.alpha) * std::pow(g.dt, p.alpha));
    if (spec.cross_guard && !spec.fully_implicit && 4.0 * std::abs(cx) > a0) {
        throw NumericalError(fmt::format(
            "explicit cross term 4|rho s1 s2|/(4 hu hv) = {:.4g} exceeds the L1 diagonal {:.4g}; refine dt or "
            "use the fully implicit variant",
            4.0 * std::abs(cx), a0));
    }

    // L_h = impl + expl; the matrix is a0·I + impl on interior nodes.
    kernels::Stencil9 impl{-2.0 * c1 - 2.0 * c2 - p.r, c2, c2, c1, c1, spec.fully_implicit ? cx : 0.0};
    kernels::Stencil9 expl{0.0, 0.0, 0.0, 0.0, 0.0, spec.fully_implicit ? 0.0 : cx};
    kernels::Stencil9 system = impl;
    system.center += a0;

    const std::size_t nu = g.nu, nv = g.nv, n = nu * nv;
    auto unknown = [nv](std::size_t i, std::size_t j) { return static_cast<int>((i - 1) * nv + (j - 1)); };
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * 9);
    for (std::size_t i = 1; i <= nu; ++i) {
        for (std::size_t j = 1; j <= nv; ++j) {
            const int row = unknown(i, j);
            auto put = [&](std::size_t ii, std::size_t jj, double w) {
                if (w != 0.0 && ii >= 1 && ii <= nu && jj >= 1 && jj <= nv) trip.emplace_back(row, unknown(ii, jj), w);
            };
            put(i, j, system.center);
            put(i, j - 1, system.west);
            put(i, j + 1, system.east);
            put(i - 1, j, system.south);
            put(i + 1, j, system.north);
            put(i + 1, j + 1, system.cross);
            put(i + 1, j - 1, -system.cross);
            put(i - 1, j + 1, -system.cross);
            put(i - 1, j - 1, system.cross);
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<int>(n), static_cast<int>(n));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericalError("oracle system matrix is singular");

    const std::vector<double> b = l1_weights(p.alpha, g.M);
    const Edges edges = boundary_nodes(g);
    std::vector<double> edge_values(edges.index.size());

    // diffs[k-1] = c^k - c^{k-1}, full grid.
    std::vector<double> diffs(g.M * size, 0.0);
    std::vector<double> rhs(size), work(size), check(size);
    Eigen::VectorXd rb(static_cast<Eigen::Index>(n)), x(static_cast<Eigen::Index>(n));

    for (std::size_t m = 1; m <= g.M; ++m) {
        const double* prev = g.field.data() + (m - 1) * size;
        double* cur = g.field.data() + m * size;

        // rhs = a0·c^{m-1} - a0·Σ_{j≥1} b_j d^{m-j} - expl·c^{m-1}
        std::fill(rhs.begin(), rhs.end(), 0.0);
        for (std::size_t j = 1; j < m; ++j) {
            if (b[j] != 0.0) kernels::active().axpy(-a0 * b[j], diffs.data() + (m - j - 1) * size, rhs.data(), size);
        }
        kernels::active().axpy(a0, prev, rhs.data(), size);
        if (expl.cross != 0.0) {
            std::fill(work.begin(), work.end(), 0.0);
            apply_stencil(expl, prev, work.data(), R, C);
            kernels::active().axpy(-1.0, work.data(), rhs.data(), size);
        }

        // Boundary values at t_m, then move their coupling to the right side.
        std::fill(cur, cur + size, 0.0);
        boundary(edges.u, edges.v, g.t(m), edge_values);
        for (std::size_t k = 0; k < edges.index.size(); ++k) cur[edges.index[k]] = edge_values[k];
        std::fill(work.begin(), work.end(), 0.0);
        apply_stencil(impl, cur, work.data(), R, C);
        for (std::size_t i = 1; i <= nu; ++i) {
            for (std::size_t j = 1; j <= nv; ++j) rb[unknown(i, j)] = rhs[i * C + j] - work[i * C + j];
        }

        x = lu.solve(rb);
        if (lu.info() != Eigen::Success) throw NumericalError(fmt::format("linear solve failed at step {}", m));
        for (std::size_t i = 1; i <= nu; ++i) {
            for (std::size_t j = 1; j <= nv; ++j) cur[i * C + j] = x[unknown(i, j)];
        }

        // Residual of (a0 I + impl) c^m = rhs on the interior, with boundary in place.
        std::fill(check.begin(), check.end(), 0.0);
        apply_stencil(system, cur, check.data(), R, C);
        double res = 0.0, scale = 1.0;
        for (std::size_t i = 1; i <= nu; ++i) {
            for (std::size_t j = 1; j <= nv; ++j) {
                res = std::max(res, std::abs(check[i * C + j] - rhs[i * C + j]));
                scale = std::max(scale, std::abs(rhs[i * C + j]));
            }
        }
        const double rel = res / scale;
        g.max_residual = std::max(g.max_residual, rel);
        if (rel > 1e-10) {
            throw NumericalError(fmt::format("linear solve residual {:.3g} above 1e-10 at step {}", rel, m));
        }
        if (!kernels::all_finite(std::span<const double>(cur, size))) {
            throw NumericalError(fmt::format("oracle field is not finite at step {}", m));
        }

        double* d = diffs.data() + (m - 1) * size;
        kernels::active().sub(cur, prev, d, size);
    }
    return g;
}

}  // namespace fracbs::oracle
