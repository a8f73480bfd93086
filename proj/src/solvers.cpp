#include "chemflux/solvers.hpp"

#include <cmath>
#include <string>

namespace chemflux {

namespace {

double vec_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void apply_neumann_helmholtz(const GridSpec& g, double alpha, const std::vector<double>& x,
                             std::vector<double>& out) {
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    const double ax = alpha / (g.spacing[0] * g.spacing[0]);
    const double ay = alpha / (g.spacing[1] * g.spacing[1]);
    const double az = g.dim == 3 ? alpha / (g.spacing[2] * g.spacing[2]) : 0.0;
    std::size_t idx = 0;
    const std::size_t sx = static_cast<std::size_t>(ny) * nz, sy = nz;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k, ++idx) {
                const double xc = x[idx];
                double lap = 0.0;
                if (i + 1 < nx) lap += ax * (x[idx + sx] - xc);
                if (i > 0) lap -= ax * (xc - x[idx - sx]);
                if (j + 1 < ny) lap += ay * (x[idx + sy] - xc);
                if (j > 0) lap -= ay * (xc - x[idx - sy]);
                if (g.dim == 3) {
                    if (k + 1 < nz) lap += az * (x[idx + 1] - xc);
                    if (k > 0) lap -= az * (xc - x[idx - 1]);
                }
                out[idx] = xc - lap;
            }
}

// A = −Δ_N (positive semi-definite; null space = constants)
void apply_neg_neumann_laplacian(const GridSpec& g, const std::vector<double>& x,
                                 std::vector<double>& out) {
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    const double ax = 1.0 / (g.spacing[0] * g.spacing[0]);
    const double ay = 1.0 / (g.spacing[1] * g.spacing[1]);
    const double az = g.dim == 3 ? 1.0 / (g.spacing[2] * g.spacing[2]) : 0.0;
    std::size_t idx = 0;
    const std::size_t sx = static_cast<std::size_t>(ny) * nz, sy = nz;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k, ++idx) {
                const double xc = x[idx];
                double lap = 0.0;
                if (i + 1 < nx) lap += ax * (x[idx + sx] - xc);
                if (i > 0) lap -= ax * (xc - x[idx - sx]);
                if (j + 1 < ny) lap += ay * (x[idx + sy] - xc);
                if (j > 0) lap -= ay * (xc - x[idx - sy]);
                if (g.dim == 3) {
                    if (k + 1 < nz) lap += az * (x[idx + 1] - xc);
                    if (k > 0) lap -= az * (xc - x[idx - 1]);
                }
                out[idx] = -lap;
            }
}

// (I − αΔ_D) on a staggered velocity component: fixed zeros on the faces at
// the ends of its own axis, reflection ghost (−value) across tangential walls.
void apply_dirichlet_helmholtz(const GridSpec& g, int axis, double alpha,
                               const std::vector<double>& x, std::vector<double>& out) {
    const int n0 = g.cells[0] + (axis == 0 ? 1 : 0);
    const int n1 = g.cells[1] + (axis == 1 ? 1 : 0);
    const int n2 = (g.dim == 3 ? g.cells[2] : 1) + (axis == 2 ? 1 : 0);
    const double a0 = alpha / (g.spacing[0] * g.spacing[0]);
    const double a1 = alpha / (g.spacing[1] * g.spacing[1]);
    const double a2 = g.dim == 3 ? alpha / (g.spacing[2] * g.spacing[2]) : 0.0;
    const std::size_t s0 = static_cast<std::size_t>(n1) * n2, s1 = n2;
    std::size_t idx = 0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k, ++idx) {
                const bool own_bnd = (axis == 0 && (i == 0 || i == n0 - 1)) ||
                                     (axis == 1 && (j == 0 || j == n1 - 1)) ||
                                     (axis == 2 && (k == 0 || k == n2 - 1));
                if (own_bnd) {
                    out[idx] = x[idx]; // pinned row; stays 0 for zero rhs/guess
                    continue;
                }
                const double xc = x[idx];
                double lap = 0.0;
                // along each direction: own axis sees node values (incl. the
                // pinned boundary faces); tangential walls reflect.
                {
                    const double xm = (i > 0) ? x[idx - s0] : (axis == 0 ? 0.0 : -xc);
                    const double xp = (i + 1 < n0) ? x[idx + s0] : (axis == 0 ? 0.0 : -xc);
                    lap += a0 * (xp - 2.0 * xc + xm);
                }
                {
                    const double xm = (j > 0) ? x[idx - s1] : (axis == 1 ? 0.0 : -xc);
                    const double xp = (j + 1 < n1) ? x[idx + s1] : (axis == 1 ? 0.0 : -xc);
                    lap += a1 * (xp - 2.0 * xc + xm);
                }
                if (g.dim == 3) {
                    const double xm = (k > 0) ? x[idx - 1] : (axis == 2 ? 0.0 : -xc);
                    const double xp = (k + 1 < n2) ? x[idx + 1] : (axis == 2 ? 0.0 : -xc);
                    lap += a2 * (xp - 2.0 * xc + xm);
                }
                out[idx] = xc - lap;
            }
}

void zero_own_boundary(const GridSpec& g, int axis, std::vector<double>& x) {
    const int n0 = g.cells[0] + (axis == 0 ? 1 : 0);
    const int n1 = g.cells[1] + (axis == 1 ? 1 : 0);
    const int n2 = (g.dim == 3 ? g.cells[2] : 1) + (axis == 2 ? 1 : 0);
    std::size_t idx = 0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k, ++idx) {
                const bool own_bnd = (axis == 0 && (i == 0 || i == n0 - 1)) ||
                                     (axis == 1 && (j == 0 || j == n1 - 1)) ||
                                     (axis == 2 && (k == 0 || k == n2 - 1));
                if (own_bnd) x[idx] = 0.0;
            }
}

SolveReport run_cg(const LinearOperatorSpec& op, const std::vector<double>& b,
                   std::vector<double>& x, double tol, int maxiter, bool trace) {
    const std::size_t n = b.size();
    SolveReport rep;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        rep.converged = true;
        return rep;
    }
    std::vector<double> r(n), p(n), Ap(n);
    apply_operator(op, x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    p = r;
    double rs = dot(r, r);
    if (trace) rep.residual_history.push_back(std::sqrt(rs));
    for (int it = 0; it < maxiter; ++it) {
        if (std::sqrt(rs) <= tol * bnorm) {
            rep.converged = true;
            rep.iterations = it;
            rep.final_residual = std::sqrt(rs) / bnorm;
            return rep;
        }
        apply_operator(op, p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) break; // lost positive-definiteness (rounding); report as-is
        const double alpha = rs / pAp;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        const double rs_new = dot(r, r);
        if (trace) rep.residual_history.push_back(std::sqrt(rs_new));
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rep.iterations = it + 1;
    }
    rep.converged = std::sqrt(rs) <= tol * bnorm;
    rep.final_residual = std::sqrt(rs) / bnorm;
    return rep;
}

} // namespace

void apply_operator(const LinearOperatorSpec& op, const std::vector<double>& x,
                    std::vector<double>& out) {
    out.resize(x.size());
    switch (op.kind) {
        case OperatorKind::NeumannHelmholtz:
            apply_neumann_helmholtz(op.grid, op.alpha, x, out);
            break;
        case OperatorKind::NeumannPoisson:
            apply_neg_neumann_laplacian(op.grid, x, out);
            break;
        case OperatorKind::DirichletHelmholtz:
            apply_dirichlet_helmholtz(op.grid, op.axis, op.alpha, x, out);
            break;
    }
}

SolveReport cg_solve(const LinearOperatorSpec& op, const std::vector<double>& rhs,
                     std::vector<double>& x, double tol, int maxiter, bool trace) {
    if (op.alpha < 0.0) throw std::invalid_argument("cg_solve: alpha must be >= 0");
    x.resize(rhs.size());

    if (op.kind == OperatorKind::NeumannHelmholtz) {
        // Solve the zero-mean deviation: (I − αΔ) keeps constants fixed, so
        // x = mean(rhs) + y with A y = rhs − mean(rhs). Keeps the mean of the
        // solution pinned to mean(rhs) (mass conservation headroom).
        const double mbar = vec_mean(rhs);
        std::vector<double> b(rhs.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = rhs[i] - mbar;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= mbar;
        SolveReport rep = run_cg(op, b, x, tol, maxiter, trace);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += mbar;
        const double drift = mbar - vec_mean(x);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += drift;
        return rep;
    }

    if (op.kind == OperatorKind::NeumannPoisson) {
        // Compatibility gauge: subtract the rhs mean, solve (−Δ)x = −rhs',
        // return mean-zero x.
        const double mbar = vec_mean(rhs);
        std::vector<double> b(rhs.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = -(rhs[i] - mbar);
        const double xbar = vec_mean(x);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= xbar;
        SolveReport rep = run_cg(op, b, x, tol, maxiter, trace);
        const double snap = vec_mean(x);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= snap;
        return rep;
    }

    // DirichletHelmholtz: pinned boundary faces must be zero in both the
    // system rhs and the iterates.
    std::vector<double> b = rhs;
    zero_own_boundary(op.grid, op.axis, b);
    zero_own_boundary(op.grid, op.axis, x);
    return run_cg(op, b, x, tol, maxiter, trace);
}

} // namespace chemflux
