/// @file test_solvers.cpp
/// @brief Matrix-free CG against discrete eigen-mode oracles, mean
/// preservation, the M-matrix sign property and the CG energy descent.

#include "chemflux/calculus.hpp"
#include "chemflux/solvers.hpp"

#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace chemflux;
using testing::approx;
using testing::qoi;
using testing::record;

namespace {

const double kPi = std::acos(-1.0);

double mu_h(int m) {
    const double h = 1.0 / m;
    return 2.0 / (h * h) * (1.0 - std::cos(kPi * h));
}

std::vector<double> cos_mode(const GridSpec& g) {
    std::vector<double> v(g.cell_count());
    std::size_t idx = 0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 0; k < g.nz(); ++k, ++idx) v[idx] = std::cos(kPi * g.center(0, i));
    return v;
}

void test_identity() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {16, 16});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> rhs(g.cell_count());
    for (double& x : rhs) x = dist(rng);
    LinearOperatorSpec op{OperatorKind::NeumannHelmholtz, g, 0.0, -1};
    std::vector<double> x(rhs.size(), 0.0);
    SolveReport rep = cg_solve(op, rhs, x, 1e-12, 100);
    double gap = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) gap = std::max(gap, std::abs(x[i] - rhs[i]));
    record("alpha=0 helmholtz returns rhs", rep.converged && gap <= 1e-13, qoi(gap, 1e-13));
    record("alpha=0 helmholtz converges in <= 2 iterations", rep.iterations <= 2);
}

void test_helmholtz_eigenmode() {
    const int m = 64;
    GridSpec g = make_grid(2, {1.0, 1.0}, {m, m});
    const double alpha = 0.037;
    std::vector<double> mode = cos_mode(g);
    std::vector<double> rhs(mode.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 1.0 + mode[i];
    LinearOperatorSpec op{OperatorKind::NeumannHelmholtz, g, alpha, -1};
    std::vector<double> x(rhs.size(), 0.0);
    SolveReport rep = cg_solve(op, rhs, x, 1e-13, 10000);
    const double factor = 1.0 / (1.0 + alpha * mu_h(m));
    double gap = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        gap = std::max(gap, std::abs(x[i] - (1.0 + factor * mode[i])));
    record("neumann helmholtz eigen-mode oracle", rep.converged && gap <= 1e-11,
           qoi(gap, 1e-11));
}

void test_poisson() {
    const int m = 64;
    GridSpec g = make_grid(2, {1.0, 1.0}, {m, m});
    LinearOperatorSpec op{OperatorKind::NeumannPoisson, g, 0.0, -1};

    std::vector<double> rhs(g.cell_count(), 0.0);
    std::vector<double> x(rhs.size(), 0.0);
    SolveReport rep0 = cg_solve(op, rhs, x, 1e-12, 10000);
    double m0 = 0.0;
    for (double v : x) m0 = std::max(m0, std::abs(v));
    record("poisson with zero rhs gives zero", rep0.converged && m0 == 0.0);

    std::vector<double> mode = cos_mode(g);
    x.assign(mode.size(), 0.0);
    SolveReport rep = cg_solve(op, mode, x, 1e-13, 20000);
    const double factor = -1.0 / mu_h(m);
    double gap = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        gap = std::max(gap, std::abs(x[i] - factor * mode[i]));
        mean += x[i];
    }
    mean /= static_cast<double>(x.size());
    record("poisson eigen-mode oracle -cos/mu_h", rep.converged && gap <= 1e-12,
           qoi(gap, 1e-12));
    record("poisson solution mean zero", std::abs(mean) <= 1e-14, qoi(std::abs(mean), 1e-14));

    std::vector<double> constant(g.cell_count(), 4.2);
    x.assign(constant.size(), 0.0);
    SolveReport repc = cg_solve(op, constant, x, 1e-12, 10000);
    double mc = 0.0;
    for (double v : x) mc = std::max(mc, std::abs(v));
    record("poisson compatibility: constant rhs -> zero", repc.converged && mc <= 1e-14);
}

void test_mean_preservation() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {32, 32});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    LinearOperatorSpec op{OperatorKind::NeumannHelmholtz, g, 0.08, -1};
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> rhs(g.cell_count());
        double mean_rhs = 0.0;
        for (double& x : rhs) {
            x = dist(rng);
            mean_rhs += x;
        }
        mean_rhs /= static_cast<double>(rhs.size());
        std::vector<double> x = rhs;
        SolveReport rep = cg_solve(op, rhs, x, 1e-12, 10000);
        double mean_x = 0.0;
        for (double v : x) mean_x += v;
        mean_x /= static_cast<double>(x.size());
        worst = std::max(worst, std::abs(mean_x - mean_rhs));
        ok = ok && rep.converged;
    }
    record("helmholtz solves preserve the rhs mean", ok && worst <= 1e-15, qoi(worst, 1e-15));
}

void test_m_matrix_sign() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {32, 32});
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double alpha = 0.001 + 0.2 * dist(rng);
        LinearOperatorSpec op{OperatorKind::NeumannHelmholtz, g, alpha, -1};
        std::vector<double> rhs(g.cell_count());
        for (double& x : rhs) x = std::max(0.0, dist(rng) - 0.3); // plenty of exact zeros
        std::vector<double> x = rhs;
        SolveReport rep = cg_solve(op, rhs, x, 1e-14, 40000);
        double mn = 0.0;
        for (double v : x) mn = std::min(mn, v);
        worst = std::min(worst, mn);
        ok = ok && rep.converged;
    }
    record("M-matrix: nonnegative rhs gives solution >= -1e-14", ok && worst >= -1e-14,
           qoi(worst, -1e-14));
}

void test_energy_descent() {
    // CG minimizes the quadratic energy monotonically; track it via the
    // residual history surrogate f(x_k) recomputed from traced iterates is
    // unavailable, so assert the A-norm descent through the energy functional
    // computed by re-running with a shrinking iteration budget.
    GridSpec g = make_grid(2, {1.0, 1.0}, {16, 16});
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        const double alpha = 0.02 + 0.1 * dist(rng) * dist(rng);
        LinearOperatorSpec op{OperatorKind::NeumannHelmholtz, g, alpha, -1};
        std::vector<double> rhs(g.cell_count());
        for (double& x : rhs) x = dist(rng);
        auto energy = [&](const std::vector<double>& x) {
            std::vector<double> Ax;
            apply_operator(op, x, Ax);
            double e = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) e += 0.5 * x[i] * Ax[i] - rhs[i] * x[i];
            return e;
        };
        double prev = energy(std::vector<double>(rhs.size(), 0.0));
        for (int it = 1; it <= 12; ++it) {
            std::vector<double> x(rhs.size(), 0.0);
            cg_solve(op, rhs, x, 0.0, it); // run exactly `it` iterations
            const double e = energy(x);
            ok = ok && e <= prev + 1e-13 * std::abs(prev);
            prev = e;
        }
    }
    record("CG energy descends monotonically (A-norm of error)", ok);
}

void test_dirichlet_helmholtz() {
    const int m = 32;
    GridSpec g = make_grid(2, {1.0, 1.0}, {m, m});
    const double alpha = 0.05;
    // component 0 mode: sin(pi x) at x-faces (Dirichlet nodes), sin(pi y) at
    // cell centers (reflection): eigenvalue mu_x + mu_y with the same mu_h
    VectorField u(g, 0.0);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j < m; ++j)
            u.at(0, i, j) = std::sin(kPi * g.face(0, i)) * std::sin(kPi * g.center(1, j));
    LinearOperatorSpec op{OperatorKind::DirichletHelmholtz, g, alpha, 0};
    std::vector<double> out;
    apply_operator(op, u.comp[0], out);
    const double lam = 2.0 * mu_h(m);
    double gap = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        gap = std::max(gap, std::abs(out[i] - (1.0 + alpha * lam) * u.comp[0][i]));
    record("dirichlet helmholtz eigen-mode (apply)", gap <= 1e-10 * (1.0 + alpha * lam),
           qoi(gap, 1e-10));

    // and the solve inverts it
    std::vector<double> x = u.comp[0];
    SolveReport rep = cg_solve(op, u.comp[0], x, 1e-13, 10000);
    double gap2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        gap2 = std::max(gap2, std::abs(x[i] - u.comp[0][i] / (1.0 + alpha * lam)));
    record("dirichlet helmholtz eigen-mode (solve)", rep.converged && gap2 <= 1e-12,
           qoi(gap2, 1e-12));
}

void test_nonconvergence_report() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {32, 32});
    LinearOperatorSpec op{OperatorKind::NeumannPoisson, g, 0.0, -1};
    std::vector<double> rhs = cos_mode(g);
    std::vector<double> x(rhs.size(), 0.0);
    SolveReport rep = cg_solve(op, rhs, x, 1e-13, 3); // starved iteration budget
    record("maxiter exhaustion reports converged = false",
           !rep.converged && rep.iterations == 3 && rep.final_residual > 1e-13);
}

} // namespace

int main() {
    return testing::run("solvers", [] {
        test_identity();
        test_helmholtz_eigenmode();
        test_poisson();
        test_mean_preservation();
        test_m_matrix_sign();
        test_energy_descent();
        test_dirichlet_helmholtz();
        test_nonconvergence_report();
    });
}
