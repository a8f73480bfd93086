#pragma once

#include "chemflux/grid.hpp"

#include <stdexcept>
#include <vector>

namespace chemflux {

enum class OperatorKind {
    NeumannHelmholtz,   // (I − αΔ_N) on cell-centered scalars
    DirichletHelmholtz, // (I − αΔ_D) on one staggered velocity component
    NeumannPoisson,     // Δ_N P = rhs, compatibility by mean subtraction, mean-zero P
};

struct LinearOperatorSpec {
    OperatorKind kind;
    GridSpec grid;
    double alpha = 0.0; // Helmholtz shift (a time step); unused for Poisson
    int axis = -1;      // velocity component for DirichletHelmholtz
};

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0; // relative to ‖rhs‖₂
    bool converged = false;
    std::vector<double> residual_history; // ‖r‖₂ per iteration (filled when trace=true)
};

struct SolverFailure : std::runtime_error {
    SolveReport report;
    SolverFailure(const std::string& what, SolveReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
};

/// Matrix-free CG. `x` carries the initial guess on entry and the solution on
/// exit. Convergence: ‖rhs − A x‖₂ ≤ tol·‖rhs‖₂ (system rhs after any
/// mean/compatibility handling). Non-convergence is reported, not thrown.
///
/// NeumannHelmholtz solves the zero-mean deviation and restores the mean, so
/// the solution mean equals mean(rhs) to rounding. NeumannPoisson subtracts
/// the rhs mean (compatibility gauge) and returns a mean-zero solution.
SolveReport cg_solve(const LinearOperatorSpec& op, const std::vector<double>& rhs,
                     std::vector<double>& x, double tol, int maxiter, bool trace = false);

/// Stencil application used by cg_solve; exposed for oracle tests.
/// For DirichletHelmholtz, boundary faces along `axis` are fixed zeros and the
/// tangential walls use the reflection ghost (−value, zero wall velocity).
void apply_operator(const LinearOperatorSpec& op, const std::vector<double>& x,
                    std::vector<double>& out);

} // namespace chemflux
