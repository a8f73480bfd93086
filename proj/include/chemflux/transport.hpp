#pragma once

#include "chemflux/sensitivity.hpp"
#include "chemflux/state.hpp"

namespace chemflux {

/// Discretization knobs for the n and c updates. Advection is donor-cell
/// upwind and the consumption term is pointwise implicit; those are fixed.
struct TransportScheme {
    bool implicit_diffusion = true; // backward Euler (default); explicit otherwise
    double cfl = 0.4;               // in (0, 1]
    double dt_max = 0.05;
    double solver_tol = 1e-12;
    int solver_maxiter = 20000;
};

/// Face field V = S_ε(x,n,c)·∇c. The normal gradient component is the face
/// gradient itself; tangential components are averaged from the four (2D) or
/// eight (3D) nearest faces. Boundary faces are exactly 0.
VectorField chemotactic_velocity(const ScalarField& n, const ScalarField& c,
                                 const SensitivityModel& model, const RegularizerParams& reg);

/// Largest admissible step: cfl · min_a h_a / (N · max |V+u|), capped at
/// dt_max (explicit diffusion adds its own stability cap). Returns dt_max
/// when all speeds vanish.
double stable_dt(const SimulationState& state, const SensitivityModel& model,
                 const RegularizerParams& reg, const TransportScheme& scheme);

/// One step of n: conservative upwind fluxes for the total drift V + u, then
/// the diffusion update. Mass is conserved (flux form telescopes; the Neumann
/// Helmholtz solve preserves the mean).
ScalarField advance_n(const SimulationState& state, double dt, const SensitivityModel& model,
                      const RegularizerParams& reg, const TransportScheme& scheme);

/// One step of c: advective upwind transport by u, diffusion, then the
/// pointwise consumption divide c/(1 + dt·n). Keeps 0 ≤ c and max c ≤ max c₀.
ScalarField advance_c(const SimulationState& state, double dt, const TransportScheme& scheme);

} // namespace chemflux
