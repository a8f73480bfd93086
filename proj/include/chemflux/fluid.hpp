#pragma once

#include "chemflux/state.hpp"
#include "chemflux/transport.hpp"

#include <cstdint>

namespace chemflux {

enum class PotentialKind { Zero, Vertical };

/// κ toggles Stokes (0) vs Navier-Stokes (1); Φ is the gravitational
/// potential g·x_vertical (vertical = last axis) forcing the fluid by n∇Φ.
struct FluidParams {
    int kappa = 0;
    PotentialKind phi = PotentialKind::Zero;
    double gravity = 1.0;
    double phi_grad_bound() const { return phi == PotentialKind::Vertical ? std::abs(gravity) : 0.0; }
};

/// Mean-zero pressure.
struct PressureField {
    ScalarField field;
};

/// One Chorin projection step: explicit upwind convection (κ=1 only),
/// implicit viscous solve per component with no-slip walls, buoyancy n∇Φ
/// added on faces, then the pressure projection restoring discrete
/// incompressibility. Returns (u⁺, P).
std::pair<VectorField, PressureField> advance_u(const SimulationState& state, double dt,
                                                const FluidParams& params,
                                                const TransportScheme& scheme);

/// Neumann Poisson solve with the compatibility mean subtracted; mean-zero P.
PressureField pressure_poisson(const ScalarField& rhs, const TransportScheme& scheme,
                               const ScalarField* initial_guess = nullptr);

/// Buoyancy n∇Φ on faces: n averaged to the face times the exact face
/// gradient of Φ, zero on boundary faces. Constant n makes this an exact
/// discrete gradient.
VectorField buoyancy_force(const ScalarField& n, const FluidParams& params);

/// Exactly divergence-free vortex from a stream function vanishing to second
/// order on the boundary (node differences of amp·∏ sin²(πx_a/L_a)).
VectorField stream_vortex(const GridSpec& grid, double amplitude);

/// First Stokes eigenvalue estimate by force-free decay from a randomized
/// divergence-free start: fit −d/dt log‖u‖₂ on the tail, then invert the
/// implicit-Euler step map so only spatial error remains. The start is a
/// lowest-mode-rich vortex plus a small seeded perturbation; a pure random
/// field can have accidentally tiny overlap with the slowest mode, leaving
/// the tail fitting a mode mixture.
double estimate_lambda1_stokes(const GridSpec& grid, const TransportScheme& scheme,
                               unsigned long seed = 12345);

/// Number of times the nonlinear convection term has been assembled
/// (instrumentation: the κ=0 path must never touch it).
std::uint64_t convection_eval_count();
void reset_convection_eval_count();

} // namespace chemflux
