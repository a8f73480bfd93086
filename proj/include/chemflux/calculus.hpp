#pragma once

#include "chemflux/grid.hpp"

namespace chemflux {

/// (Σ |f|^p cellvol)^{1/p}; p = infinity gives max |f|. Rejects p < 1.
double lp_norm(const ScalarField& f, double p);

/// Forward-difference gradient on faces: interior face i+1/2 gets
/// (f_{i+1} − f_i)/h, boundary faces are 0 (homogeneous Neumann).
VectorField face_gradient(const ScalarField& f);

/// Per cell, Σ_a (F_{a,+} − F_{a,−})/h_a. Telescopes exactly: any F with zero
/// boundary faces has Σ divergence · cellvol = 0.
ScalarField divergence(const VectorField& F);

/// Cell-centered gradient magnitude: per axis, average the two adjacent face
/// gradients, then take the Euclidean norm across axes.
ScalarField cell_gradient_magnitude(const ScalarField& f);

/// (‖c‖_q^q + ‖ |∇c| ‖_q^q)^{1/q} with the cell-centered gradient magnitude.
/// Rejects q <= 1.
double w1q_norm(const ScalarField& c, double q);

/// First nonzero Neumann Laplacian eigenvalue of the box: continuum
/// (π/L_max)² and the discrete value (2/h²)(1 − cos(πh/L)) of the slowest axis.
SpectralInfo neumann_lambda1(const GridSpec& grid);

/// Flux-form (2N+1)-point Neumann Laplacian, identical to divergence(face_gradient(f)).
void apply_neumann_laplacian(const ScalarField& f, ScalarField& out);

double field_min(const ScalarField& f);
double field_max(const ScalarField& f);
double field_mean(const ScalarField& f);

/// max |face value| over all components.
double max_face_magnitude(const VectorField& F);

/// ½ Σ u_f² cellvol over all faces (boundary faces weighted ½; they are 0 for u anyway).
double kinetic_energy(const VectorField& u);

/// sqrt(2 · kinetic_energy): the L² norm of the staggered vector field.
double l2_norm(const VectorField& u);

} // namespace chemflux
