#pragma once

#include "chemflux/grid.hpp"

namespace chemflux {

/// The evolving tuple (n, c, u, P, t) plus cached constants.
struct SimulationState {
    ScalarField n; // cell density
    ScalarField c; // chemical concentration
    VectorField u; // velocity (zero boundary faces)
    ScalarField P; // pressure, mean zero
    double t = 0.0;
    long step = 0;
    double n_mean0 = 0.0; // |Ω|⁻¹ ∫ n₀
    SpectralInfo spectral;
};

} // namespace chemflux
