#pragma once

#include "chemflux/grid.hpp"

#include <array>

namespace chemflux {

class ScalarField; // fwd (grid.hpp defines it; kept for readers)

/// Non-decreasing envelope S0 bounding every sensitivity entry: |s_ij| <= S0(c).
struct EnvelopeFn {
    enum class Form { Constant, Affine };
    Form form = Form::Constant;
    double a = 1.0; // constant value, or affine offset
    double b = 0.0; // affine slope (>= 0)

    double operator()(double c) const { return form == Form::Constant ? a : a + b * c; }
    static EnvelopeFn constant(double s0);
    static EnvelopeFn affine(double a, double b);
};

/// Boundary cutoff ρ_ε: 0 on the box boundary, 1 at distance >= ε, smoothstep
/// between. Disabling it makes ρ ≡ 1 (the unregularized model).
struct RegularizerParams {
    double epsilon = 0.0625;
    bool enabled = true;
};

/// Matrix-valued chemotactic sensitivity. Three preset families:
///   scalar(χ):      S = χ·I (recovers the classical gradient-seeking model)
///   rotational:     S = s0·R(θ), rotation about the vertical axis in 3D
///   modulated:      m(x)·base with m(x) = (1 + cos(2πx₀/L₀))/2
struct SensitivityModel {
    enum class Kind { Scalar, Rotational, Modulated };
    Kind kind = Kind::Scalar;
    double chi = 1.0;   // scalar kind
    double s0 = 1.0;    // rotational scale
    double theta = 0.0; // rotation angle
    bool modulated_base_rotational = true;
    EnvelopeFn envelope;

    static SensitivityModel scalar(double chi);
    static SensitivityModel rotational(double s0, double theta);
    static SensitivityModel modulated(const SensitivityModel& base);
};

using SensMatrix = std::array<std::array<double, 3>, 3>;

/// S(x, n, c) as an N×N matrix (N = grid.dim). Rejects negative n or c.
SensMatrix eval_S(const SensitivityModel& model, const GridSpec& grid,
                  const std::array<double, 3>& x, double n, double c);

/// ρ_ε(x) = ψ(d(x,∂Ω)/ε), ψ the C¹ smoothstep 3s²−2s³ clamped to [0,1].
double eval_rho(const RegularizerParams& params, const GridSpec& grid,
                const std::array<double, 3>& x);

/// S_ε = ρ_ε(x)·S(x,n,c); identically zero on the boundary.
SensMatrix eval_S_eps(const SensitivityModel& model, const RegularizerParams& params,
                      const GridSpec& grid, const std::array<double, 3>& x, double n, double c);

/// The admissibility pair from the weighted-functional argument and the
/// resulting smallness threshold delta0 on ‖c0‖_∞.
struct ThresholdParams {
    double p = 2.0;
    double h = 1.0 / 96.0;
    double delta0 = 0.0;
    EnvelopeFn envelope;
    int binding_constraint = 0; // 1: quadratic-in-delta condition, 2: linear one
};

/// Largest delta0 > 0 with 3p(p−1)δ²S0²(δ) ≤ h(h+1) and 3pδS0(δ) ≤ h+1,
/// found by bisection (both left sides are non-decreasing in δ).
/// Requires p > 1 and 0 < h < 1/48.
ThresholdParams smallness_threshold(double p, double h, const EnvelopeFn& envelope);

struct SmallnessReport {
    bool admissible = false;
    double margin = 0.0; // delta0 − ‖c0‖_∞
    double linf_c0 = 0.0;
};

/// admissible ⇔ ‖c0‖_∞ < delta0. Rejects fields with negative values.
SmallnessReport check_smallness(const ScalarField& c0, const ThresholdParams& th);

} // namespace chemflux
