#pragma once

#include "chemflux/sensitivity.hpp"
#include "chemflux/state.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chemflux {

/// One row of the per-step diagnostics CSV.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_n = 0.0;               // ‖n‖₁
    double linf_c = 0.0;               // ‖c‖_∞
    double lyapunov_weighted = 0.0;    // ∫ n^p w(c); NaN above the weight singularity
    double classical_functional = 0.0; // ∫ n ln n + ½∫|∇c|²/c; NaN unless scalar sensitivity
    double kinetic_energy = 0.0;       // ½∫|u|²
    double linf_n_dev = 0.0;           // ‖n − n̄₀‖_∞
    double w1q_c = 0.0;
    double linf_u = 0.0;
    double min_n = 0.0;
    double min_c = 0.0;
    double div_u_inf = 0.0;
};

struct DiagnosticsParams {
    double w1q_exponent = 4.0;
    double c_floor = 1e-8;
    bool classical_enabled = false; // scalar sensitivity only
};

struct RateFit {
    double t1 = 0.0, t2 = 0.0;
    double rate = 0.0; // decay exponent (−slope of ln v vs t)
    double r_squared = 0.0;
    int n_points = 0;
};

/// Lemma-style singular convolution bound check parameters: the integral
/// I(t) = ∫₀ᵗ (1+s^{−α})(1+(t−s)^{−β}) e^{−γs} e^{−δ(t−s)} ds against
/// C·e^{−min{γ,δ}t}(1 + t^{min{0,1−α−β}}).
struct IntegralBoundParams {
    double eta = 0.1;
    double alpha = 0.0, beta = 0.0;
    double gamma = 2.0, delta = 1.0;
    std::vector<double> t_samples{1, 2, 4, 8, 16};
};

struct IntegralBoundReport {
    bool holds = false;
    double fitted_C = 0.0;    // max ratio I(t)/bound(t) over the samples
    double worst_ratio = 0.0; // ratio at the largest t over the max of the earlier ones
    double spearman = 0.0;    // rank correlation of ratio vs t
    std::vector<double> ratios;
};

/// w(c) = (δ₀ − c)^{−h} and its first two derivatives. Requires 0 ≤ c < δ₀.
double weight_w(double c, const ThresholdParams& th);
double weight_w_prime(double c, const ThresholdParams& th);
double weight_w_second(double c, const ThresholdParams& th);

/// Σ n_i^p w(c_i) cellvol. Errors with the offending max(c) when the weight
/// is singular (max c ≥ δ₀).
double lyapunov_weighted(const ScalarField& n, const ScalarField& c, const ThresholdParams& th);

/// Σ n ln n cellvol + ½ Σ |∇c|²/max(c, c_floor) cellvol, with 0·ln 0 := 0.
double classical_functional(const ScalarField& n, const ScalarField& c, double c_floor);

DiagnosticsRecord record_step(const SimulationState& state, const ThresholdParams& th,
                              const DiagnosticsParams& params);

/// Least-squares slope of ln(value) vs t over [t1, t2]. Needs ≥ 10 points in
/// the window, all positive.
RateFit fit_decay_rate(std::span<const std::pair<double, double>> series, double t1, double t2);

/// Graded-mesh quadrature of the singular convolution integral; refined until
/// successive estimates agree to 1e−8 relative.
double integral_bound_quadrature(double alpha, double beta, double gamma, double delta, double t);

IntegralBoundReport check_integral_lemma(const IntegralBoundParams& params);

/// CSV header/row for the diagnostics schema (17 significant digits).
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& rec);

} // namespace chemflux
