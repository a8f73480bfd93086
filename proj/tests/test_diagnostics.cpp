/// @file test_diagnostics.cpp
/// @brief Weight identities, functionals, decay-rate fits and the singular
/// convolution bound quadrature (closed form as oracle).

#include "chemflux/calculus.hpp"
#include "chemflux/diagnostics.hpp"

#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace chemflux;
using testing::approx;
using testing::approx_rel;
using testing::qoi;
using testing::record;
using testing::record_throws;

namespace {

const double kPi = std::acos(-1.0);

ThresholdParams fixed_threshold(double delta0, double h, double p = 2.0) {
    ThresholdParams th;
    th.p = p;
    th.h = h;
    th.delta0 = delta0;
    th.envelope = EnvelopeFn::constant(1.0);
    return th;
}

void test_weight() {
    ThresholdParams th = fixed_threshold(0.05, 1.0 / 96.0);
    const double expect = std::exp(std::log(20.0) / 96.0); // 0.05^(-1/96)
    record("w(0) = 0.05^(-1/96)", approx_rel(weight_w(0.0, th), expect, 1e-15),
           qoi(weight_w(0.0, th), expect));

    ThresholdParams tiny = fixed_threshold(0.05, 1e-12);
    record("h -> 0 limit gives w -> 1", approx(weight_w(0.03, tiny), 1.0, 1e-10));

    // phi'/phi = h/(delta0 - c) exactly
    bool identity = true;
    for (double c : {0.0, 0.01, 0.03, 0.049}) {
        const double lhs = weight_w_prime(c, th) / weight_w(c, th);
        identity = identity && approx_rel(lhs, th.h / (th.delta0 - c), 1e-14);
    }
    record("phi'/phi identity", identity);

    record_throws("c >= delta0 rejected (weight singular)", [&] { weight_w(0.05, th); });
    record_throws("negative c rejected", [&] { weight_w(-0.01, th); });

    // finite differences vs the closed-form derivatives
    bool fd_ok = true;
    const double dc = 1e-6;
    for (double c : {0.005, 0.02, 0.04}) {
        const double fd1 = (weight_w(c + dc, th) - weight_w(c - dc, th)) / (2.0 * dc);
        const double fd2 =
            (weight_w(c + dc, th) - 2.0 * weight_w(c, th) + weight_w(c - dc, th)) / (dc * dc);
        fd_ok = fd_ok && approx_rel(fd1, weight_w_prime(c, th), 1e-6) &&
                approx_rel(fd2, weight_w_second(c, th), 1e-3);
    }
    record("finite differences match phi' (1e-6) and phi''", fd_ok);
}

void test_lyapunov() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {16, 16});
    ThresholdParams th = fixed_threshold(0.05, 1.0 / 96.0);

    ScalarField n(g, 1.0), c(g, 0.0);
    const double expect = std::pow(0.05, -1.0 / 96.0);
    record("n=1, c=0 on the unit square", approx_rel(lyapunov_weighted(n, c, th), expect, 1e-14),
           qoi(lyapunov_weighted(n, c, th), expect));

    ScalarField z(g, 0.0);
    record("n = 0 gives 0", lyapunov_weighted(z, c, th) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> un(0.0, 2.0), uc(0.0, 0.04);
    ScalarField nr(g), cr(g);
    for (double& x : nr.v) x = un(rng);
    for (double& x : cr.v) x = uc(rng);
    ScalarField n2 = nr;
    for (double& x : n2.v) x *= 2.0;
    record("n -> 2n scales the functional by 2^p",
           approx_rel(lyapunov_weighted(n2, cr, th),
                      std::pow(2.0, th.p) * lyapunov_weighted(nr, cr, th), 1e-13));

    ScalarField chot(g, 0.06);
    record_throws("max c >= delta0 reported with the offending value",
                  [&] { lyapunov_weighted(n, chot, th); });
}

void test_classical_functional() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {32, 32});
    ScalarField n1(g, 1.0), cc(g, 0.4);
    record("n=1, c const gives 0", approx(classical_functional(n1, cc, 1e-8), 0.0, 1e-14));

    ScalarField ne(g, std::exp(1.0));
    record("n=e gives e", approx_rel(classical_functional(ne, cc, 1e-8), std::exp(1.0), 1e-13));

    // c = cbar + small cosine: functional ~ (1/2)||grad c||^2 / cbar
    const double cbar = 0.5, eps = 1e-3;
    ScalarField cpert(g);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            cpert(i, j) = cbar + eps * std::cos(kPi * g.center(0, i));
    ScalarField mag = cell_gradient_magnitude(cpert);
    double grad2 = 0.0;
    for (double x : mag.v) grad2 += x * x;
    grad2 *= g.cell_volume();
    const double expect = 0.5 * grad2 / cbar;
    record("perturbation expansion (constant denominator)",
           approx_rel(classical_functional(n1, cpert, 1e-8), expect, 2e-3),
           qoi(classical_functional(n1, cpert, 1e-8), expect));

    record_throws("c_floor <= 0 rejected", [&] { classical_functional(n1, cc, 0.0); });
}

void test_fit_decay_rate() {
    std::vector<std::pair<double, double>> series;
    for (int i = 0; i <= 100; ++i) {
        const double t = 0.1 * i;
        series.emplace_back(t, 5.0 * std::exp(-2.0 * t));
    }
    RateFit fit = fit_decay_rate(series, 0.0, 10.0);
    record("pure exponential: rate 2, r^2 = 1",
           approx(fit.rate, 2.0, 1e-10) && approx(fit.r_squared, 1.0, 1e-10),
           qoi(fit.rate, 2.0));

    std::vector<std::pair<double, double>> flat;
    for (int i = 0; i < 20; ++i) flat.emplace_back(0.5 * i, 3.7);
    RateFit f0 = fit_decay_rate(flat, 0.0, 10.0);
    record("constant series: rate 0, r^2 = 1", approx(f0.rate, 0.0, 1e-14) && f0.r_squared == 1.0);

    // modulated exponential over [5,10]: rate 1 +- 0.02
    std::vector<std::pair<double, double>> mod;
    for (int i = 0; i <= 500; ++i) {
        const double t = 0.02 * i;
        mod.emplace_back(t, std::exp(-t) * (1.0 + 0.01 * std::cos(10.0 * t)));
    }
    RateFit fm = fit_decay_rate(mod, 5.0, 10.0);
    record("modulated exponential: rate 1 +- 0.02", approx(fm.rate, 1.0, 0.02),
           qoi(fm.rate, 1.0));

    // scaling the values leaves the rate unchanged
    std::vector<std::pair<double, double>> scaled = mod;
    for (auto& [t, v] : scaled) v *= 123.456;
    RateFit fs = fit_decay_rate(scaled, 5.0, 10.0);
    record("rate invariant under value scaling", approx(fs.rate, fm.rate, 1e-12));

    record_throws("nonpositive values rejected", [] {
        std::vector<std::pair<double, double>> bad;
        for (int i = 0; i < 20; ++i) bad.emplace_back(i, i < 10 ? 1.0 : -1.0);
        fit_decay_rate(bad, 0.0, 19.0);
    });
    record_throws("too few points rejected", [] {
        std::vector<std::pair<double, double>> few;
        for (int i = 0; i < 5; ++i) few.emplace_back(i, 1.0);
        fit_decay_rate(few, 0.0, 4.0);
    });
}

void test_integral_quadrature() {
    // closed form: alpha=beta=0, gamma=2, delta=1 -> 4 e^{-t} (1 - e^{-t})
    bool ok = true;
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        const double I = integral_bound_quadrature(0.0, 0.0, 2.0, 1.0, t);
        const double exact = 4.0 * std::exp(-t) * (1.0 - std::exp(-t));
        worst = std::max(worst, std::abs(I - exact) / exact);
        ok = ok && std::abs(I - exact) <= 1e-6 * exact;
    }
    record("closed-form case matches to 1e-6", ok, qoi(worst, 1e-6));

    // refinement convergence for strong singularities
    for (double ab : {0.5, 0.9}) {
        const double I1 = integral_bound_quadrature(ab, ab, 1.0, 0.5, 2.0);
        record("quadrature converges at alpha=beta=" + std::to_string(ab).substr(0, 3),
               std::isfinite(I1) && I1 > 0.0);
    }

    // bounded-ratio verdict for the half-singular case
    IntegralBoundParams p;
    p.eta = 0.1;
    p.alpha = 0.5;
    p.beta = 0.5;
    p.gamma = 1.0;
    p.delta = 0.5;
    IntegralBoundReport rep = check_integral_lemma(p);
    record("alpha=beta=0.5 case: ratio bounded over {1,2,4,8,16}", rep.holds,
           qoi(rep.worst_ratio, 1.05));

    record_throws("alpha outside [0, 1-eta) rejected", [] {
        IntegralBoundParams bad;
        bad.eta = 0.2;
        bad.alpha = 0.95;
        check_integral_lemma(bad);
    });
    record_throws("gamma - delta outside [eta, 1/eta] rejected", [] {
        IntegralBoundParams bad;
        bad.eta = 0.5;
        bad.gamma = 1.0;
        bad.delta = 0.9;
        check_integral_lemma(bad);
    });
}

void test_record_step() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {16, 16});
    ThresholdParams th = fixed_threshold(0.05, 1.0 / 96.0);
    DiagnosticsParams params;

    SimulationState s;
    s.n = ScalarField(g, 1.5);
    s.c = ScalarField(g, 0.02);
    s.u = VectorField(g, 0.0);
    s.P = ScalarField(g, 0.0);
    s.t = 0.0;
    s.n_mean0 = 1.5;
    DiagnosticsRecord rec = record_step(s, th, params);
    record("uniform quiescent record",
           rec.kinetic_energy == 0.0 && rec.linf_n_dev == 0.0 && rec.div_u_inf == 0.0 &&
               approx(rec.mass_n, 1.5, 1e-14) && approx(rec.linf_c, 0.02, 1e-16));
    record("initial record mass equals ||n0||_1", approx(rec.mass_n, lp_norm(s.n, 1.0), 0.0));
    record("classical functional NaN unless scalar sensitivity",
           std::isnan(rec.classical_functional));

    params.classical_enabled = true;
    DiagnosticsRecord rec2 = record_step(s, th, params);
    record("classical functional populated when enabled",
           std::isfinite(rec2.classical_functional));

    s.c = ScalarField(g, 0.06); // beyond delta0: lyapunov is NaN, not an exception
    DiagnosticsRecord rec3 = record_step(s, th, params);
    record("lyapunov NaN above the weight singularity", std::isnan(rec3.lyapunov_weighted));

    const std::string header = csv_header();
    record("csv schema",
           header ==
               "t,mass_n,linf_c,lyapunov,classical,kinetic,linf_n_dev,w1q_c,linf_u,min_n,min_c,"
               "div_u_inf");
    const std::string row = csv_row(rec);
    record("csv row has 12 columns",
           std::count(row.begin(), row.end(), ',') == 11);
}

} // namespace

int main() {
    return testing::run("diagnostics", [] {
        test_weight();
        test_lyapunov();
        test_classical_functional();
        test_fit_decay_rate();
        test_integral_quadrature();
        test_record_step();
    });
}
