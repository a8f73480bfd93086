/// @file test_core_fields.cpp
/// @brief Grid, field containers and discrete calculus: spec'd examples plus
/// the telescoping/homogeneity/stencil-equivalence properties.

#include "chemflux/calculus.hpp"
#include "chemflux/grid.hpp"

#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace chemflux;
using testing::approx;
using testing::qoi;
using testing::record;
using testing::record_throws;

namespace {

const double kPi = std::acos(-1.0);
const double kInf = std::numeric_limits<double>::infinity();

ScalarField sampled(const GridSpec& g, double (*f)(double, double)) {
    ScalarField out(g);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 0; k < g.nz(); ++k) out(i, j, k) = f(g.center(0, i), g.center(1, j));
    return out;
}

void test_make_grid() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {64, 64});
    record("make_grid 2d spacing", g.spacing[0] == 1.0 / 64 && g.spacing[1] == 1.0 / 64);
    record("make_grid 2d volume", g.volume() == 1.0);

    GridSpec g3 = make_grid(3, {1.0, 1.0, 1.0}, {24, 24, 24});
    record("make_grid 3d cell volume", approx(g3.cell_volume(), std::pow(24.0, -3.0), 1e-18));

    record_throws("make_grid rejects nonpositive extent",
                  [] { make_grid(2, {1.0, -1.0}, {64, 64}); });
    record_throws("make_grid rejects dim 4", [] { make_grid(4, {1, 1, 1, 1}, {8, 8, 8, 8}); });
    record_throws("make_grid rejects cells < 4", [] { make_grid(2, {1.0, 1.0}, {3, 64}); });
}

void test_lp_norm() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {8, 8});
    ScalarField ones(g, 1.0);
    record("lp_norm constant 1, p=2", approx(lp_norm(ones, 2.0), 1.0, 1e-14));

    GridSpec g2 = make_grid(2, {1.0, 1.0}, {4, 4});
    ScalarField f(g2, 0.0);
    f(0, 0) = 3.0;
    f(1, 1) = 3.0;
    record("lp_norm max field, p=inf", lp_norm(f, kInf) == 3.0);

    // f = cos(pi x) on the unit square: midpoint sums of cos^2 over a full
    // mode are exact, so the discrete L2 norm hits sqrt(1/2) at rounding level
    GridSpec g64 = make_grid(2, {1.0, 1.0}, {64, 64});
    ScalarField c = sampled(g64, [](double x, double) { return std::cos(kPi * x); });
    record("lp_norm cos mode, p=2", approx(lp_norm(c, 2.0), std::sqrt(0.5), 1e-13),
           qoi(lp_norm(c, 2.0), std::sqrt(0.5)));

    record_throws("lp_norm rejects p < 1", [&] { lp_norm(ones, 0.5); });

    // homogeneity under scaling, random field and exponents
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    ScalarField r(g64);
    for (double& x : r.v) x = dist(rng);
    bool homog = true;
    for (double p : {1.0, 2.0, 3.5, kInf}) {
        const double a = -1.7;
        ScalarField ra = r;
        for (double& x : ra.v) x *= a;
        homog = homog && testing::approx_rel(lp_norm(ra, p), std::abs(a) * lp_norm(r, p), 1e-13);
    }
    record("lp_norm homogeneity |a|*norm", homog);
}

void test_face_gradient() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {64, 64});
    ScalarField k(g, 4.25);
    VectorField gk = face_gradient(k);
    record("face_gradient of constant is zero", max_face_magnitude(gk) == 0.0);

    const double a = 1.75;
    ScalarField ramp(g);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) ramp(i, j) = a * g.center(0, i);
    VectorField gr = face_gradient(ramp);
    bool ok = true;
    for (int i = 1; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) ok = ok && approx(gr.at(0, i, j), a, 1e-12);
    for (int j = 0; j < g.ny(); ++j)
        ok = ok && gr.at(0, 0, j) == 0.0 && gr.at(0, g.nx(), j) == 0.0;
    record("face_gradient of ramp: interior a, boundary 0", ok);

    // cos(pi x): exact face value is -pi sin(pi x_f) sinc(pi h/2); the gap to
    // -pi sin(pi x_f) is bounded by pi^3 h^2 / 24
    ScalarField c = sampled(g, [](double x, double) { return std::cos(kPi * x); });
    VectorField gc = face_gradient(c);
    double worst = 0.0;
    for (int i = 1; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            worst = std::max(worst,
                             std::abs(gc.at(0, i, j) + kPi * std::sin(kPi * g.face(0, i))));
    const double h = g.spacing[0];
    record("face_gradient cos mode O(h^2)", worst <= kPi * kPi * kPi * h * h / 24.0 * 1.000001,
           qoi(worst, kPi * kPi * kPi * h * h / 24.0));
}

void test_divergence() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {32, 32});
    VectorField zero(g, 0.0);
    ScalarField d0 = divergence(zero);
    record("divergence of zero flux", field_max(d0) == 0.0 && field_min(d0) == 0.0);

    // telescoping: zero-boundary random flux sums to zero exactly
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    VectorField F(g, 0.0);
    for (int a = 0; a < 2; ++a)
        for (double& x : F.comp[a]) x = dist(rng);
    F.zero_boundary_faces();
    ScalarField d = divergence(F);
    double total = 0.0;
    for (double x : d.v) total += x;
    total *= g.cell_volume();
    record("divergence telescopes to zero total", std::abs(total) <= 1e-13,
           qoi(std::abs(total), 1e-13));

    // grad(cos) mode: div(grad f) = -mu_h f exactly for the sampled eigenmode
    GridSpec g64 = make_grid(2, {1.0, 1.0}, {64, 64});
    ScalarField c = sampled(g64, [](double x, double) { return std::cos(kPi * x); });
    ScalarField lap = divergence(face_gradient(c));
    const double h = g64.spacing[0];
    const double mu = 2.0 / (h * h) * (1.0 - std::cos(kPi * h));
    double worst = 0.0, worst_cont = 0.0;
    for (std::size_t i = 0; i < c.v.size(); ++i) {
        worst = std::max(worst, std::abs(lap.v[i] + mu * c.v[i]));
        worst_cont = std::max(worst_cont, std::abs(lap.v[i] + kPi * kPi * c.v[i]));
    }
    record("divergence(face_gradient) = -mu_h cos exactly", worst <= 1e-9 * mu,
           qoi(worst, 1e-9 * mu));
    record("discrete laplacian of cos -> -pi^2 cos at O(h^2)",
           worst_cont <= kPi * kPi * (kPi * h) * (kPi * h) / 12.0 * 1.01,
           qoi(worst_cont, kPi * kPi * (kPi * h) * (kPi * h) / 12.0));

    // the composed operator equals the (2N+1)-point Neumann stencil
    ScalarField rnd(g64);
    for (double& x : rnd.v) x = dist(rng);
    ScalarField via_ops = divergence(face_gradient(rnd));
    ScalarField via_stencil(g64);
    apply_neumann_laplacian(rnd, via_stencil);
    double gap = 0.0;
    for (std::size_t i = 0; i < rnd.v.size(); ++i)
        gap = std::max(gap, std::abs(via_ops.v[i] - via_stencil.v[i]));
    record("div(grad f) equals the Neumann stencil", gap <= 1e-9, qoi(gap, 1e-9));
}

void test_w1q_norm() {
    GridSpec g = make_grid(2, {1.0, 1.0}, {64, 64});
    ScalarField k(g, 2.5);
    record("w1q_norm of constant k", approx(w1q_norm(k, 3.0), 2.5, 1e-13));
    ScalarField z(g, 0.0);
    record("w1q_norm of zero", w1q_norm(z, 2.0) == 0.0);
    record_throws("w1q_norm rejects q <= 1", [&] { w1q_norm(k, 1.0); });

    ScalarField c = sampled(g, [](double x, double) { return std::cos(kPi * x); });
    const double expected = std::sqrt(0.5 + kPi * kPi / 2.0);
    const double got = w1q_norm(c, 2.0);
    const double h = g.spacing[0];
    record("w1q_norm cos mode O(h^2)", std::abs(got - expected) <= 5.0 * h * h,
           qoi(std::abs(got - expected), 5.0 * h * h));
}

void test_neumann_lambda1() {
    GridSpec unit = make_grid(2, {1.0, 1.0}, {64, 64});
    SpectralInfo s = neumann_lambda1(unit);
    record("lambda1 continuum unit square = pi^2", approx(s.lambda1_continuum, kPi * kPi, 1e-12));

    GridSpec rect = make_grid(2, {2.0, 1.0}, {64, 32});
    SpectralInfo sr = neumann_lambda1(rect);
    record("lambda1 continuum [0,2]x[0,1] = (pi/2)^2",
           approx(sr.lambda1_continuum, kPi * kPi / 4.0, 1e-12));

    // discrete converges to the continuum from below at O(h^2)
    double prev_err = -1.0;
    bool from_below = true, order2 = true;
    for (int m : {16, 32, 64, 128}) {
        GridSpec g = make_grid(2, {1.0, 1.0}, {m, m});
        SpectralInfo si = neumann_lambda1(g);
        from_below = from_below && si.lambda1_discrete < si.lambda1_continuum;
        const double err = si.lambda1_continuum - si.lambda1_discrete;
        if (prev_err > 0.0) order2 = order2 && approx(prev_err / err, 4.0, 0.2);
        prev_err = err;
    }
    record("lambda1 discrete monotone from below", from_below);
    record("lambda1 discrete O(h^2) convergence", order2);
}

void test_vector_field_shapes() {
    GridSpec g = make_grid(3, {1.0, 2.0, 3.0}, {4, 6, 8});
    VectorField u(g, 1.0);
    record("facex count", u.comp[0].size() == std::size_t(5) * 6 * 8);
    record("facey count", u.comp[1].size() == std::size_t(4) * 7 * 8);
    record("facez count", u.comp[2].size() == std::size_t(4) * 6 * 9);
    u.zero_boundary_faces();
    bool interior_kept = u.at(0, 2, 3, 4) == 1.0 && u.at(2, 1, 1, 4) == 1.0;
    bool bnd_zero = u.at(0, 0, 3, 4) == 0.0 && u.at(0, 4, 3, 4) == 0.0 &&
                    u.at(1, 2, 0, 1) == 0.0 && u.at(2, 2, 3, 8) == 0.0;
    record("zero_boundary_faces touches only boundary faces", interior_kept && bnd_zero);
}

} // namespace

int main() {
    return testing::run("core fields", [] {
        test_make_grid();
        test_lp_norm();
        test_face_gradient();
        test_divergence();
        test_w1q_norm();
        test_neumann_lambda1();
        test_vector_field_shapes();
    });
}
