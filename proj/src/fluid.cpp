#include "chemflux/fluid.hpp"

#include "chemflux/calculus.hpp"
#include "chemflux/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace chemflux {

namespace {

std::uint64_t g_convection_evals = 0;

// Upwind advective form of (u·∇)u on MAC faces. Tangential neighbors across a
// wall use the reflection ghost −u (zero wall velocity).
VectorField convection(const VectorField& u) {
    ++g_convection_evals;
    const GridSpec& g = u.grid;
    VectorField adv(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        const int n0 = u.comp_dim(a, 0), n1 = u.comp_dim(a, 1), n2 = u.comp_dim(a, 2);
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k) {
                    const bool own_bnd = (a == 0 && (i == 0 || i == n0 - 1)) ||
                                         (a == 1 && (j == 0 || j == n1 - 1)) ||
                                         (a == 2 && (k == 0 || k == n2 - 1));
                    if (own_bnd) continue; // pinned no-slip faces do not move
                    const double uc = u.at(a, i, j, k);

                    // advecting velocity at this face: own component is the
                    // face value, others averaged from the 4 nearest faces
                    std::array<double, 3> w{0.0, 0.0, 0.0};
                    w[a] = uc;
                    for (int b = 0; b < g.dim; ++b) {
                        if (b == a) continue;
                        // cells sharing this a-face: lower has index −1 along a
                        int il = i, jl = j, kl = k;
                        if (a == 0) il = i - 1;
                        else if (a == 1) jl = j - 1;
                        else kl = k - 1;
                        auto bface = [&](int ci, int cj, int ck, int off) {
                            int fi = ci, fj = cj, fk = ck;
                            if (b == 0) fi += off;
                            else if (b == 1) fj += off;
                            else fk += off;
                            return u.at(b, fi, fj, fk);
                        };
                        w[b] = 0.25 * (bface(il, jl, kl, 0) + bface(il, jl, kl, 1) +
                                       bface(i, j, k, 0) + bface(i, j, k, 1));
                    }

                    double val = 0.0;
                    for (int d = 0; d < g.dim; ++d) {
                        const int nd = (d == 0 ? n0 : (d == 1 ? n1 : n2));
                        const int fd = (d == 0 ? i : (d == 1 ? j : k));
                        auto sample = [&](int off) {
                            const int q = fd + off;
                            if (q < 0 || q >= nd) return -uc; // reflection ghost
                            if (d == 0) return u.at(a, q, j, k);
                            if (d == 1) return u.at(a, i, q, k);
                            return u.at(a, i, j, q);
                        };
                        const double wd = w[d];
                        const double grad = wd > 0.0 ? (uc - sample(-1)) / g.spacing[d]
                                                     : (sample(+1) - uc) / g.spacing[d];
                        val += wd * grad;
                    }
                    adv.at(a, i, j, k) = val;
                }
    }
    return adv;
}

void viscous_solve(VectorField& u, double dt, const TransportScheme& scheme) {
    const GridSpec& g = u.grid;
    for (int a = 0; a < g.dim; ++a) {
        LinearOperatorSpec op{OperatorKind::DirichletHelmholtz, g, dt, a};
        std::vector<double> x = u.comp[a]; // guess = rhs
        SolveReport rep = cg_solve(op, u.comp[a], x, scheme.solver_tol, scheme.solver_maxiter);
        if (!rep.converged)
            throw SolverFailure("viscous solve (component " + std::to_string(a) +
                                    ") did not converge: residual " +
                                    std::to_string(rep.final_residual),
                                rep);
        u.comp[a] = std::move(x);
    }
}

} // namespace

std::uint64_t convection_eval_count() { return g_convection_evals; }
void reset_convection_eval_count() { g_convection_evals = 0; }

VectorField buoyancy_force(const ScalarField& n, const FluidParams& params) {
    const GridSpec& g = n.grid;
    VectorField F(g, 0.0);
    if (params.phi == PotentialKind::Zero || params.gravity == 0.0) return F;
    const int vert = g.dim - 1;
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    const int fi_max = (vert == 1) ? ny : nz;
    for (int fi = 1; fi < fi_max; ++fi) {
        const int t1_max = nx;
        const int t2_max = (g.dim == 3) ? ny : 1;
        for (int t1 = 0; t1 < t1_max; ++t1)
            for (int t2 = 0; t2 < t2_max; ++t2) {
                int i, j, k;
                if (vert == 1) {
                    i = t1; j = fi; k = t2;
                } else {
                    i = t1; j = t2; k = fi;
                }
                int il = i, jl = j, kl = k;
                if (vert == 1) jl = j - 1;
                else kl = k - 1;
                const double nf = 0.5 * (n(il, jl, kl) + n(i, j, k));
                F.at(vert, i, j, k) = nf * params.gravity;
            }
    }
    return F;
}

PressureField pressure_poisson(const ScalarField& rhs, const TransportScheme& scheme,
                               const ScalarField* initial_guess) {
    const GridSpec& g = rhs.grid;
    LinearOperatorSpec op{OperatorKind::NeumannPoisson, g, 0.0, -1};
    PressureField P;
    P.field = initial_guess ? *initial_guess : ScalarField(g, 0.0);
    SolveReport rep = cg_solve(op, rhs.v, P.field.v, scheme.solver_tol, scheme.solver_maxiter, true);
    if (!rep.converged) {
        std::string hist;
        const std::size_t nh = rep.residual_history.size();
        for (std::size_t i = nh > 5 ? nh - 5 : 0; i < nh; ++i)
            hist += " " + std::to_string(rep.residual_history[i]);
        throw SolverFailure("pressure solve did not converge; last residuals:" + hist, rep);
    }
    return P;
}

std::pair<VectorField, PressureField> advance_u(const SimulationState& state, double dt,
                                                const FluidParams& params,
                                                const TransportScheme& scheme) {
    if (params.kappa != 0 && params.kappa != 1)
        throw std::invalid_argument("kappa must be 0 or 1");
    if (!(dt > 0.0)) throw std::invalid_argument("advance_u requires dt > 0");
    const GridSpec& g = state.u.grid;

    VectorField u = state.u;
    u.zero_boundary_faces();

    if (params.kappa == 1) {
        const VectorField adv = convection(state.u);
        for (int a = 0; a < g.dim; ++a)
            for (std::size_t i = 0; i < u.comp[a].size(); ++i)
                u.comp[a][i] -= dt * adv.comp[a][i];
        u.zero_boundary_faces();
    }

    viscous_solve(u, dt, scheme);

    // buoyancy enters after the viscous solve so a constant-n force stays an
    // exact discrete gradient and the projection annihilates it completely
    const VectorField F = buoyancy_force(state.n, params);
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < u.comp[a].size(); ++i) u.comp[a][i] += dt * F.comp[a][i];
    u.zero_boundary_faces();

    ScalarField rhs = divergence(u);
    for (double& x : rhs.v) x /= dt;
    PressureField P = pressure_poisson(rhs, scheme, &state.P);

    const VectorField gradP = face_gradient(P.field);
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < u.comp[a].size(); ++i) u.comp[a][i] -= dt * gradP.comp[a][i];
    u.zero_boundary_faces();

    return {std::move(u), std::move(P)};
}

VectorField stream_vortex(const GridSpec& g, double amplitude) {
    VectorField u(g, 0.0);
    if (amplitude == 0.0) return u;
    const double pi = std::acos(-1.0);
    auto sin2 = [&](double x, double L) {
        const double s = std::sin(pi * x / L);
        return s * s;
    };
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    auto psi = [&](int node_i, int node_j, int cell_k) {
        double v = amplitude * sin2(g.face(0, node_i), g.extent[0]) *
                   sin2(g.face(1, node_j), g.extent[1]);
        if (g.dim == 3) v *= sin2(g.center(2, cell_k), g.extent[2]);
        return v;
    };
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                u.at(0, i, j, k) = (psi(i, j + 1, k) - psi(i, j, k)) / g.spacing[1];
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k < nz; ++k)
                u.at(1, i, j, k) = -(psi(i + 1, j, k) - psi(i, j, k)) / g.spacing[0];
    u.zero_boundary_faces();
    return u;
}

double estimate_lambda1_stokes(const GridSpec& grid, const TransportScheme& scheme,
                               unsigned long seed) {
    // reference scale: the vector Dirichlet Laplacian lower bound
    const double pi = std::acos(-1.0);
    double lam_ref = 0.0;
    for (int a = 0; a < grid.dim; ++a) lam_ref += (pi / grid.extent[a]) * (pi / grid.extent[a]);
    lam_ref *= 2.0;

    const double dt = 0.05 / lam_ref;
    const int nsteps = 160;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    VectorField u = stream_vortex(grid, 1.0);
    const double vortex_amp = max_face_magnitude(u);
    for (int a = 0; a < grid.dim; ++a)
        for (double& x : u.comp[a]) x += 0.01 * vortex_amp * dist(rng);
    u.zero_boundary_faces();

    // project to a divergence-free start
    {
        ScalarField rhs = divergence(u);
        PressureField P = pressure_poisson(rhs, scheme);
        const VectorField gradP = face_gradient(P.field);
        for (int a = 0; a < grid.dim; ++a)
            for (std::size_t i = 0; i < u.comp[a].size(); ++i) u.comp[a][i] -= gradP.comp[a][i];
        u.zero_boundary_faces();
    }

    std::vector<std::pair<double, double>> series;
    series.reserve(nsteps + 1);
    series.emplace_back(0.0, l2_norm(u));
    ScalarField Pprev(grid, 0.0);
    for (int s = 1; s <= nsteps; ++s) {
        viscous_solve(u, dt, scheme);
        ScalarField rhs = divergence(u);
        for (double& x : rhs.v) x /= dt;
        PressureField P = pressure_poisson(rhs, scheme, &Pprev);
        const VectorField gradP = face_gradient(P.field);
        for (int a = 0; a < grid.dim; ++a)
            for (std::size_t i = 0; i < u.comp[a].size(); ++i)
                u.comp[a][i] -= dt * gradP.comp[a][i];
        u.zero_boundary_faces();
        Pprev = P.field;
        series.emplace_back(s * dt, l2_norm(u));
    }

    // tail fit on the last 40% of steps
    const std::size_t start = series.size() - series.size() * 2 / 5;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = start; i < series.size(); ++i) {
        if (!(series[i].second > 0.0))
            throw std::runtime_error("stokes eigenvalue fit failed: decay reached zero");
        if (i > start && series[i].second >= series[i - 1].second)
            throw std::runtime_error("stokes eigenvalue fit failed: non-monotone tail");
        const double x = series[i].first, y = std::log(series[i].second);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double rate = -slope;
    // invert the implicit-Euler step map: per-step factor 1/(1+dt·λ)
    return (std::exp(rate * dt) - 1.0) / dt;
}

} // namespace chemflux
