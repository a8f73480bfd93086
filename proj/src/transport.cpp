#include "chemflux/transport.hpp"

#include "chemflux/calculus.hpp"
#include "chemflux/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chemflux {

namespace {

// max over faces of |V_f + u_f|, component-wise
double max_total_speed(const VectorField& V, const VectorField& u) {
    double m = 0.0;
    for (int a = 0; a < V.grid.dim; ++a)
        for (std::size_t i = 0; i < V.comp[a].size(); ++i)
            m = std::max(m, std::abs(V.comp[a][i] + u.comp[a][i]));
    return m;
}

double min_spacing(const GridSpec& g) {
    double h = g.spacing[0];
    for (int a = 1; a < g.dim; ++a) h = std::min(h, g.spacing[a]);
    return h;
}

void check_cfl(double dt, double limit) {
    if (dt > limit * (1.0 + 1e-9))
        throw std::invalid_argument("time step " + std::to_string(dt) +
                                    " violates the CFL limit " + std::to_string(limit));
}

ScalarField diffuse(const ScalarField& f, double dt, const TransportScheme& scheme) {
    const GridSpec& g = f.grid;
    if (!scheme.implicit_diffusion) {
        ScalarField lap(g);
        apply_neumann_laplacian(f, lap);
        ScalarField out = f;
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += dt * lap.v[i];
        return out;
    }
    LinearOperatorSpec op{OperatorKind::NeumannHelmholtz, g, dt, -1};
    ScalarField out = f; // previous field as the initial guess
    SolveReport rep = cg_solve(op, f.v, out.v, scheme.solver_tol, scheme.solver_maxiter);
    if (!rep.converged)
        throw SolverFailure("diffusion solve did not converge: residual " +
                                std::to_string(rep.final_residual) + " after " +
                                std::to_string(rep.iterations) + " iterations",
                            rep);
    return out;
}

} // namespace

VectorField chemotactic_velocity(const ScalarField& n, const ScalarField& c,
                                 const SensitivityModel& model, const RegularizerParams& reg) {
    const GridSpec& g = n.grid;
    const VectorField grad = face_gradient(c);
    VectorField V(g, 0.0);
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();

    for (int axis = 0; axis < g.dim; ++axis) {
        const int fi_max = (axis == 0 ? nx : (axis == 1 ? ny : nz));
        for (int fi = 1; fi < fi_max; ++fi) {
            const int t1_max = axis == 0 ? ny : nx;
            const int t2_max = (g.dim == 3) ? (axis == 2 ? ny : nz) : 1;
            for (int t1 = 0; t1 < t1_max; ++t1)
                for (int t2 = 0; t2 < t2_max; ++t2) {
                    // map (fi, t1, t2) to (i,j,k) face coordinates
                    int i, j, k;
                    if (axis == 0) {
                        i = fi; j = t1; k = t2;
                    } else if (axis == 1) {
                        i = t1; j = fi; k = t2;
                    } else {
                        i = t1; j = t2; k = fi;
                    }
                    // the two cells sharing this face
                    int il = i, jl = j, kl = k;
                    if (axis == 0) il = i - 1;
                    else if (axis == 1) jl = j - 1;
                    else kl = k - 1;

                    const double nf = std::max(0.0, 0.5 * (n(il, jl, kl) + n(i, j, k)));
                    const double cf = std::max(0.0, 0.5 * (c(il, jl, kl) + c(i, j, k)));

                    std::array<double, 3> x{};
                    x[0] = axis == 0 ? g.face(0, i) : g.center(0, i);
                    x[1] = axis == 1 ? g.face(1, j) : g.center(1, j);
                    if (g.dim == 3) x[2] = axis == 2 ? g.face(2, k) : g.center(2, k);

                    // gradient vector at this face: normal from the face
                    // itself, tangential averaged from the 4 nearest faces of
                    // each tangential orientation (8 in 3D)
                    std::array<double, 3> gr{0.0, 0.0, 0.0};
                    gr[axis] = grad.at(axis, i, j, k);
                    for (int b = 0; b < g.dim; ++b) {
                        if (b == axis) continue;
                        // faces of orientation b belonging to cells L and R
                        auto face_b = [&](int ci, int cj, int ck, int off) {
                            int fb_i = ci, fb_j = cj, fb_k = ck;
                            if (b == 0) fb_i += off;
                            else if (b == 1) fb_j += off;
                            else fb_k += off;
                            return grad.at(b, fb_i, fb_j, fb_k);
                        };
                        gr[b] = 0.25 * (face_b(il, jl, kl, 0) + face_b(il, jl, kl, 1) +
                                        face_b(i, j, k, 0) + face_b(i, j, k, 1));
                    }

                    const SensMatrix S = eval_S_eps(model, reg, g, x, nf, cf);
                    double v = 0.0;
                    for (int b = 0; b < g.dim; ++b) v += S[axis][b] * gr[b];
                    V.at(axis, i, j, k) = v;
                }
        }
    }
    return V;
}

double stable_dt(const SimulationState& state, const SensitivityModel& model,
                 const RegularizerParams& reg, const TransportScheme& scheme) {
    const GridSpec& g = state.n.grid;
    const VectorField V = chemotactic_velocity(state.n, state.c, model, reg);
    const double speed = max_total_speed(V, state.u);
    double dt = scheme.dt_max;
    if (speed > 0.0) dt = std::min(dt, scheme.cfl * min_spacing(g) / (g.dim * speed));
    if (!scheme.implicit_diffusion) {
        double inv = 0.0;
        for (int a = 0; a < g.dim; ++a) inv += 1.0 / (g.spacing[a] * g.spacing[a]);
        dt = std::min(dt, 0.45 / inv); // forward-Euler heat stability, with margin
    }
    return dt;
}

ScalarField advance_n(const SimulationState& state, double dt, const SensitivityModel& model,
                      const RegularizerParams& reg, const TransportScheme& scheme) {
    const GridSpec& g = state.n.grid;
    if (field_min(state.n) < 0.0)
        throw std::invalid_argument("advance_n requires n >= 0");
    check_cfl(dt, stable_dt(state, model, reg, scheme));

    const VectorField V = chemotactic_velocity(state.n, state.c, model, reg);
    const ScalarField& n = state.n;

    // donor-cell fluxes of the total drift, conservative differencing
    VectorField flux(g, 0.0);
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    for (int axis = 0; axis < g.dim; ++axis) {
        const int fi_max = (axis == 0 ? nx : (axis == 1 ? ny : nz));
        for (int fi = 1; fi < fi_max; ++fi) {
            const int t1_max = axis == 0 ? ny : nx;
            const int t2_max = (g.dim == 3) ? (axis == 2 ? ny : nz) : 1;
            for (int t1 = 0; t1 < t1_max; ++t1)
                for (int t2 = 0; t2 < t2_max; ++t2) {
                    int i, j, k;
                    if (axis == 0) {
                        i = fi; j = t1; k = t2;
                    } else if (axis == 1) {
                        i = t1; j = fi; k = t2;
                    } else {
                        i = t1; j = t2; k = fi;
                    }
                    int il = i, jl = j, kl = k;
                    if (axis == 0) il = i - 1;
                    else if (axis == 1) jl = j - 1;
                    else kl = k - 1;
                    const double w = V.at(axis, i, j, k) + state.u.at(axis, i, j, k);
                    flux.at(axis, i, j, k) = w > 0.0 ? w * n(il, jl, kl) : w * n(i, j, k);
                }
        }
    }

    ScalarField drifted(g);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                double div = (flux.at(0, i + 1, j, k) - flux.at(0, i, j, k)) / g.spacing[0] +
                             (flux.at(1, i, j + 1, k) - flux.at(1, i, j, k)) / g.spacing[1];
                if (g.dim == 3)
                    div += (flux.at(2, i, j, k + 1) - flux.at(2, i, j, k)) / g.spacing[2];
                drifted(i, j, k) = n(i, j, k) - dt * div;
            }

    return diffuse(drifted, dt, scheme);
}

ScalarField advance_c(const SimulationState& state, double dt, const TransportScheme& scheme) {
    const GridSpec& g = state.c.grid;
    const ScalarField& c = state.c;
    const ScalarField& n = state.n;
    if (field_min(n) < 0.0 || field_min(c) < 0.0)
        throw std::invalid_argument("advance_c requires n >= 0 and c >= 0");

    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    // advective upwind form: a convex combination of neighbor values under the
    // CFL limit, so max c cannot grow no matter how small the projection
    // residual leaves div u
    double max_coef = 0.0;
    ScalarField advected(g);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                const double cc = c(i, j, k);
                double center = 1.0, acc = 0.0, coef_sum = 0.0;
                for (int a = 0; a < g.dim; ++a) {
                    const int fi = (a == 0 ? i : (a == 1 ? j : k));
                    double ulo, uhi;
                    if (a == 0) {
                        ulo = state.u.at(0, i, j, k);
                        uhi = state.u.at(0, i + 1, j, k);
                    } else if (a == 1) {
                        ulo = state.u.at(1, i, j, k);
                        uhi = state.u.at(1, i, j + 1, k);
                    } else {
                        ulo = state.u.at(2, i, j, k);
                        uhi = state.u.at(2, i, j, k + 1);
                    }
                    const double ubar = 0.5 * (ulo + uhi);
                    const double nu = dt / g.spacing[a];
                    const double am = std::max(ubar, 0.0) * nu;  // takes the lower neighbor
                    const double ap = std::max(-ubar, 0.0) * nu; // takes the upper neighbor
                    double clo = cc, chi = cc;                   // Neumann ghosts
                    if (fi > 0) clo = (a == 0) ? c(i - 1, j, k) : (a == 1) ? c(i, j - 1, k)
                                                                           : c(i, j, k - 1);
                    const int top = (a == 0 ? nx : (a == 1 ? ny : nz)) - 1;
                    if (fi < top) chi = (a == 0) ? c(i + 1, j, k) : (a == 1) ? c(i, j + 1, k)
                                                                             : c(i, j, k + 1);
                    acc += am * clo + ap * chi;
                    center -= am + ap;
                    coef_sum += am + ap;
                }
                max_coef = std::max(max_coef, coef_sum);
                advected(i, j, k) = std::max(center, 0.0) * cc + acc;
            }
    if (max_coef > 1.0 + 1e-9)
        throw std::invalid_argument("time step violates the advective CFL limit for c");

    ScalarField diffused = diffuse(advected, dt, scheme);

    ScalarField out(g);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = diffused.v[i] / (1.0 + dt * n.v[i]);
    return out;
}

} // namespace chemflux
