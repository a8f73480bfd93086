#include "chemflux/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chemflux {

double lp_norm(const ScalarField& f, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : f.v) m = std::max(m, std::abs(x));
        return m;
    }
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm requires p >= 1 or p = inf, got " + std::to_string(p));
    const double vol = f.grid.cell_volume();
    double s = 0.0;
    if (p == 1.0) {
        for (double x : f.v) s += std::abs(x);
        return s * vol;
    }
    if (p == 2.0) {
        for (double x : f.v) s += x * x;
        return std::sqrt(s * vol);
    }
    for (double x : f.v) s += std::pow(std::abs(x), p);
    return std::pow(s * vol, 1.0 / p);
}

VectorField face_gradient(const ScalarField& f) {
    const GridSpec& g = f.grid;
    VectorField grad(g, 0.0);
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    // x faces: interior fa in [1, nx-1], between cells fa-1 and fa
    for (int fa = 1; fa < nx; ++fa)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                grad.at(0, fa, j, k) = (f(fa, j, k) - f(fa - 1, j, k)) / g.spacing[0];
    for (int i = 0; i < nx; ++i)
        for (int fb = 1; fb < ny; ++fb)
            for (int k = 0; k < nz; ++k)
                grad.at(1, i, fb, k) = (f(i, fb, k) - f(i, fb - 1, k)) / g.spacing[1];
    if (g.dim == 3)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                for (int fc = 1; fc < nz; ++fc)
                    grad.at(2, i, j, fc) = (f(i, j, fc) - f(i, j, fc - 1)) / g.spacing[2];
    return grad;
}

ScalarField divergence(const VectorField& F) {
    const GridSpec& g = F.grid;
    ScalarField div(g, 0.0);
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                double s = (F.at(0, i + 1, j, k) - F.at(0, i, j, k)) / g.spacing[0] +
                           (F.at(1, i, j + 1, k) - F.at(1, i, j, k)) / g.spacing[1];
                if (g.dim == 3)
                    s += (F.at(2, i, j, k + 1) - F.at(2, i, j, k)) / g.spacing[2];
                div(i, j, k) = s;
            }
    return div;
}

ScalarField cell_gradient_magnitude(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const VectorField grad = face_gradient(f);
    ScalarField mag(g, 0.0);
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                const double gx = 0.5 * (grad.at(0, i, j, k) + grad.at(0, i + 1, j, k));
                const double gy = 0.5 * (grad.at(1, i, j, k) + grad.at(1, i, j + 1, k));
                double s = gx * gx + gy * gy;
                if (g.dim == 3) {
                    const double gz = 0.5 * (grad.at(2, i, j, k) + grad.at(2, i, j, k + 1));
                    s += gz * gz;
                }
                mag(i, j, k) = std::sqrt(s);
            }
    return mag;
}

double w1q_norm(const ScalarField& c, double q) {
    if (!(q > 1.0))
        throw std::invalid_argument("w1q_norm requires q > 1, got " + std::to_string(q));
    const double vol = c.grid.cell_volume();
    const ScalarField mag = cell_gradient_magnitude(c);
    double s = 0.0;
    for (std::size_t i = 0; i < c.v.size(); ++i)
        s += (std::pow(std::abs(c.v[i]), q) + std::pow(mag.v[i], q)) * vol;
    return std::pow(s, 1.0 / q);
}

SpectralInfo neumann_lambda1(const GridSpec& g) {
    SpectralInfo info;
    // slowest mode lives along the longest axis
    int slow = 0;
    for (int a = 1; a < g.dim; ++a)
        if (g.extent[a] > g.extent[slow]) slow = a;
    const double L = g.extent[slow];
    const double h = g.spacing[slow];
    const double pi = std::acos(-1.0);
    info.lambda1_continuum = (pi / L) * (pi / L);
    info.lambda1_discrete = 2.0 / (h * h) * (1.0 - std::cos(pi * h / L));
    return info;
}

void apply_neumann_laplacian(const ScalarField& f, ScalarField& out) {
    const GridSpec& g = f.grid;
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    const double ihx2 = 1.0 / (g.spacing[0] * g.spacing[0]);
    const double ihy2 = 1.0 / (g.spacing[1] * g.spacing[1]);
    const double ihz2 = g.dim == 3 ? 1.0 / (g.spacing[2] * g.spacing[2]) : 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                const double fc = f(i, j, k);
                double s = 0.0;
                // zero-flux: a missing neighbor contributes nothing
                s += ihx2 * ((i + 1 < nx ? f(i + 1, j, k) - fc : 0.0) -
                             (i > 0 ? fc - f(i - 1, j, k) : 0.0));
                s += ihy2 * ((j + 1 < ny ? f(i, j + 1, k) - fc : 0.0) -
                             (j > 0 ? fc - f(i, j - 1, k) : 0.0));
                if (g.dim == 3)
                    s += ihz2 * ((k + 1 < nz ? f(i, j, k + 1) - fc : 0.0) -
                                 (k > 0 ? fc - f(i, j, k - 1) : 0.0));
                out(i, j, k) = s;
            }
}

double field_min(const ScalarField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : f.v) m = std::min(m, x);
    return m;
}

double field_max(const ScalarField& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : f.v) m = std::max(m, x);
    return m;
}

double field_mean(const ScalarField& f) {
    double s = 0.0;
    for (double x : f.v) s += x;
    return s / static_cast<double>(f.v.size());
}

double max_face_magnitude(const VectorField& F) {
    double m = 0.0;
    for (int a = 0; a < F.grid.dim; ++a)
        for (double x : F.comp[a]) m = std::max(m, std::abs(x));
    return m;
}

double kinetic_energy(const VectorField& u) {
    const GridSpec& g = u.grid;
    const double vol = g.cell_volume();
    double e = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const int n0 = u.comp_dim(a, 0), n1 = u.comp_dim(a, 1), n2 = u.comp_dim(a, 2);
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k) {
                    const bool bnd = (a == 0 && (i == 0 || i == n0 - 1)) ||
                                     (a == 1 && (j == 0 || j == n1 - 1)) ||
                                     (a == 2 && (k == 0 || k == n2 - 1));
                    const double w = bnd ? 0.5 : 1.0;
                    const double x = u.at(a, i, j, k);
                    e += w * x * x;
                }
    }
    return 0.5 * e * vol;
}

double l2_norm(const VectorField& u) { return std::sqrt(2.0 * kinetic_energy(u)); }

} // namespace chemflux
