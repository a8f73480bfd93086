#include "chemflux/sensitivity.hpp"

#include "chemflux/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chemflux {

EnvelopeFn EnvelopeFn::constant(double s0) {
    if (!(s0 >= 0.0)) throw std::invalid_argument("envelope must be non-negative");
    EnvelopeFn e;
    e.form = Form::Constant;
    e.a = s0;
    return e;
}

EnvelopeFn EnvelopeFn::affine(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("affine envelope needs a >= 0 and b >= 0");
    EnvelopeFn e;
    e.form = Form::Affine;
    e.a = a;
    e.b = b;
    return e;
}

SensitivityModel SensitivityModel::scalar(double chi) {
    SensitivityModel m;
    m.kind = Kind::Scalar;
    m.chi = chi;
    m.envelope = EnvelopeFn::constant(std::abs(chi));
    return m;
}

SensitivityModel SensitivityModel::rotational(double s0, double theta) {
    if (!(s0 >= 0.0)) throw std::invalid_argument("rotational scale s0 must be >= 0");
    SensitivityModel m;
    m.kind = Kind::Rotational;
    m.s0 = s0;
    m.theta = theta;
    m.envelope = EnvelopeFn::constant(s0);
    return m;
}

SensitivityModel SensitivityModel::modulated(const SensitivityModel& base) {
    if (base.kind == Kind::Modulated)
        throw std::invalid_argument("modulated model cannot wrap another modulated model");
    SensitivityModel m = base;
    m.kind = Kind::Modulated;
    m.modulated_base_rotational = base.kind == Kind::Rotational;
    return m;
}

namespace {

SensMatrix zero_matrix() {
    SensMatrix M{};
    for (auto& row : M) row.fill(0.0);
    return M;
}

SensMatrix base_matrix(const SensitivityModel& m, int dim, bool rotational) {
    SensMatrix M = zero_matrix();
    if (!rotational) {
        for (int i = 0; i < dim; ++i) M[i][i] = m.chi;
        return M;
    }
    const double ct = std::cos(m.theta), st = std::sin(m.theta);
    if (dim == 2) {
        M[0][0] = m.s0 * ct;
        M[0][1] = -m.s0 * st;
        M[1][0] = m.s0 * st;
        M[1][1] = m.s0 * ct;
    } else {
        // rotation about the vertical (last) axis
        M[0][0] = m.s0 * ct;
        M[0][1] = -m.s0 * st;
        M[1][0] = m.s0 * st;
        M[1][1] = m.s0 * ct;
        M[2][2] = m.s0;
    }
    return M;
}

} // namespace

SensMatrix eval_S(const SensitivityModel& model, const GridSpec& grid,
                  const std::array<double, 3>& x, double n, double c) {
    if (n < 0.0 || c < 0.0)
        throw std::invalid_argument("eval_S requires n >= 0 and c >= 0");
    switch (model.kind) {
        case SensitivityModel::Kind::Scalar:
            return base_matrix(model, grid.dim, false);
        case SensitivityModel::Kind::Rotational:
            return base_matrix(model, grid.dim, true);
        case SensitivityModel::Kind::Modulated: {
            SensMatrix M = base_matrix(model, grid.dim, model.modulated_base_rotational);
            const double pi = std::acos(-1.0);
            const double mod = 0.5 * (1.0 + std::cos(2.0 * pi * x[0] / grid.extent[0]));
            for (int i = 0; i < grid.dim; ++i)
                for (int j = 0; j < grid.dim; ++j) M[i][j] *= mod;
            return M;
        }
    }
    return zero_matrix();
}

double eval_rho(const RegularizerParams& params, const GridSpec& grid,
                const std::array<double, 3>& x) {
    if (!params.enabled) return 1.0;
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < grid.dim; ++a)
        d = std::min(d, std::min(x[a], grid.extent[a] - x[a]));
    d = std::max(d, 0.0);
    const double s = d / params.epsilon;
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return 3.0 * s * s - 2.0 * s * s * s;
}

SensMatrix eval_S_eps(const SensitivityModel& model, const RegularizerParams& params,
                      const GridSpec& grid, const std::array<double, 3>& x, double n, double c) {
    SensMatrix M = eval_S(model, grid, x, n, c);
    const double rho = eval_rho(params, grid, x);
    if (rho != 1.0)
        for (int i = 0; i < grid.dim; ++i)
            for (int j = 0; j < grid.dim; ++j) M[i][j] *= rho;
    return M;
}

ThresholdParams smallness_threshold(double p, double h, const EnvelopeFn& envelope) {
    if (!(p > 1.0))
        throw std::invalid_argument("smallness_threshold requires p > 1, got " + std::to_string(p));
    if (!(h > 0.0 && h < 1.0 / 48.0))
        throw std::invalid_argument("smallness_threshold requires 0 < h < 1/48, got " +
                                    std::to_string(h));

    const auto ok = [&](double d) {
        const double s = envelope(d);
        return 3.0 * p * (p - 1.0) * d * d * s * s <= h * (h + 1.0) &&
               3.0 * p * d * s <= h + 1.0;
    };

    double lo = 0.0;
    double hi;
    if (envelope(0.0) > 0.0) {
        hi = (h + 1.0) / (3.0 * p * envelope(0.0)) + 1.0;
    } else {
        hi = 1.0;
        int doublings = 0;
        while (ok(hi)) {
            hi *= 2.0;
            if (++doublings > 80)
                throw std::invalid_argument(
                    "smallness_threshold: envelope vanishes; threshold is unbounded");
        }
    }
    if (ok(hi)) {
        // the analytic bracket should always fail; widen defensively
        while (ok(hi)) hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid))
            lo = mid;
        else
            hi = mid;
    }

    ThresholdParams th;
    th.p = p;
    th.h = h;
    th.delta0 = lo;
    th.envelope = envelope;
    // binding = the constraint with the smaller normalized slack at delta0
    const double s = envelope(lo);
    const double r1 = h * (h + 1.0) - 3.0 * p * (p - 1.0) * lo * lo * s * s;
    const double r2 = (h + 1.0) - 3.0 * p * lo * s;
    th.binding_constraint = (r1 / (h * (h + 1.0)) <= r2 / (h + 1.0)) ? 1 : 2;
    return th;
}

SmallnessReport check_smallness(const ScalarField& c0, const ThresholdParams& th) {
    if (field_min(c0) < 0.0)
        throw std::invalid_argument("check_smallness: c0 has negative values");
    SmallnessReport rep;
    rep.linf_c0 = lp_norm(c0, std::numeric_limits<double>::infinity());
    rep.margin = th.delta0 - rep.linf_c0;
    rep.admissible = rep.linf_c0 < th.delta0;
    return rep;
}

} // namespace chemflux
