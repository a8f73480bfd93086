#include "chemflux/runner.hpp"

#include "chemflux/calculus.hpp"
#include "chemflux/fluid.hpp"
#include "chemflux/snapshot.hpp"
#include "chemflux/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chemflux {

namespace {

ScalarField make_n0(const SimulationConfig& cfg) {
    const GridSpec& g = cfg.grid;
    ScalarField n(g, 0.0);
    if (cfg.n_mean == 0.0) return n;
    if (cfg.n_init == SimulationConfig::NInit::Uniform) {
        for (double& x : n.v) x = cfg.n_mean;
        return n;
    }
    double min_extent = g.extent[0];
    for (int a = 1; a < g.dim; ++a) min_extent = std::min(min_extent, g.extent[a]);
    const double sigma = cfg.n_width * min_extent;
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                double r2 = 0.0;
                const double dx = g.center(0, i) - 0.5 * g.extent[0];
                const double dy = g.center(1, j) - 0.5 * g.extent[1];
                r2 = dx * dx + dy * dy;
                if (g.dim == 3) {
                    const double dz = g.center(2, k) - 0.5 * g.extent[2];
                    r2 += dz * dz;
                }
                n(i, j, k) = cfg.n_background + std::exp(-r2 / (2.0 * sigma * sigma));
            }
    const double scale = cfg.n_mean / field_mean(n);
    for (double& x : n.v) x *= scale;
    return n;
}

ScalarField make_c0(const SimulationConfig& cfg) {
    const GridSpec& g = cfg.grid;
    double base = cfg.c0_value;
    if (cfg.c0_units == SimulationConfig::CUnits::Delta0) {
        const ThresholdParams th =
            smallness_threshold(cfg.threshold_p, cfg.threshold_h, cfg.model.envelope);
        base *= th.delta0;
    }
    ScalarField c(g, base);
    if (cfg.c0_perturb != 0.0) {
        const double pi = std::acos(-1.0);
        const int nx = g.nx(), ny = g.ny(), nz = g.nz();
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k)
                    c(i, j, k) =
                        base * (1.0 + cfg.c0_perturb * std::cos(pi * g.center(0, i) / g.extent[0]));
    }
    return c;
}

VectorField make_u0(const SimulationConfig& cfg) {
    if (cfg.u_init == SimulationConfig::UInit::Zero) return VectorField(cfg.grid, 0.0);
    return stream_vortex(cfg.grid, cfg.u_amplitude);
}

void project_velocity(VectorField& u, const TransportScheme& scheme) {
    ScalarField rhs = divergence(u);
    PressureField P = pressure_poisson(rhs, scheme);
    const VectorField grad = face_gradient(P.field);
    for (int a = 0; a < u.grid.dim; ++a)
        for (std::size_t i = 0; i < u.comp[a].size(); ++i) u.comp[a][i] -= grad.comp[a][i];
    u.zero_boundary_faces();
}

std::string hexdouble(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void write_state_snapshots(const SimulationState& s, const std::string& dir, long step) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%08ld", step);
    const GridSpec& g = s.n.grid;
    write_snapshot_file(dir + "/n_" + tag + ".snap", g, "cell", s.n.v);
    write_snapshot_file(dir + "/c_" + tag + ".snap", g, "cell", s.c.v);
    write_snapshot_file(dir + "/P_" + tag + ".snap", g, "cell", s.P.v);
    for (int a = 0; a < g.dim; ++a)
        write_snapshot_file(dir + "/u" + std::string(1, char('x' + a)) + "_" + tag + ".snap", g,
                            kind_for_axis(a), s.u.comp[a]);
}

} // namespace

SimulationState make_initial_data(const SimulationConfig& cfg) {
    SimulationState s;
    s.n = make_n0(cfg);
    s.c = make_c0(cfg);
    s.u = make_u0(cfg);
    s.P = ScalarField(cfg.grid, 0.0);
    project_velocity(s.u, cfg.scheme);
    s.t = 0.0;
    s.step = 0;
    s.n_mean0 = field_mean(s.n);
    s.spectral = neumann_lambda1(cfg.grid);
    return s;
}

void checkpoint_write(const SimulationState& state, const SimulationConfig& cfg,
                      const RunBaselines& baselines, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open checkpoint " + path + " for writing");
    os << "CFCHK1 " << state.step << ' ' << hexdouble(state.t) << ' '
       << hexdouble(state.n_mean0) << ' ' << hexdouble(baselines.mass0) << ' '
       << hexdouble(baselines.linf_c0) << ' ' << hexdouble(baselines.prev_lyapunov) << '\n';
    os << cfg.raw_text.size() << '\n';
    os.write(cfg.raw_text.data(), static_cast<std::streamsize>(cfg.raw_text.size()));
    const GridSpec& g = state.n.grid;
    write_snapshot(os, g, "cell", state.n.v);
    write_snapshot(os, g, "cell", state.c.v);
    write_snapshot(os, g, "cell", state.P.v);
    for (int a = 0; a < g.dim; ++a) write_snapshot(os, g, kind_for_axis(a), state.u.comp[a]);
    if (!os) throw std::runtime_error("checkpoint write failed for " + path);
}

CheckpointData checkpoint_read(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("checkpoint: missing header");
    std::istringstream hs(line);
    std::string magic;
    hs >> magic;
    if (magic != "CFCHK1")
        throw std::runtime_error("checkpoint: bad magic '" + magic + "' (expected CFCHK1)");
    CheckpointData data;
    std::string t_hex, nmean_hex, mass_hex, linfc_hex, lyap_hex;
    if (!(hs >> data.state.step >> t_hex >> nmean_hex >> mass_hex >> linfc_hex >> lyap_hex))
        throw std::runtime_error("checkpoint: malformed header");
    data.state.t = std::strtod(t_hex.c_str(), nullptr);
    data.state.n_mean0 = std::strtod(nmean_hex.c_str(), nullptr);
    data.baselines.mass0 = std::strtod(mass_hex.c_str(), nullptr);
    data.baselines.linf_c0 = std::strtod(linfc_hex.c_str(), nullptr);
    data.baselines.prev_lyapunov = std::strtod(lyap_hex.c_str(), nullptr);

    if (!std::getline(is, line)) throw std::runtime_error("checkpoint: missing config size");
    const std::size_t cfg_size = std::stoul(line);
    std::string cfg_text(cfg_size, '\0');
    is.read(cfg_text.data(), static_cast<std::streamsize>(cfg_size));
    if (static_cast<std::size_t>(is.gcount()) != cfg_size)
        throw std::runtime_error("checkpoint: truncated config block");
    data.config = parse_config_text(cfg_text);

    Snapshot n = read_snapshot(is);
    Snapshot c = read_snapshot(is);
    Snapshot P = read_snapshot(is);
    if (n.kind != "cell" || c.kind != "cell" || P.kind != "cell")
        throw std::runtime_error("checkpoint: unexpected snapshot kinds");
    const GridSpec g = n.grid;
    if (!(g == data.config.grid))
        throw std::runtime_error("checkpoint: grid does not match the embedded config");
    data.state.n = ScalarField(g);
    data.state.n.v = std::move(n.payload);
    data.state.c = ScalarField(g);
    data.state.c.v = std::move(c.payload);
    data.state.P = ScalarField(g);
    data.state.P.v = std::move(P.payload);
    data.state.u = VectorField(g, 0.0);
    for (int a = 0; a < g.dim; ++a) {
        Snapshot ua = read_snapshot(is);
        if (ua.kind != kind_for_axis(a))
            throw std::runtime_error("checkpoint: velocity snapshot out of order");
        data.state.u.comp[a] = std::move(ua.payload);
    }
    data.state.spectral = neumann_lambda1(g);
    return data;
}

RunSummary run_simulation(const SimulationConfig& cfg, const RunSinks& sinks) {
    return run_simulation_from(cfg, make_initial_data(cfg), sinks, true, nullptr);
}

RunSummary run_simulation_from(const SimulationConfig& cfg, SimulationState state,
                               const RunSinks& sinks, bool record_initial,
                               const RunBaselines* baselines) {
    const auto wall_start = std::chrono::steady_clock::now();
    const ThresholdParams th =
        smallness_threshold(cfg.threshold_p, cfg.threshold_h, cfg.model.envelope);
    DiagnosticsParams diag;
    diag.w1q_exponent = cfg.w1q_q;
    diag.c_floor = cfg.c_floor;
    diag.classical_enabled = cfg.model.kind == SensitivityModel::Kind::Scalar;

    RunSummary sum;
    sum.smallness = check_smallness(state.c, th);
    sum.target_rate = std::min(state.n_mean0, state.spectral.lambda1_continuum);

    if (!sinks.out_dir.empty()) std::filesystem::create_directories(sinks.out_dir);

    RunBaselines base;
    double prev_lyap = std::numeric_limits<double>::quiet_NaN();

    if (sinks.csv && record_initial) *sinks.csv << csv_header() << '\n';

    auto check_record = [&](const DiagnosticsRecord& rec, double dt_used) {
        auto flag = [&](const std::string& what) { sum.violations.push_back({rec.t, what}); };
        if (rec.min_n < 0.0) flag("min n negative: " + std::to_string(rec.min_n));
        if (rec.min_c < 0.0) flag("min c negative: " + std::to_string(rec.min_c));
        if (rec.linf_c > base.linf_c0 + 1e-12)
            flag("max principle violated: linf_c " + std::to_string(rec.linf_c) + " > initial " +
                 std::to_string(base.linf_c0));
        if (base.mass0 > 0.0 && std::abs(rec.mass_n - base.mass0) > 1e-10 * base.mass0)
            flag("mass drift: " + std::to_string(rec.mass_n - base.mass0));
        if (dt_used > 0.0 && rec.div_u_inf > 10.0 * cfg.scheme.solver_tol / dt_used)
            flag("divergence residual too large: " + std::to_string(rec.div_u_inf));
        if (cfg.enforce_smallness) {
            if (std::isnan(rec.lyapunov_weighted)) {
                flag("weighted functional undefined (max c reached delta0)");
            } else if (!std::isnan(prev_lyap) &&
                       rec.lyapunov_weighted > prev_lyap * (1.0 + 1e-8)) {
                flag("weighted functional increased: " + std::to_string(prev_lyap) + " -> " +
                     std::to_string(rec.lyapunov_weighted));
            }
        }
        prev_lyap = rec.lyapunov_weighted;
    };

    auto emit = [&](const DiagnosticsRecord& rec) {
        sum.records.push_back(rec);
        if (sinks.csv) *sinks.csv << csv_row(rec) << '\n';
    };

    // initial record and invariant baselines
    {
        DiagnosticsRecord rec0 = record_step(state, th, diag);
        if (baselines) {
            base = *baselines;
            prev_lyap = baselines->prev_lyapunov;
        } else {
            base.mass0 = rec0.mass_n;
            base.linf_c0 = rec0.linf_c;
            base.prev_lyapunov = rec0.lyapunov_weighted;
        }
        if (record_initial) {
            check_record(rec0, 0.0);
            emit(rec0);
            if (!sinks.out_dir.empty() && cfg.snapshot_every > 0)
                write_state_snapshots(state, sinks.out_dir, state.step);
        }
        prev_lyap = record_initial ? rec0.lyapunov_weighted : base.prev_lyapunov;
    }

    bool aborted = false;
    long steps_taken = 0;
    long records_emitted = 0;
    try {
        while (state.t < cfg.t_end * (1.0 - 1e-12) &&
               (cfg.max_steps == 0 || steps_taken < cfg.max_steps)) {
            double dt = stable_dt(state, cfg.model, cfg.reg, cfg.scheme);
            dt = std::min(dt, cfg.t_end - state.t);

            VectorField u_new = state.u;
            ScalarField P_new = state.P;
            if (cfg.fluid_enabled) {
                auto [u2, P2] = advance_u(state, dt, cfg.fluid, cfg.scheme);
                u_new = std::move(u2);
                P_new = std::move(P2.field);
            }
            ScalarField c_new = advance_c(state, dt, cfg.scheme);
            ScalarField n_new = advance_n(state, dt, cfg.model, cfg.reg, cfg.scheme);

            state.u = std::move(u_new);
            state.P = std::move(P_new);
            state.c = std::move(c_new);
            state.n = std::move(n_new);
            state.t += dt;
            ++state.step;
            ++steps_taken;

            if (steps_taken % cfg.record_every == 0) {
                DiagnosticsRecord rec = record_step(state, th, diag);
                check_record(rec, dt);
                emit(rec);
                ++records_emitted;
                if (!sinks.out_dir.empty() && cfg.snapshot_every > 0 &&
                    records_emitted % cfg.snapshot_every == 0)
                    write_state_snapshots(state, sinks.out_dir, state.step);
                if (cfg.abort_on_violation && !sum.violations.empty()) {
                    aborted = true;
                    break;
                }
            }
        }
    } catch (const SolverFailure&) {
        if (!sinks.out_dir.empty()) {
            RunBaselines bl = base;
            bl.prev_lyapunov = prev_lyap;
            checkpoint_write(state, cfg, bl, sinks.out_dir + "/failure.chk");
        }
        throw;
    }

    sum.steps = steps_taken;
    if (!sum.records.empty()) sum.final_record = sum.records.back();

    // tail-window decay-rate fits: last half of the horizon, after ‖c‖∞ has
    // dropped below a tenth of its initial value
    if (sum.records.size() >= 10 && !aborted) {
        const double t_final = sum.records.back().t;
        double t_star = 0.0;
        if (base.linf_c0 > 0.0) {
            t_star = t_final; // never dropped => empty window, fits skipped
            for (const auto& r : sum.records)
                if (r.linf_c < 0.1 * base.linf_c0) {
                    t_star = r.t;
                    break;
                }
        }
        const double w1 = std::max(t_star, sum.records.front().t +
                                               0.5 * (t_final - sum.records.front().t));
        const double w2 = t_final;
        auto fit_series = [&](auto getter) -> std::optional<RateFit> {
            std::vector<std::pair<double, double>> series;
            series.reserve(sum.records.size());
            for (const auto& r : sum.records) series.emplace_back(r.t, getter(r));
            try {
                return fit_decay_rate(series, w1, w2);
            } catch (const std::exception&) {
                return std::nullopt;
            }
        };
        sum.rate_linf_c = fit_series([](const DiagnosticsRecord& r) { return r.linf_c; });
        sum.rate_linf_n_dev = fit_series([](const DiagnosticsRecord& r) { return r.linf_n_dev; });
        sum.rate_l2_u =
            fit_series([](const DiagnosticsRecord& r) { return std::sqrt(2.0 * r.kinetic_energy); });
    }

    if (cfg.estimate_stokes) {
        sum.lambda1_stokes = estimate_lambda1_stokes(cfg.grid, cfg.scheme, cfg.seed);
        sum.stokes_estimated = true;
    }

    if (!sinks.out_dir.empty()) {
        RunBaselines bl = base;
        bl.prev_lyapunov = prev_lyap;
        checkpoint_write(state, cfg, bl, sinks.out_dir + "/final.chk");
    }

    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    if (!sinks.quiet) {
        std::ostream& os = std::cout;
        os << "steps: " << sum.steps << "  t: " << state.t << "  wall: " << sum.wall_seconds
           << " s\n";
        os << "smallness: " << (sum.smallness.admissible ? "admissible" : "NOT admissible")
           << " (margin " << sum.smallness.margin << ")\n";
        auto show = [&](const char* name, const std::optional<RateFit>& f) {
            if (f)
                os << name << " rate: " << f->rate << " (r2 " << f->r_squared << ", window ["
                   << f->t1 << ", " << f->t2 << "])\n";
            else
                os << name << " rate: not fitted\n";
        };
        show("linf_c", sum.rate_linf_c);
        show("linf_n_dev", sum.rate_linf_n_dev);
        show("l2_u", sum.rate_l2_u);
        os << "target min{n_mean0, lambda1}: " << sum.target_rate << "\n";
        if (sum.stokes_estimated) os << "lambda1_stokes estimate: " << sum.lambda1_stokes << "\n";
        if (!sum.violations.empty()) {
            os << sum.violations.size() << " invariant violation(s):\n";
            for (const auto& v : sum.violations)
                os << "  t=" << v.t << ": " << v.what << "\n";
        }
    }
    return sum;
}

} // namespace chemflux
