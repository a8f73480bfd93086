#pragma once

#include "chemflux/config.hpp"
#include "chemflux/diagnostics.hpp"
#include "chemflux/state.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chemflux {

struct Violation {
    double t;
    std::string what;
};

struct RunSummary {
    long steps = 0;
    double wall_seconds = 0.0;
    DiagnosticsRecord final_record;
    std::optional<RateFit> rate_linf_c;     // vs target 0.9·min{n̄₀, λ₁}
    std::optional<RateFit> rate_linf_n_dev; // vs the same target
    std::optional<RateFit> rate_l2_u;       // vs 0.9·min{n-rate, λ₁′}
    double target_rate = 0.0;               // min{n̄₀, λ₁}
    double lambda1_stokes = 0.0;
    bool stokes_estimated = false;
    SmallnessReport smallness;
    std::vector<Violation> violations;
    std::vector<DiagnosticsRecord> records;
};

struct RunSinks {
    std::ostream* csv = nullptr;
    std::string out_dir; // snapshots and checkpoints land here when non-empty
    bool quiet = true;
};

/// Invariant baselines that must survive a checkpoint-resume boundary.
struct RunBaselines {
    double mass0 = 0.0;
    double linf_c0 = 0.0;
    double prev_lyapunov = 0.0; // NaN disables the first monotonicity comparison
};

/// Presets: n₀ uniform or a floored gaussian bump normalized to mean n̄₀; c₀
/// uniform (optionally cosine-perturbed) sized against δ₀ or absolute; u₀
/// zero or a boundary-flat stream-function vortex. u₀ is projected
/// divergence-free.
SimulationState make_initial_data(const SimulationConfig& cfg);

RunSummary run_simulation(const SimulationConfig& cfg, const RunSinks& sinks);

/// Continue from an existing state (checkpoint resume). `record_initial`
/// controls whether the entry state is emitted as a CSV row (a fresh run
/// records its initial state; a resumed run already did).
RunSummary run_simulation_from(const SimulationConfig& cfg, SimulationState state,
                               const RunSinks& sinks, bool record_initial,
                               const RunBaselines* baselines = nullptr);

/// Self-contained checkpoint: embedded config text, step/t, the invariant
/// baselines, and every field; read(write(state)) is bit-exact.
void checkpoint_write(const SimulationState& state, const SimulationConfig& cfg,
                      const RunBaselines& baselines, const std::string& path);
struct CheckpointData {
    SimulationConfig config;
    SimulationState state;
    RunBaselines baselines;
};
CheckpointData checkpoint_read(const std::string& path);

} // namespace chemflux
