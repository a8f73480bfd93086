#pragma once

#include "chemflux/fluid.hpp"
#include "chemflux/sensitivity.hpp"
#include "chemflux/transport.hpp"

#include <string>

namespace chemflux {

/// Fully validated run configuration. See README for the key reference; the
/// file format is flat `section.key = value` lines with `#` comments.
struct SimulationConfig {
    GridSpec grid;

    SensitivityModel model;
    RegularizerParams reg;
    double threshold_p = 2.0;
    double threshold_h = 1.0 / 96.0;

    TransportScheme scheme;
    FluidParams fluid;
    bool fluid_enabled = true;

    enum class NInit { Uniform, Gaussian };
    NInit n_init = NInit::Gaussian;
    double n_mean = 1.0;       // target n̄₀
    double n_background = 0.5; // pre-normalization floor of the gaussian preset
    double n_width = 0.15;     // gaussian sigma as a fraction of the shortest extent

    enum class CUnits { Delta0, Absolute };
    CUnits c0_units = CUnits::Delta0;
    double c0_value = 0.5;   // uniform level, in delta0 multiples or absolute
    double c0_perturb = 0.0; // relative cosine perturbation, |.| <= 1

    enum class UInit { Zero, Vortex };
    UInit u_init = UInit::Zero;
    double u_amplitude = 0.1;

    double t_end = 10.0;
    long max_steps = 0; // 0 = until t_end
    int record_every = 1;
    int snapshot_every = 0; // in units of records; 0 = off
    unsigned long seed = 12345;
    bool enforce_smallness = true;
    bool abort_on_violation = true;
    bool estimate_stokes = false;

    double w1q_q = 4.0;
    double c_floor = 1e-8;

    std::string raw_text; // original file contents, embedded in checkpoints
};

SimulationConfig parse_config_text(const std::string& text);
SimulationConfig load_config(const std::string& path);

} // namespace chemflux
