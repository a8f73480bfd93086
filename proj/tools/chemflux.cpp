#include "chemflux/calculus.hpp"
#include "chemflux/diagnostics.hpp"
#include "chemflux/fluid.hpp"
#include "chemflux/runner.hpp"
#include "chemflux/solvers.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int exit_code_for(const chemflux::RunSummary& sum) {
    return sum.violations.empty() ? 0 : 2;
}

int do_run(const std::string& config_path, const std::string& out_dir, bool serial, bool quiet) {
    (void)serial; // the build is serial reference mode; the flag is accepted for symmetry
    chemflux::SimulationConfig cfg = chemflux::load_config(config_path);
    chemflux::RunSinks sinks;
    sinks.out_dir = out_dir;
    sinks.quiet = quiet;
    std::ofstream csv;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        csv.open(out_dir + "/diagnostics.csv");
        if (!csv) throw std::runtime_error("cannot open " + out_dir + "/diagnostics.csv");
        sinks.csv = &csv;
    }
    chemflux::RunSummary sum = chemflux::run_simulation(cfg, sinks);
    return exit_code_for(sum);
}

int do_resume(const std::string& checkpoint_path, const std::string& out_dir, bool quiet,
              long extra_steps) {
    chemflux::CheckpointData data = chemflux::checkpoint_read(checkpoint_path);
    chemflux::SimulationConfig cfg = data.config;
    if (extra_steps > 0) cfg.max_steps = extra_steps;
    chemflux::RunSinks sinks;
    sinks.out_dir = out_dir;
    sinks.quiet = quiet;
    std::ofstream csv;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        csv.open(out_dir + "/diagnostics.csv");
        if (!csv) throw std::runtime_error("cannot open " + out_dir + "/diagnostics.csv");
        csv << chemflux::csv_header() << '\n';
        sinks.csv = &csv;
    }
    chemflux::RunSummary sum = chemflux::run_simulation_from(cfg, std::move(data.state), sinks,
                                                             false, &data.baselines);
    return exit_code_for(sum);
}

int do_threshold(double p, double h, double s0) {
    const chemflux::ThresholdParams th =
        chemflux::smallness_threshold(p, h, chemflux::EnvelopeFn::constant(s0));
    std::printf("delta0 = %.12g\n", th.delta0);
    std::printf("binding constraint: %s\n",
                th.binding_constraint == 1 ? "3 p (p-1) d^2 S0(d)^2 <= h (h+1)"
                                           : "3 p d S0(d) <= h+1");
    return 0;
}

int do_lemma44(double eta, double alpha, double beta, double gamma, double delta,
               const std::vector<double>& ts) {
    chemflux::IntegralBoundParams p;
    p.eta = eta;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.delta = delta;
    if (!ts.empty()) p.t_samples = ts;
    const chemflux::IntegralBoundReport rep = chemflux::check_integral_lemma(p);
    std::printf("bound %s\n", rep.holds ? "holds" : "does NOT hold");
    std::printf("fitted C = %.12g, worst tail ratio = %.6g, spearman = %.4f\n", rep.fitted_C,
                rep.worst_ratio, rep.spearman);
    for (std::size_t i = 0; i < rep.ratios.size(); ++i)
        std::printf("  t sample %zu: ratio %.12g\n", i, rep.ratios[i]);
    return rep.holds ? 0 : 2;
}

int do_eig(const std::string& grid_spec, const std::string& extent_spec, unsigned long seed) {
    auto parse_list = [](const std::string& s) {
        std::vector<double> out;
        std::string token;
        std::istringstream is(s);
        while (std::getline(is, token, 'x')) out.push_back(std::stod(token));
        return out;
    };
    const std::vector<double> cells_d = parse_list(grid_spec);
    std::vector<int> cells(cells_d.size());
    for (std::size_t i = 0; i < cells_d.size(); ++i) cells[i] = static_cast<int>(cells_d[i]);
    std::vector<double> extents =
        extent_spec.empty() ? std::vector<double>(cells.size(), 1.0) : parse_list(extent_spec);
    const chemflux::GridSpec grid =
        chemflux::make_grid(static_cast<int>(cells.size()), extents, cells);

    const chemflux::SpectralInfo info = chemflux::neumann_lambda1(grid);
    std::printf("lambda1 (Neumann Laplacian): continuum %.12g, discrete %.12g\n",
                info.lambda1_continuum, info.lambda1_discrete);
    chemflux::TransportScheme scheme;
    const double l1s = chemflux::estimate_lambda1_stokes(grid, scheme, seed);
    std::printf("lambda1' (Stokes, free-decay estimate): %.12g\n", l1s);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chemflux: chemotaxis-(Navier-)Stokes box simulator and diagnostics"};
    app.set_help_flag("--help", "print help"); // frees -h/--h for the threshold exponent
    app.require_subcommand(1);

    std::string config_path, out_dir, checkpoint_path;
    bool serial = false, quiet = false;
    long extra_steps = 0;

    auto* run = app.add_subcommand("run", "run a simulation from a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (CSV, snapshots, checkpoint)");
    run->add_flag("--serial", serial, "serial reference mode (the default build is serial)");
    run->add_flag("--quiet", quiet, "suppress the run summary");

    auto* resume = app.add_subcommand("resume", "continue from a checkpoint");
    resume->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();
    resume->add_option("--out", out_dir, "output directory");
    resume->add_option("--steps", extra_steps, "cap on additional steps");
    resume->add_flag("--quiet", quiet, "suppress the run summary");

    double p = 2.0, h = 1.0 / 96.0, s0 = 1.0;
    auto* threshold = app.add_subcommand("threshold", "smallness threshold delta0 for (p, h, s0)");
    threshold->set_help_flag("--help", "print help");
    threshold->add_option("--p", p, "exponent p > 1")->required();
    threshold->add_option("--h", h, "weight exponent, 0 < h < 1/48")->required();
    threshold->add_option("--s0", s0, "constant sensitivity envelope")->required();

    double eta = 0.1, alpha = 0.0, beta = 0.0, gamma = 2.0, delta = 1.0;
    std::vector<double> ts;
    auto* lemma44 = app.add_subcommand("lemma44", "singular convolution bound check");
    lemma44->add_option("--eta", eta)->required();
    lemma44->add_option("--alpha", alpha)->required();
    lemma44->add_option("--beta", beta)->required();
    lemma44->add_option("--gamma", gamma)->required();
    lemma44->add_option("--delta", delta)->required();
    lemma44->add_option("--t", ts, "t samples (default 1 2 4 8 16)");

    std::string grid_spec, extent_spec;
    unsigned long seed = 12345;
    auto* eig = app.add_subcommand("eig", "domain eigenvalue constants");
    eig->add_option("--grid", grid_spec, "cells, e.g. 64x64 or 24x24x24")->required();
    eig->add_option("--extent", extent_spec, "extents, e.g. 1x1 (default unit box)");
    eig->add_option("--seed", seed, "seed for the free-decay start");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(config_path, out_dir, serial, quiet);
        if (resume->parsed()) return do_resume(checkpoint_path, out_dir, quiet, extra_steps);
        if (threshold->parsed()) return do_threshold(p, h, s0);
        if (lemma44->parsed()) return do_lemma44(eta, alpha, beta, gamma, delta, ts);
        if (eig->parsed()) return do_eig(grid_spec, extent_spec, seed);
    } catch (const chemflux::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
