#include "chemflux/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace chemflux {

namespace {

struct KeyValueTable {
    std::map<std::string, std::string> kv;
    std::set<std::string> consumed;

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    std::string get_string(const std::string& k, const std::string& dflt) {
        consumed.insert(k);
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
    std::string require_string(const std::string& k) {
        consumed.insert(k);
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument("config: missing required key '" + k + "'");
        return it->second;
    }
    double get_double(const std::string& k, double dflt) {
        consumed.insert(k);
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        return parse_double(k, it->second);
    }
    long get_long(const std::string& k, long dflt) {
        consumed.insert(k);
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        return parse_long(k, it->second);
    }
    bool get_bool(const std::string& k, bool dflt) {
        consumed.insert(k);
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::invalid_argument("config: key '" + k + "' expects true/false, got '" +
                                    it->second + "'");
    }
    std::vector<double> require_doubles(const std::string& k) {
        const std::string s = require_string(k);
        std::istringstream ss(s);
        std::vector<double> out;
        double v;
        while (ss >> v) out.push_back(v);
        if (out.empty() || !ss.eof())
            throw std::invalid_argument("config: key '" + k + "' expects numbers, got '" + s + "'");
        return out;
    }
    std::vector<int> require_ints(const std::string& k) {
        const std::string s = require_string(k);
        std::istringstream ss(s);
        std::vector<int> out;
        int v;
        while (ss >> v) out.push_back(v);
        if (out.empty() || !ss.eof())
            throw std::invalid_argument("config: key '" + k + "' expects integers, got '" + s +
                                        "'");
        return out;
    }

    static double parse_double(const std::string& k, const std::string& s) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + k + "' expects a number, got '" + s +
                                        "'");
        }
        if (pos != s.size())
            throw std::invalid_argument("config: key '" + k + "' expects a number, got '" + s +
                                        "'");
        return v;
    }
    static long parse_long(const std::string& k, const std::string& s) {
        std::size_t pos = 0;
        long v;
        try {
            v = std::stol(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + k + "' expects an integer, got '" + s +
                                        "'");
        }
        if (pos != s.size())
            throw std::invalid_argument("config: key '" + k + "' expects an integer, got '" + s +
                                        "'");
        return v;
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

KeyValueTable tokenize(const std::string& text) {
    KeyValueTable t;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key or value");
        if (t.kv.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        t.kv[key] = val;
    }
    return t;
}

} // namespace

SimulationConfig parse_config_text(const std::string& text) {
    KeyValueTable t = tokenize(text);
    SimulationConfig cfg;
    cfg.raw_text = text;

    const int dim = static_cast<int>(t.get_long("grid.dim", 0));
    const auto extents = t.require_doubles("grid.extent");
    const auto cells = t.require_ints("grid.cells");
    cfg.grid = make_grid(dim, extents, cells);

    // sensitivity
    const std::string kind = t.get_string("sensitivity.kind", "scalar");
    const double chi = t.get_double("sensitivity.chi", 1.0);
    const double s0 = t.get_double("sensitivity.s0", 1.0);
    const double theta = t.get_double("sensitivity.theta", 0.0);
    if (kind == "scalar") {
        cfg.model = SensitivityModel::scalar(chi);
    } else if (kind == "rotational") {
        cfg.model = SensitivityModel::rotational(s0, theta);
    } else if (kind == "modulated") {
        cfg.model = SensitivityModel::modulated(SensitivityModel::rotational(s0, theta));
    } else {
        throw std::invalid_argument(
            "config: sensitivity.kind must be scalar, rotational or modulated, got '" + kind +
            "'");
    }

    cfg.reg.enabled = t.get_bool("regularizer.enabled", true);
    cfg.reg.epsilon = t.get_double("regularizer.epsilon", 0.0625);
    double min_extent = cfg.grid.extent[0];
    for (int a = 1; a < cfg.grid.dim; ++a) min_extent = std::min(min_extent, cfg.grid.extent[a]);
    if (cfg.reg.enabled && !(cfg.reg.epsilon > 0.0 && cfg.reg.epsilon < 0.5 * min_extent))
        throw std::invalid_argument(
            "config: regularizer.epsilon must lie in (0, min extent / 2)");

    cfg.threshold_p = t.get_double("threshold.p", 2.0);
    cfg.threshold_h = t.get_double("threshold.h", 1.0 / 96.0);
    if (!(cfg.threshold_p > 1.0))
        throw std::invalid_argument("config: threshold.p must be > 1");
    if (!(cfg.threshold_h > 0.0 && cfg.threshold_h < 1.0 / 48.0))
        throw std::invalid_argument("config: threshold.h must lie in (0, 1/48)");

    cfg.scheme.cfl = t.get_double("scheme.cfl", 0.4);
    cfg.scheme.dt_max = t.get_double("scheme.dt_max", 0.05);
    cfg.scheme.solver_tol = t.get_double("scheme.solver_tol", 1e-12);
    cfg.scheme.solver_maxiter = static_cast<int>(t.get_long("scheme.solver_maxiter", 20000));
    cfg.scheme.implicit_diffusion = t.get_bool("scheme.implicit_diffusion", true);
    if (!(cfg.scheme.cfl > 0.0 && cfg.scheme.cfl <= 1.0))
        throw std::invalid_argument("config: scheme.cfl must lie in (0, 1]");
    if (!(cfg.scheme.dt_max > 0.0))
        throw std::invalid_argument("config: scheme.dt_max must be positive");
    if (!(cfg.scheme.solver_tol > 0.0) || cfg.scheme.solver_maxiter < 1)
        throw std::invalid_argument("config: bad solver tolerance or iteration budget");

    cfg.fluid.kappa = static_cast<int>(t.get_long("fluid.kappa", 0));
    if (cfg.fluid.kappa != 0 && cfg.fluid.kappa != 1)
        throw std::invalid_argument("config: fluid.kappa must be 0 or 1");
    if (cfg.fluid.kappa == 1 && cfg.grid.dim == 3)
        throw std::invalid_argument(
            "config: kappa = 1 (Navier-Stokes advection) is only supported for dim = 2; "
            "3D runs use the Stokes flow, kappa = 0");
    const std::string phi = t.get_string("fluid.phi", "zero");
    if (phi == "zero") cfg.fluid.phi = PotentialKind::Zero;
    else if (phi == "vertical") cfg.fluid.phi = PotentialKind::Vertical;
    else throw std::invalid_argument("config: fluid.phi must be 'zero' or 'vertical'");
    cfg.fluid.gravity = t.get_double("fluid.gravity", 1.0);
    cfg.fluid_enabled = t.get_bool("fluid.enabled", true);

    // initial data
    const std::string ninit = t.get_string("init.n", "gaussian");
    if (ninit == "uniform") cfg.n_init = SimulationConfig::NInit::Uniform;
    else if (ninit == "gaussian") cfg.n_init = SimulationConfig::NInit::Gaussian;
    else throw std::invalid_argument("config: init.n must be 'uniform' or 'gaussian'");
    cfg.n_mean = t.get_double("init.n_mean", 1.0);
    cfg.n_background = t.get_double("init.n_background", 0.5);
    cfg.n_width = t.get_double("init.n_width", 0.15);
    if (cfg.n_mean < 0.0 || cfg.n_background < 0.0 || !(cfg.n_width > 0.0))
        throw std::invalid_argument("config: initial cell density must be non-negative "
                                    "(init.n_mean, init.n_background >= 0, init.n_width > 0)");

    const std::string cunits = t.get_string("init.c0_units", "delta0");
    if (cunits == "delta0") cfg.c0_units = SimulationConfig::CUnits::Delta0;
    else if (cunits == "absolute") cfg.c0_units = SimulationConfig::CUnits::Absolute;
    else throw std::invalid_argument("config: init.c0_units must be 'delta0' or 'absolute'");
    cfg.c0_value = t.get_double("init.c0", 0.5);
    cfg.c0_perturb = t.get_double("init.c0_perturb", 0.0);
    if (cfg.c0_value < 0.0 || std::abs(cfg.c0_perturb) > 1.0)
        throw std::invalid_argument("config: initial chemical must be non-negative "
                                    "(init.c0 >= 0 and |init.c0_perturb| <= 1)");

    const std::string uinit = t.get_string("init.u", "zero");
    if (uinit == "zero") cfg.u_init = SimulationConfig::UInit::Zero;
    else if (uinit == "vortex") cfg.u_init = SimulationConfig::UInit::Vortex;
    else throw std::invalid_argument("config: init.u must be 'zero' or 'vortex'");
    cfg.u_amplitude = t.get_double("init.u_amplitude", 0.1);

    cfg.t_end = t.get_double("run.t_end", 10.0);
    cfg.max_steps = t.get_long("run.max_steps", 0);
    cfg.record_every = static_cast<int>(t.get_long("run.record_every", 1));
    cfg.snapshot_every = static_cast<int>(t.get_long("run.snapshot_every", 0));
    cfg.seed = static_cast<unsigned long>(t.get_long("run.seed", 12345));
    cfg.enforce_smallness = t.get_bool("run.enforce_smallness", true);
    const std::string onviol = t.get_string("run.on_violation", "abort");
    if (onviol == "abort") cfg.abort_on_violation = true;
    else if (onviol == "record") cfg.abort_on_violation = false;
    else throw std::invalid_argument("config: run.on_violation must be 'abort' or 'record'");
    cfg.estimate_stokes = t.get_bool("run.estimate_stokes", false);
    if (!(cfg.t_end > 0.0) || cfg.record_every < 1 || cfg.max_steps < 0 || cfg.snapshot_every < 0)
        throw std::invalid_argument("config: bad run horizon or cadence");

    cfg.w1q_q = t.get_double("diagnostics.w1q_q", 4.0);
    cfg.c_floor = t.get_double("diagnostics.c_floor", 1e-8);
    if (!(cfg.w1q_q > 1.0) || !(cfg.c_floor > 0.0))
        throw std::invalid_argument("config: diagnostics.w1q_q must be > 1 and c_floor > 0");

    // the smallness condition on ‖c0‖_∞ against the weighted-functional threshold
    if (cfg.enforce_smallness) {
        const ThresholdParams th =
            smallness_threshold(cfg.threshold_p, cfg.threshold_h, cfg.model.envelope);
        const double c0max = (cfg.c0_units == SimulationConfig::CUnits::Delta0
                                  ? cfg.c0_value * th.delta0
                                  : cfg.c0_value) *
                             (1.0 + std::abs(cfg.c0_perturb));
        if (!(c0max < th.delta0)) {
            std::ostringstream msg;
            msg << "config: initial chemical max " << c0max
                << " exceeds the smallness threshold delta0 = " << th.delta0
                << " required for the weighted-functional regime "
                   "(set run.enforce_smallness = false to probe beyond it)";
            throw std::invalid_argument(msg.str());
        }
    }

    for (const auto& [k, v] : t.kv)
        if (!t.consumed.count(k))
            throw std::invalid_argument("config: unknown key '" + k + "'");
    return cfg;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace chemflux
