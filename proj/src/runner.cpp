#include "jch/runner.hpp"

#include "jch/perturbation.hpp"
#include "jch/protocols.hpp"
#include "jch/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace jch::runner {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw ConfigError("config: '" + key + "' expects a finite number, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
    return out;
}

const std::vector<std::string>& param_keys() {
    static const std::vector<std::string> keys = {"omega_a", "omega_c", "g",       "J",       "gamma",
                                                  "kappa",   "Omega",   "alpha",   "omega_l", "omega_p",
                                                  "n_fock",  "n_cavities", "delta", "delta_a", "delta_c"};
    return keys;
}

enum class Kind { number, integer, boolean, list, text };

// Experiment-specific keys and their value kinds.
const std::map<std::string, std::map<std::string, Kind>>& setting_kinds() {
    static const std::map<std::string, std::map<std::string, Kind>> kinds = {
        {"spectrum", {{"points", Kind::integer}}},
        {"two_cavity_spectrum", {{"points", Kind::integer}, {"J_values", Kind::list}}},
        {"driven_oscillation", {{"t_max", Kind::number}, {"dt", Kind::number}}},
        {"rwa_probe", {{"window", Kind::number}, {"dt", Kind::number}}},
        {"ramp",
         {{"m", Kind::list},
          {"points", Kind::integer},
          {"delta_start", Kind::number},
          {"delta_end", Kind::number},
          {"samples", Kind::integer},
          {"strict", Kind::boolean}}},
        {"table1", {}},
        {"variance_compare",
         {{"J_values", Kind::list}, {"delta_values", Kind::list}, {"form", Kind::text}, {"samples", Kind::integer}}},
        {"perturbation_report", {{"epsilon", Kind::list}, {"third_manifold", Kind::boolean}}},
    };
    return kinds;
}

double setting(const ExperimentConfig& c, const std::string& key, double fallback) {
    const auto it = c.settings.find(key);
    return it == c.settings.end() ? fallback : parse_double(key, it->second);
}

int setting_int(const ExperimentConfig& c, const std::string& key, int fallback) {
    const auto it = c.settings.find(key);
    return it == c.settings.end() ? fallback : parse_int(key, it->second);
}

bool setting_bool(const ExperimentConfig& c, const std::string& key, bool fallback) {
    const auto it = c.settings.find(key);
    return it == c.settings.end() ? fallback : parse_bool(key, it->second);
}

std::vector<double> setting_list(const ExperimentConfig& c, const std::string& key, std::vector<double> fallback) {
    const auto it = c.settings.find(key);
    return it == c.settings.end() ? fallback : parse_list(key, it->second);
}

void apply_params(SystemParams& p, const std::map<std::string, std::string>& raw) {
    auto num = [&](const std::string& k) { return parse_double(k, raw.at(k)); };
    const std::map<std::string, double SystemParams::*> direct = {
        {"omega_a", &SystemParams::omega_a}, {"omega_c", &SystemParams::omega_c}, {"g", &SystemParams::g},
        {"J", &SystemParams::J},             {"gamma", &SystemParams::gamma},     {"kappa", &SystemParams::kappa},
        {"Omega", &SystemParams::Omega},     {"alpha", &SystemParams::alpha},     {"omega_l", &SystemParams::omega_l},
        {"omega_p", &SystemParams::omega_p}};
    for (const auto& [k, member] : direct) {
        if (raw.count(k)) p.*member = num(k);
    }
    if (raw.count("n_fock")) p.n_fock = parse_int("n_fock", raw.at("n_fock"));
    if (raw.count("n_cavities")) p.n_cavities = parse_int("n_cavities", raw.at("n_cavities"));
    if (raw.count("delta")) p.set_detuning(num("delta"));
    if (raw.count("delta_a") || raw.count("delta_c")) {
        const double da = raw.count("delta_a") ? num("delta_a") : p.delta_a();
        const double dc = raw.count("delta_c") ? num("delta_c") : p.delta_c();
        p.set_drive_detunings(da, dc);
    }
}

json params_json(const SystemParams& p) {
    return json{{"omega_a", p.omega_a}, {"omega_c", p.omega_c}, {"g", p.g},           {"J", p.J},
                {"gamma", p.gamma},     {"kappa", p.kappa},     {"Omega", p.Omega},   {"alpha", p.alpha},
                {"omega_l", p.omega_l}, {"omega_p", p.omega_p}, {"n_fock", p.n_fock}, {"n_cavities", p.n_cavities}};
}

json peak_json(const Peak& p) { return json{{"position", p.position}, {"height", p.height}, {"fwhm", p.fwhm}}; }

json peaks_json(const PeakReport& r) {
    json j;
    j["peaks"] = json::array();
    for (const auto& p : r.peaks) j["peaks"].push_back(peak_json(p));
    if (r.asymmetry) {
        j["a"] = peak_json(*r.a);
        j["b"] = peak_json(*r.b);
        j["asymmetry"] = *r.asymmetry;
    }
    return j;
}

// ------------------------------------------------------------ experiments

RunResult run_spectrum(const ExperimentConfig& c) {
    const auto grid = default_frequency_grid(c.params, setting_int(c, "points", 2001));
    const Spectrum num = system_absorption_spectrum(c.params, grid);
    const Spectrum ana = absorption_spectrum_analytic(c.params, grid);
    RunResult r;
    Table t{"spectrum", {"omega", "S_numeric", "S_analytic"}, {}};
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        t.rows.push_back({grid[i], num.values[i], ana.values[i]});
        err = std::max(err, std::abs(num.values[i] - ana.values[i]));
        scale = std::max(scale, std::abs(ana.values[i]));
    }
    r.tables.push_back(std::move(t));
    r.summary["numeric"] = peaks_json(find_peaks(num));
    r.summary["analytic"] = peaks_json(find_peaks(ana));
    r.summary["relative_linf_error"] = err / scale;
    r.summary["grid_step"] = grid[1] - grid[0];
    return r;
}

RunResult run_two_cavity_spectrum(const ExperimentConfig& c) {
    const auto js = setting_list(c, "J_values", {1.0, 10.0});
    RunResult r;
    Table t{"spectrum", {"omega"}, {}};
    std::vector<Spectrum> spectra;
    std::vector<double> grid;
    {
        SystemParams widest = c.params;
        widest.J = *std::max_element(js.begin(), js.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        grid = default_frequency_grid(widest, setting_int(c, "points", 2001));
    }
    r.summary["runs"] = json::array();
    for (double j : js) {
        SystemParams p = c.params;
        p.J = j;
        spectra.push_back(system_absorption_spectrum(p, grid));
        t.columns.push_back("S_J=" + format_number(j));
        r.summary["runs"].push_back(json{{"J", j}, {"peaks", peaks_json(find_peaks(spectra.back()))}});
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<json> row{grid[i]};
        for (const auto& s : spectra) row.push_back(s.values[i]);
        t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
    return r;
}

RunResult run_driven(const ExperimentConfig& c) {
    const DrivenRun run = driven_oscillation_run(c.params, setting(c, "t_max", 4.0), setting(c, "dt", 0.002));
    RunResult r;
    Table t{"trajectory", {"t", "P_1plus", "P_1minus", "P_ground", "coherence"}, {}};
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        t.rows.push_back({run.times[i], run.p_1plus[i], run.p_1minus[i], run.p_ground[i], run.coherence[i]});
    }
    r.tables.push_back(std::move(t));
    r.summary["period"] = run.estimate.period;
    r.summary["max_times"] = run.estimate.max_times;
    r.summary["max_values"] = run.estimate.max_values;
    r.summary["analytic_period"] = run.analytic.period;
    r.summary["analytic_omega_r"] = run.analytic.omega_r;
    r.summary["coherence_max"] = *std::max_element(run.coherence.begin(), run.coherence.end());
    r.summary["p_1plus_max"] = *std::max_element(run.p_1plus.begin(), run.p_1plus.end());
    return r;
}

RunResult run_rwa_probe(const ExperimentConfig& c) {
    std::vector<std::string> probes = c.probes;
    if (probes.empty()) probes = {"1-,0 -> 0,1+", "2-,0 -> 1-,1+"};
    const double window = setting(c, "window", 10.0), dt = setting(c, "dt", 0.005);
    RunResult r;
    Table t{"probes", {"initial", "target", "max_probability", "t_at_max", "window"}, {}};
    r.summary["probes"] = json::array();
    for (const auto& probe : probes) {
        const auto arrow = probe.find("->");
        const std::string from = trim(probe.substr(0, arrow)), to = trim(probe.substr(arrow + 2));
        const ProbeResult p = hopping_interchange_probe(c.params, from, to, window, dt);
        t.rows.push_back({from, to, p.max_probability, p.t_at_max, p.window});
        r.summary["probes"].push_back(json{{"initial", from}, {"target", to}, {"max_probability", p.max_probability}});
    }
    r.tables.push_back(std::move(t));
    return r;
}

RunResult run_ramp(const ExperimentConfig& c, const RunOptions& o) {
    RampOptions ro;
    ro.threads = o.threads;
    ro.samples = setting_int(c, "samples", 401);
    ro.strict = o.strict_ramp || setting_bool(c, "strict", false);
    const int points = setting_int(c, "points", 40);
    const double d0 = setting(c, "delta_start", 60.0), d1 = setting(c, "delta_end", 0.1);
    std::vector<int> modes;
    for (double m : setting_list(c, "m", {1.0})) {
        if (m != std::floor(m)) throw ConfigError("config: 'm' expects integers");
        modes.push_back(static_cast<int>(m));
    }
    RunResult r;
    Table t{"ramp", {"series", "m", "index", "delta", "pulses", "var_tau", "lp_weight", "up_weight"}, {}};
    std::vector<std::string> state_names;
    auto add = [&](const std::string& series, int m, const std::vector<OrderParameterPoint>& pts) {
        if (state_names.empty()) {
            for (const auto& [name, v] : pts.front().max_probability) {
                (void)v;
                state_names.push_back(name);
                t.columns.push_back("max_P[" + name + "]");
                t.columns.push_back("mean_P[" + name + "]");
            }
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            std::vector<json> row{series, m, i, p.delta, p.pulses, p.var_tau, p.lp_weight, p.up_weight};
            for (const auto& name : state_names) {
                row.push_back(p.max_probability.at(name));
                row.push_back(p.mean_probability.at(name));
            }
            t.rows.push_back(std::move(row));
        }
    };
    const RampSchedule base = make_ramp_schedule(modes.front(), c.params.J, c.params.g, points, d0, d1);
    const auto lp = ramp_reference(base, c.params, Branch::minus, ro);
    const auto up = ramp_reference(base, c.params, Branch::plus, ro);
    add("reference_lp", 0, lp);
    add("reference_up", 0, up);
    r.summary["modes"] = json::array();
    for (int m : modes) {
        const RampSchedule s = make_ramp_schedule(m, c.params.J, c.params.g, points, d0, d1);
        const auto pts = ramp_experiment(s, c.params, "1-,1-", true, ro);
        add("time_dependent", m, pts);
        int near = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto close = [&](double ref) { return std::abs(pts[i].var_tau - ref) <= 0.1 * std::abs(ref); };
            if (close(lp[i].var_tau) || close(up[i].var_tau)) ++near;
        }
        r.summary["modes"].push_back(json{{"m", m}, {"points_on_reference", near}, {"points", pts.size()}});
    }
    r.summary["strict"] = ro.strict;
    r.tables.push_back(std::move(t));
    return r;
}

RunResult run_table1(const RunOptions& o) {
    RunResult r;
    Table t{"mechanisms",
            {"mechanism", "control", "initial", "C_max", "P_interchange", "C_expected", "P_expected"},
            {}};
    r.summary["rows"] = json::array();
    for (const auto& row : mechanism_table(o.threads)) {
        t.rows.push_back({row.mechanism, row.control, row.initial, row.coherence_max, row.interchange,
                          row.coherence_expected, row.interchange_expected});
        r.summary["rows"].push_back(json{{"mechanism", row.mechanism},
                                         {"C_max", row.coherence_max},
                                         {"P_interchange", row.interchange},
                                         {"within_0.1", std::abs(row.coherence_max - row.coherence_expected) <= 0.1 &&
                                                            std::abs(row.interchange - row.interchange_expected) <= 0.1}});
    }
    r.tables.push_back(std::move(t));
    return r;
}

RunResult run_variance_compare(const ExperimentConfig& c, const RunOptions& o) {
    const auto js = setting_list(c, "J_values", {0.02, 0.05, 0.1});
    const auto ds = setting_list(c, "delta_values", {0.0, 1.0, 5.0});
    const int samples = setting_int(c, "samples", 401);
    const std::string form_name = c.settings.count("form") ? c.settings.at("form") : "energy_consistent";
    DiagonalForm form = DiagonalForm::energy_consistent;
    if (form_name == "printed") form = DiagonalForm::printed;
    else if (form_name != "energy_consistent") throw ConfigError("config: 'form' must be energy_consistent or printed");

    struct Job {
        double j, d;
        Branch b;
        double numeric{0.0}, energy{0.0}, printed{0.0};
    };
    std::vector<Job> jobs;
    for (double j : js)
        for (double d : ds)
            for (Branch b : {Branch::minus, Branch::plus}) jobs.push_back({j, d, b});
    parallel_for(jobs.size(), o.threads, [&](std::size_t k) {
        Job& job = jobs[k];
        SystemParams p = c.params;
        p.J = job.j;
        p.set_detuning(job.d);
        job.numeric = branch_order_parameter(p, job.b, samples).var_tau;
        job.energy = analytic_variance(effective_model(p, job.b, DiagonalForm::energy_consistent), job.j);
        job.printed = analytic_variance(effective_model(p, job.b, DiagonalForm::printed), job.j);
    });
    RunResult r;
    Table t{"variance", {"J", "delta", "branch", "var_numeric", "var_energy_consistent", "var_printed", "error"}, {}};
    double worst = 0.0;
    bool all_ok = true;
    for (const auto& job : jobs) {
        const double sel = form == DiagonalForm::printed ? job.printed : job.energy;
        const double abs_err = std::abs(sel - job.numeric);
        const double rel = job.numeric != 0.0 ? abs_err / std::abs(job.numeric) : abs_err;
        const bool ok = job.numeric < 0.1 ? abs_err <= 0.005 || rel <= 0.05 : rel <= 0.05;
        all_ok = all_ok && ok;
        worst = std::max(worst, rel);
        t.rows.push_back({job.j, job.d, job.b == Branch::minus ? "LP" : "UP", job.numeric, job.energy, job.printed, rel});
    }
    r.tables.push_back(std::move(t));
    r.summary["form"] = form_name;
    r.summary["max_relative_error"] = worst;
    r.summary["all_within_tolerance"] = all_ok;
    return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunResult run_perturbation(const ExperimentConfig& c) {
    const auto eps = setting_list(c, "epsilon", {0.04, 0.02, 0.01});
    CorrectionOptions opts;
    opts.include_third_manifold = setting_bool(c, "third_manifold", false);
    RunResult r;
    Table t{"perturbation", {"epsilon", "label", "e0", "e2", "e_exact", "residual", "overlap"}, {}};
    std::map<std::string, std::vector<double>> residuals;
    for (double e : eps) {
        SystemParams p = c.params;
        p.Omega = e;
        p.alpha = e;
        for (const auto& entry : perturbation_report(p, opts).entries) {
            t.rows.push_back({e, entry.label.name(), entry.e0, entry.e2, entry.e_exact, entry.residual, entry.overlap});
            residuals[entry.label.name()].push_back(entry.residual);
        }
    }
    r.tables.push_back(std::move(t));
    for (const auto& [label, res] : residuals) {
        json j{{"residuals", res}, {"max_residual", *std::max_element(res.begin(), res.end())}};
        if (eps.size() >= 2) j["loglog_slope"] = loglog_slope(eps, res);
        r.summary["labels"][label] = j;
    }
    r.summary["epsilon"] = eps;
    r.summary["formulas"] = expanded_formula_table();
    return r;
}

}  // namespace

// ------------------------------------------------------------ registry

const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> list = {
        {"spectrum", "system_absorption_spectrum + absorption_spectrum_analytic",
         "single-cavity absorption spectrum, numeric and analytic, with peak summary"},
        {"two_cavity_spectrum", "system_absorption_spectrum", "two-cavity spectrum for each J in J_values"},
        {"driven_oscillation", "driven_oscillation_run", "driven single site from |1->, P_1+(t) and extracted period"},
        {"rwa_probe", "hopping_interchange_probe", "maximal interchange probabilities under photon hopping"},
        {"ramp", "ramp_experiment + ramp_reference", "stroboscopic detuning ramp and var(tau) reference curves"},
        {"table1", "mechanism_table", "coherence and interchange for the four control mechanisms"},
        {"variance_compare", "branch_order_parameter + analytic_variance",
         "numeric var(tau) against the effective two-level model"},
        {"perturbation_report", "perturbation_report", "weak-drive series against exact diagonalization"},
    };
    return list;
}

bool is_experiment(const std::string& name) {
    const auto& l = experiments();
    return std::any_of(l.begin(), l.end(), [&](const ExperimentInfo& e) { return e.name == name; });
}

SystemParams experiment_defaults(const std::string& experiment) {
    SystemParams p;
    if (experiment == "spectrum") {
        p.gamma = p.kappa = 0.5;
        p.n_fock = 3;
    } else if (experiment == "two_cavity_spectrum") {
        p.gamma = p.kappa = 0.5;
        p.n_cavities = 2;
        p.n_fock = 3;
        p.set_detuning(1.0);
    } else if (experiment == "driven_oscillation") {
        p = driven_defaults();
    } else if (experiment == "rwa_probe" || experiment == "ramp" || experiment == "variance_compare") {
        p.n_cavities = 2;
        p.n_fock = 3;
        p.J = 0.1;
    } else if (experiment == "perturbation_report") {
        p.n_fock = 5;
        p.Omega = p.alpha = 0.01;
        p.set_drive_detunings(0.3, 0.3);
    }
    return p;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    std::map<std::string, std::string> raw;
    std::vector<std::string> probes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + ": empty key or value");
        if (key == "probe") {
            if (value.find("->") == std::string::npos) throw ConfigError(where + ": probe expects 'initial -> target'");
            probes.push_back(value);
            continue;
        }
        if (!raw.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    if (!raw.count("experiment")) throw ConfigError(source + ": missing 'experiment'");
    ExperimentConfig c;
    c.experiment = raw.at("experiment");
    if (!is_experiment(c.experiment)) throw ConfigError(source + ": unknown experiment '" + c.experiment + "'");
    raw.erase("experiment");
    c.output = c.experiment;
    if (raw.count("output")) {
        c.output = raw.at("output");
        if (c.output.find('/') != std::string::npos) throw ConfigError(source + ": 'output' is a base name, not a path");
        raw.erase("output");
    }
    if (raw.count("format")) {
        c.format = raw.at("format");
        raw.erase("format");
    }
    if (c.format != "csv" && c.format != "json") throw ConfigError(source + ": format must be csv or json");
    if (!probes.empty() && c.experiment != "rwa_probe") throw ConfigError(source + ": 'probe' only applies to rwa_probe");
    c.probes = probes;

    const auto& kinds = setting_kinds().at(c.experiment);
    std::map<std::string, std::string> param_raw;
    for (const auto& [key, value] : raw) {
        const bool is_param = std::find(param_keys().begin(), param_keys().end(), key) != param_keys().end();
        if (is_param && c.experiment != "table1") {
            param_raw[key] = value;
            continue;
        }
        const auto k = kinds.find(key);
        if (k == kinds.end()) throw ConfigError(source + ": unknown key '" + key + "' for experiment " + c.experiment);
        switch (k->second) {
            case Kind::number: parse_double(key, value); break;
            case Kind::integer: parse_int(key, value); break;
            case Kind::boolean: parse_bool(key, value); break;
            case Kind::list: parse_list(key, value); break;
            case Kind::text: break;
        }
        c.settings[key] = value;
    }
    c.params = experiment_defaults(c.experiment);
    apply_params(c.params, param_raw);
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

RunResult execute(const ExperimentConfig& c, const RunOptions& o) {
    const std::string& e = c.experiment;
    if (e == "spectrum") return run_spectrum(c);
    if (e == "two_cavity_spectrum") return run_two_cavity_spectrum(c);
    if (e == "driven_oscillation") return run_driven(c);
    if (e == "rwa_probe") return run_rwa_probe(c);
    if (e == "ramp") return run_ramp(c, o);
    if (e == "table1") return run_table1(o);
    if (e == "variance_compare") return run_variance_compare(c, o);
    if (e == "perturbation_report") return run_perturbation(c);
    throw ConfigError("unknown experiment '" + e + "'");
}

// ------------------------------------------------------------ serialization

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v == 0.0 ? 0.0 : v);  // folds −0
    return buf;
}

std::vector<std::string> provenance(const ExperimentConfig& c) {
    std::vector<std::string> out = {"engine: " + std::string(engine_version), "experiment: " + c.experiment};
    const json p = params_json(c.params);
    for (const auto& [k, v] : p.items()) {
        out.push_back("param " + k + " = " + (v.is_number_integer() ? std::to_string(v.get<int>()) : format_number(v.get<double>())));
    }
    for (const auto& [k, v] : c.settings) out.push_back("setting " + k + " = " + v);
    for (const auto& probe : c.probes) out.push_back("setting probe = " + probe);
    return out;
}

std::string to_csv(const Table& t, const std::vector<std::string>& header) {
    std::ostringstream os;
    for (const auto& h : header) os << "# " << h << '\n';
    auto cell = [](const json& v) -> std::string {
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            return s.find_first_of(",\"") == std::string::npos ? s : "\"" + s + "\"";
        }
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return format_number(v.get<double>());
    };
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << cell(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
        os << '\n';
    }
    return os.str();
}

json to_json(const RunResult& result, const ExperimentConfig& c) {
    json j;
    j["engine"] = engine_version;
    j["experiment"] = c.experiment;
    j["params"] = params_json(c.params);
    j["settings"] = c.settings;
    if (!c.probes.empty()) j["settings"]["probe"] = c.probes;
    j["summary"] = result.summary;
    for (const auto& t : result.tables) j["tables"][t.name] = json{{"columns", t.columns}, {"rows", t.rows}};
    return j;
}

std::vector<std::filesystem::path> write_artifacts(const RunResult& result, const ExperimentConfig& c,
                                                   const RunOptions& o) {
    const std::string format = o.format.empty() ? c.format : o.format;
    std::filesystem::create_directories(o.output_dir);
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    if (format == "json") {
        files.emplace_back(o.output_dir / (c.output + ".json"), to_json(result, c).dump(2) + "\n");
    } else {
        const auto header = provenance(c);
        for (const auto& t : result.tables) {
            const std::string name = result.tables.size() == 1 ? c.output : c.output + "_" + t.name;
            files.emplace_back(o.output_dir / (name + ".csv"), to_csv(t, header));
        }
        json summary = to_json(RunResult{{}, result.summary}, c);
        summary.erase("tables");
        files.emplace_back(o.output_dir / (c.output + "_summary.json"), summary.dump(2) + "\n");
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [path, text] : files) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
        written.push_back(path);
    }
    return written;
}

int run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& err) {
    ExperimentConfig config;
    try {
        if (!options.format.empty() && options.format != "csv" && options.format != "json") {
            throw ConfigError("--format must be csv or json");
        }
        if (options.threads < 1) throw ConfigError("--threads must be >= 1");
        config = load_config(config_path);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }
    RunResult result;
    try {
        result = execute(config, options);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "numerical failure in " << config.experiment << ": " << e.what() << '\n';
        return exit_numerical;
    }
    try {
        for (const auto& p : write_artifacts(result, config, options)) err << "wrote " << p.string() << '\n';
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}

}  // namespace jch::runner
