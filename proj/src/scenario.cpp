#include "spinbath/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "spinbath/thermal.hpp"

namespace spinbath {

namespace {

[[noreturn]] void config_error(std::string_view key, std::string_view what) {
    fail(ErrorKind::Config, fmt::format("{}: {}", key, what));
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view raw) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size() || !std::isfinite(value)) {
        config_error(key, fmt::format("not a number: '{}'", raw));
    }
    return value;
}

std::size_t parse_count(std::string_view key, std::string_view raw, std::size_t minimum) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) config_error(key, fmt::format("not an integer: '{}'", raw));
    if (value < static_cast<long long>(minimum)) config_error(key, fmt::format("must be >= {}", minimum));
    return static_cast<std::size_t>(value);
}

Vec3 parse_vec3(std::string_view key, std::string_view raw) {
    Vec3 v;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto comma = raw.find(',', start);
        if ((i < 2) != (comma != std::string_view::npos)) config_error(key, "expected three comma-separated numbers");
        const auto part = trim(raw.substr(start, comma == std::string_view::npos ? raw.npos : comma - start));
        v[i] = parse_number(key, part);
        start = comma + 1;
    }
    return v;
}

enum class Bound { Positive, NonNegative };

double bounded(std::string_view key, std::string_view raw, Bound bound) {
    const double v = parse_number(key, raw);
    if (bound == Bound::Positive && !(v > 0.0)) config_error(key, "must be > 0");
    if (bound == Bound::NonNegative && !(v >= 0.0)) config_error(key, "must be >= 0");
    return v;
}

// Model parameters that may also be given as top-level keys.
const std::map<std::string, Bound, std::less<>>& model_parameter_bounds() {
    static const std::map<std::string, Bound, std::less<>> bounds{
        {"alpha", Bound::NonNegative}, {"s", Bound::Positive},     {"omega_c", Bound::Positive},
        {"omega_r", Bound::NonNegative}, {"gamma0", Bound::Positive}, {"j0", Bound::NonNegative},
        {"lo", Bound::NonNegative},    {"hi", Bound::Positive},
    };
    return bounds;
}

void apply_model_parameter(SpectralModel& model, const std::string& key, double value) {
    bool applied = false;
    auto set = [&](double& field) {
        field = value;
        applied = true;
    };
    if (auto* o = std::get_if<Ohmic>(&model.kind)) {
        if (key == "alpha") set(o->alpha);
        if (key == "s") set(o->s);
        if (key == "omega_c") set(o->omega_c);
    } else if (auto* l = std::get_if<Lorentzian>(&model.kind)) {
        if (key == "alpha") set(l->alpha);
        if (key == "omega_r") set(l->omega_r);
        if (key == "gamma0") set(l->gamma0);
    } else if (auto* f = std::get_if<FlatWindow>(&model.kind)) {
        if (key == "j0") set(f->j0);
        if (key == "lo") set(f->lo);
        if (key == "hi") set(f->hi);
    }
    if (!applied) config_error(key, fmt::format("not a parameter of model '{}'", model.describe()));
}

std::string format_number(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string("null"); }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string sibling(const std::string& path, std::string_view tag) {
    const std::filesystem::path p(path);
    auto name = p.stem().string() + "_" + std::string(tag) + p.extension().string();
    return (p.parent_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) config_error("output", fmt::format("cannot open '{}' for writing", path));
    out << content;
    if (!out) config_error("output", fmt::format("failed writing '{}'", path));
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    static const std::map<std::string, Command, std::less<>> commands{
        {"susceptibility", Command::Susceptibility},
        {"kk-check", Command::KKCheck},
        {"rates", Command::Rates},
        {"volterra", Command::Volterra},
        {"oracle", Command::Oracle},
        {"thermal", Command::Thermal},
        {"bloch", Command::Bloch},
    };
    const auto it = commands.find(name);
    if (it == commands.end()) return std::nullopt;
    return it->second;
}

std::string_view command_name(Command command) {
    switch (command) {
        case Command::Susceptibility: return "susceptibility";
        case Command::KKCheck: return "kk-check";
        case Command::Rates: return "rates";
        case Command::Volterra: return "volterra";
        case Command::Oracle: return "oracle";
        case Command::Thermal: return "thermal";
        case Command::Bloch: return "bloch";
    }
    return "unknown";
}

ScenarioConfig parse_config(std::string_view text) {
    std::map<std::string, std::string, std::less<>> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        const auto key = eq == std::string_view::npos ? std::string_view{} : trim(view.substr(0, eq));
        if (key.empty()) config_error(fmt::format("line {}", line_no), "expected 'key = value'");
        const auto value = trim(view.substr(eq + 1));
        if (value.empty()) config_error(key, "missing value");
        if (!entries.emplace(std::string(key), std::string(value)).second) config_error(key, "given twice");
    }

    ScenarioConfig cfg;
    auto take = [&entries](std::string_view key) -> std::optional<std::string> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        std::string v = it->second;
        entries.erase(it);
        return v;
    };

    std::map<std::string, double> overrides;
    for (const auto& [key, bound] : model_parameter_bounds()) {
        if (auto raw = take(key)) overrides.emplace(key, bounded(key, *raw, bound));
    }

    auto positive = [&](std::string_view key, double& field) {
        if (auto raw = take(key)) field = bounded(key, *raw, Bound::Positive);
    };
    positive("omega0", cfg.omega0);
    positive("hbar", cfg.constants.hbar);
    positive("c", cfg.constants.c);
    positive("k_boltzmann", cfg.constants.k_boltzmann);
    if (auto raw = take("temperature")) cfg.temperature = bounded("temperature", *raw, Bound::NonNegative);
    positive("t_max", cfg.t_max);
    positive("dt", cfg.dt);
    positive("epsilon", cfg.epsilon);
    positive("abs_tol", cfg.quad.abs_tol);
    positive("rel_tol", cfg.quad.rel_tol);
    positive("upper_cutoff", cfg.quad.upper_cutoff);
    if (auto raw = take("max_subdivisions")) {
        cfg.quad.max_subdivisions = static_cast<int>(parse_count("max_subdivisions", *raw, 1));
    }
    if (auto raw = take("n_modes")) cfg.n_modes = parse_count("n_modes", *raw, 1);
    if (auto raw = take("stride")) cfg.stride = parse_count("stride", *raw, 1);
    if (auto raw = take("time_points")) cfg.time_points = parse_count("time_points", *raw, 2);
    positive("omega_min", cfg.frequency_grid.start);
    positive("omega_max", cfg.frequency_grid.stop);
    if (auto raw = take("omega_points")) cfg.frequency_grid.n_points = parse_count("omega_points", *raw, 2);
    positive("temperature_min", cfg.temperature_grid.start);
    positive("temperature_max", cfg.temperature_grid.stop);
    if (auto raw = take("temperature_points")) {
        cfg.temperature_grid.n_points = parse_count("temperature_points", *raw, 2);
    }

    if (auto raw = take("kernel")) {
        if (*raw == "auto") cfg.kernel = Tabulation::Auto;
        else if (*raw == "quadrature") cfg.kernel = Tabulation::Quadrature;
        else config_error("kernel", "must be 'auto' or 'quadrature'");
    }
    if (auto raw = take("kk_direction")) {
        if (*raw == "real") cfg.kk_direction = KKDirection::RealFromImag;
        else if (*raw == "imag") cfg.kk_direction = KKDirection::ImagFromReal;
        else config_error("kk_direction", "must be 'real' or 'imag'");
    }
    if (auto raw = take("thermal_sweep")) {
        if (*raw == "temperature") cfg.thermal_sweep = ThermalSweep::Temperature;
        else if (*raw == "time") cfg.thermal_sweep = ThermalSweep::Time;
        else config_error("thermal_sweep", "must be 'temperature' or 'time'");
    }
    if (auto raw = take("format")) {
        if (*raw == "csv") cfg.format = OutputFormat::Csv;
        else if (*raw == "json") cfg.format = OutputFormat::Json;
        else config_error("format", "must be 'csv' or 'json'");
    }
    if (auto raw = take("axis")) {
        cfg.axis = parse_vec3("axis", *raw);
        if (std::abs(cfg.axis.norm() - 1.0) > 1e-12) config_error("axis", "must be a unit vector");
    }
    if (auto raw = take("s0")) cfg.s0 = parse_vec3("s0", *raw);
    if (auto raw = take("output")) cfg.output = *raw;

    const auto model_text = take("model");
    if (!entries.empty()) config_error(entries.begin()->first, "unknown key");
    if (!model_text) config_error("model", "missing");

    cfg.model = parse_model(*model_text);
    for (const auto& [key, value] : overrides) apply_model_parameter(cfg.model, key, value);
    cfg.model.constants = cfg.constants;
    try {
        cfg.model.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Config, e.what());
    }

    if (cfg.dt > cfg.t_max) config_error("dt", "must be <= t_max");
    if (cfg.frequency_grid.stop <= cfg.frequency_grid.start) config_error("omega_max", "must be > omega_min");
    if (cfg.temperature_grid.stop <= cfg.temperature_grid.start) {
        config_error("temperature_max", "must be > temperature_min");
    }
    return cfg;
}

std::string RunSummary::to_json() const {
    std::string out = "{";
    out += fmt::format("\"command\":{},", json_string(command));
    out += fmt::format("\"wall_time\":{},", format_number(wall_time));
    out += "\"scalars\":{";
    bool first = true;
    for (const auto& [k, v] : scalars) {
        out += fmt::format("{}{}:{}", first ? "" : ",", json_string(k), format_number(v));
        first = false;
    }
    out += "},\"outputs\":[";
    for (std::size_t i = 0; i < outputs.size(); ++i) out += (i ? "," : "") + json_string(outputs[i]);
    out += "],\"warnings\":[";
    for (std::size_t i = 0; i < warnings.size(); ++i) out += (i ? "," : "") + json_string(warnings[i]);
    out += "]}";
    return out;
}

RunSummary RunSummary::from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    RunSummary s;
    s.command = j.at("command").get<std::string>();
    s.wall_time = j.at("wall_time").get<double>();
    s.scalars = j.at("scalars").get<std::map<std::string, double>>();
    s.outputs = j.at("outputs").get<std::vector<std::string>>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt::format("{:.17g}", row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table) {
    std::string out = "{\"columns\":[";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + json_string(table.columns[i]);
    out += "],\"rows\":[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += r ? ",[" : "[";
        for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
            out += (i ? "," : "") + format_number(table.rows[r][i]);
        }
        out += "]";
    }
    out += "]}";
    return out;
}

namespace {

struct Outcome {
    std::vector<std::pair<std::string, Table>> tables;  // tag -> table
    std::map<std::string, double> scalars;
    std::vector<std::string> warnings;
};

Outcome run_susceptibility(const ScenarioConfig& cfg) {
    Outcome o;
    const auto ts = cfg.time_grid().points();
    Table time{{"t", "chi"}, parallel_map(ts.size(), [&](std::size_t i) {
                   return std::vector<double>{ts[i], chi_time(cfg.model, ts[i], cfg.quad, cfg.kernel)};
               })};
    Table freq{{"omega", "re_chi", "im_chi", "epsilon"}, {}};
    const auto spectrum = chi_freq_table(cfg.model, cfg.frequency_grid, cfg.epsilon, cfg.quad);
    for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
        freq.rows.push_back({spectrum.omega[i], spectrum.values[i].real(), spectrum.values[i].imag(), cfg.epsilon});
    }
    const cplx at_resonance = chi_freq(cfg.model, cfg.omega0, cfg.epsilon, cfg.quad);
    o.scalars["epsilon"] = cfg.epsilon;
    o.scalars["re_chi_omega0"] = at_resonance.real();
    o.scalars["im_chi_omega0"] = at_resonance.imag();
    o.tables.emplace_back("time", std::move(time));
    o.tables.emplace_back("freq", std::move(freq));
    return o;
}

Outcome run_kk(const ScenarioConfig& cfg) {
    Outcome o;
    const auto report = kk_check(cfg.model, cfg.frequency_grid, cfg.epsilon, cfg.quad, cfg.kk_direction);
    Table t{{"omega", "direct", "reconstructed", "rel_error"}, {}};
    for (const auto& p : report.points) t.rows.push_back({p.omega, p.direct, p.reconstructed, p.relative_error});
    o.scalars["residual"] = report.residual;
    o.scalars["epsilon"] = cfg.epsilon;
    o.tables.emplace_back("kk", std::move(t));
    return o;
}

Outcome run_rates(const ScenarioConfig& cfg) {
    Outcome o;
    const auto rates = markov_rates(cfg.model, cfg.omega0, cfg.quad);
    o.scalars["beta"] = rates.beta;
    o.scalars["delta"] = rates.delta;
    o.tables.emplace_back("rates", Table{{"omega0", "beta", "delta"}, {{cfg.omega0, rates.beta, rates.delta}}});
    return o;
}

Outcome run_volterra(const ScenarioConfig& cfg) {
    Outcome o;
    const auto rates = markov_rates(cfg.model, cfg.omega0, cfg.quad);
    const auto traj = solve_amplitude(cfg.model, cfg.omega0, cfg.t_max, cfg.dt, cfg.quad, cfg.kernel);
    Table t{{"t", "re_c", "im_c", "abs_c", "markov_abs_c"}, {}};
    double deviation = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double markov = std::abs(markov_amplitude(rates, traj.t[i]));
        deviation = std::max(deviation, std::abs(std::abs(traj.c[i]) - markov));
        if (i % cfg.stride == 0 || i + 1 == traj.t.size()) {
            t.rows.push_back({traj.t[i], traj.c[i].real(), traj.c[i].imag(), std::abs(traj.c[i]), markov});
        }
    }
    o.scalars["beta"] = rates.beta;
    o.scalars["delta"] = rates.delta;
    o.scalars["final_abs_c"] = std::abs(traj.c.back());
    o.scalars["max_markov_deviation"] = deviation;
    o.tables.emplace_back("volterra", std::move(t));
    return o;
}

Outcome run_oracle(const ScenarioConfig& cfg) {
    Outcome o;
    const auto traj =
        solve_discrete_oracle(cfg.model, cfg.omega0, cfg.n_modes, cfg.t_max, cfg.dt, cfg.quad, cfg.stride);
    Table t{{"t", "abs_c", "norm_defect"}, {}};
    for (std::size_t i = 0; i < traj.t.size(); ++i) t.rows.push_back({traj.t[i], std::abs(traj.c[i]), traj.norm_defect[i]});
    o.scalars["final_abs_c"] = std::abs(traj.c.back());
    o.scalars["max_norm_defect"] = max_abs(traj.norm_defect);
    o.tables.emplace_back("oracle", std::move(t));
    return o;
}

Outcome run_thermal(const ScenarioConfig& cfg) {
    Outcome o;
    const ThermalState at_config{cfg.temperature, cfg.constants};
    o.scalars["rate_down"] = golden_rule_rate(cfg.model, cfg.omega0, at_config, Direction::Down);
    o.scalars["rate_up"] = golden_rule_rate(cfg.model, cfg.omega0, at_config, Direction::Up);
    if (cfg.thermal_sweep == ThermalSweep::Temperature) {
        const auto temps = cfg.temperature_grid.points();
        Table t{{"T", "rate_up", "rate_down", "ratio", "boltzmann_factor"}, parallel_map(temps.size(), [&](std::size_t i) {
                    const double T = temps[i];
                    const ThermalState state{T, cfg.constants};
                    const double up = golden_rule_rate(cfg.model, cfg.omega0, state, Direction::Up);
                    const double down = golden_rule_rate(cfg.model, cfg.omega0, state, Direction::Down);
                    const double boltzmann = std::exp(cfg.constants.hbar * cfg.omega0 / (cfg.constants.k_boltzmann * T));
                    return std::vector<double>{T, up, down, down / up, boltzmann};
                })};
        o.tables.emplace_back("thermal", std::move(t));
    } else {
        const auto times = cfg.time_grid().points();
        Table t{{"t", "p_up", "p_down"}, parallel_map(times.size(), [&](std::size_t i) {
                    const auto up = finite_time_probability(cfg.model, cfg.omega0, at_config, Direction::Up, times[i], cfg.quad);
                    const auto down =
                        finite_time_probability(cfg.model, cfg.omega0, at_config, Direction::Down, times[i], cfg.quad);
                    return std::vector<double>{times[i], up.probability, down.probability};
                })};
        bool breakdown = false;
        for (const auto& row : t.rows) breakdown = breakdown || row[1] > perturbation_limit || row[2] > perturbation_limit;
        o.scalars["final_p_up"] = t.rows.back()[1];
        o.scalars["final_p_down"] = t.rows.back()[2];
        if (breakdown) {
            o.warnings.push_back(fmt::format("PerturbationBreakdown: transition probability exceeds {}",
                                             perturbation_limit));
        }
        o.tables.emplace_back("thermal", std::move(t));
    }
    return o;
}

Outcome run_bloch(const ScenarioConfig& cfg) {
    Outcome o;
    const auto traj = simulate_bloch(cfg.model, cfg.omega0, cfg.axis, cfg.s0, cfg.t_max, cfg.dt, cfg.quad, cfg.kernel);
    Table t{{"t", "Sx", "Sy", "Sz", "norm_drift"}, {}};
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (i % cfg.stride != 0 && i + 1 != traj.t.size()) continue;
        const Vec3& S = traj.S[i];
        t.rows.push_back({traj.t[i], S.x(), S.y(), S.z(), traj.norm_drift[i]});
    }
    o.scalars["max_norm_drift"] = max_abs(traj.norm_drift);
    o.scalars["final_sx"] = traj.S.back().x();
    o.scalars["final_sy"] = traj.S.back().y();
    o.scalars["final_sz"] = traj.S.back().z();
    o.tables.emplace_back("bloch", std::move(t));
    return o;
}

}  // namespace

RunSummary run(Command command, const ScenarioConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    switch (command) {
        case Command::Susceptibility: outcome = run_susceptibility(config); break;
        case Command::KKCheck: outcome = run_kk(config); break;
        case Command::Rates: outcome = run_rates(config); break;
        case Command::Volterra: outcome = run_volterra(config); break;
        case Command::Oracle: outcome = run_oracle(config); break;
        case Command::Thermal: outcome = run_thermal(config); break;
        case Command::Bloch: outcome = run_bloch(config); break;
    }

    RunSummary summary;
    summary.command = std::string(command_name(command));
    const bool json = config.format == OutputFormat::Json;
    const std::string base =
        config.output.empty() ? summary.command + (json ? ".json" : ".csv") : config.output;
    if (json) {
        std::string body;
        if (outcome.tables.size() == 1) {
            body = to_json(outcome.tables.front().second);
        } else {
            body = "{";
            for (std::size_t i = 0; i < outcome.tables.size(); ++i) {
                body += fmt::format("{}{}:{}", i ? "," : "", json_string(outcome.tables[i].first),
                                    to_json(outcome.tables[i].second));
            }
            body += "}";
        }
        write_file(base, body + "\n");
        summary.outputs.push_back(base);
    } else if (outcome.tables.size() == 1) {
        write_file(base, to_csv(outcome.tables.front().second));
        summary.outputs.push_back(base);
    } else {
        for (const auto& [tag, table] : outcome.tables) {
            const auto path = sibling(base, tag);
            write_file(path, to_csv(table));
            summary.outputs.push_back(path);
        }
    }

    for (const auto& [k, v] : outcome.scalars) {
        if (!std::isfinite(v)) fail(ErrorKind::NonConvergence, fmt::format("{}: non-finite result", k));
    }
    summary.scalars = std::move(outcome.scalars);
    summary.warnings = std::move(outcome.warnings);
    summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

}  // namespace spinbath
