// casimir: batch front end for the Bose-gas Casimir-box experiments.
//
// Commands
//   solve-mu   per-volume chemical potential and the scaled constant
//   classify   condensation regime from zero/first-mode scaling
//   cycles     cycle-window densities and the long-cycle limit
//   correlate  two-point correlation along a separation path
//
// Every command reads a JSON config (--config) which individual flags can
// override, writes a CSV table plus a JSON sidecar with fit metadata into
// --out, and is deterministic: identical config, identical bytes.
//
// Exit codes: 0 success, 1 numerical non-convergence, 2 configuration error.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "casimir/box_model.hpp"
#include "casimir/condensate.hpp"
#include "casimir/correlation.hpp"
#include "casimir/cycles.hpp"
#include "casimir/scaling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace casimir;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::array<double, 3> alpha{0.4, 0.3, 0.3};
    double lambda = 1.0;
    std::optional<double> rho;         // absolute density, wins over rho_offset
    double rho_offset = 1.0;           // rho = rho_c(lambda) + rho_offset
    double v0 = 1e3;
    int volume_count = 11;
    std::string out_dir = "out";
    // cycles
    std::optional<CycleWindow> window;
    std::int64_t m_cut = 64;
    // correlate
    SeparationPath path;

    double density() const {
        return rho ? *rho : critical_density(lambda) + rho_offset;
    }
    std::vector<double> volumes() const { return volume_sequence(v0, volume_count); }
};

std::array<double, 3> parse_triple(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError("config field '" + key + "' must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    if (j.contains("alpha")) cfg.alpha = parse_triple(j["alpha"], "alpha");
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
    if (j.contains("rho_offset")) cfg.rho_offset = j["rho_offset"].get<double>();
    if (j.contains("volumes")) {
        const json& v = j["volumes"];
        if (v.is_object()) {
            if (v.contains("v0")) cfg.v0 = v["v0"].get<double>();
            if (v.contains("count")) cfg.volume_count = v["count"].get<int>();
        } else if (v.is_array() && v.size() == 2) {
            cfg.v0 = v[0].get<double>();
            cfg.volume_count = v[1].get<int>();
        } else {
            throw ConfigError("config field 'volumes' must be {v0, count} or [v0, count]");
        }
    }
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("window")) {
        const json& w = j["window"];
        try {
            cfg.window.emplace(w.at("delta").get<double>(), w.at("x").get<double>(),
                               w.at("y").get<double>());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config field 'window' invalid: ") + e.what());
        }
    }
    if (j.contains("m_cut")) cfg.m_cut = j["m_cut"].get<std::int64_t>();
    if (j.contains("path")) {
        const json& p = j["path"];
        if (p.contains("x")) cfg.path.x = parse_triple(p["x"], "path.x");
        if (p.contains("s")) cfg.path.s = parse_triple(p["s"], "path.s");
    }
    return cfg;
}

std::array<double, 3> split_triple(const std::string& text, const std::string& flag) {
    std::array<double, 3> out{};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        std::size_t next = text.find(',', pos);
        const std::string tok =
            text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            out[i] = std::stod(tok);
        } catch (const std::exception&) {
            throw ConfigError(flag + ": expected three comma-separated numbers, got '" + text +
                              "'");
        }
        if (i < 2) {
            if (next == std::string::npos)
                throw ConfigError(flag + ": expected three comma-separated numbers, got '" +
                                  text + "'");
            pos = next + 1;
        } else if (next != std::string::npos) {
            throw ConfigError(flag + ": expected three comma-separated numbers, got '" + text +
                              "'");
        }
    }
    return out;
}

// 17 significant digits: the shortest format that round-trips a double.
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

json fit_metadata(const ScalingSeries& s) {
    return json{{"extrapolated_limit", s.extrapolated_limit},
                {"fit_exponent", s.fit_exponent},
                {"fit_coefficient", s.fit_coefficient},
                {"residual", s.residual},
                {"converged", s.converged}};
}

json config_echo(const ExperimentConfig& cfg) {
    json j{{"alpha", cfg.alpha},
           {"lambda", cfg.lambda},
           {"rho", cfg.density()},
           {"volumes", {{"v0", cfg.v0}, {"count", cfg.volume_count}}}};
    return j;
}

void emit(const ExperimentConfig& cfg, const std::string& stem, const std::string& csv,
          json sidecar) {
    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / (stem + ".csv"), csv);
    sidecar["config"] = config_echo(cfg);
    write_text(fs::path(cfg.out_dir) / (stem + ".json"), sidecar.dump(2) + "\n");
}

// ---------------------------------------------------------------- solve-mu

int cmd_solve_mu(const ExperimentConfig& cfg) {
    const BoxGeometry geom(cfg.alpha, cfg.v0);
    const double rho = cfg.density();
    const std::vector<double> volumes = cfg.volumes();
    const double delta = cfg.alpha[0] > 0.5 ? 2.0 * (1.0 - cfg.alpha[0]) : 1.0;

    std::vector<ThermoPoint> tps(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        tps[i] = solve_chemical_potential(geom.with_volume(volumes[i]), cfg.lambda, rho);
    });

    std::string csv = "volume,beta_mu,minus_beta_mu_v_delta\n";
    std::vector<double> scaled(volumes.size());
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        scaled[i] = -tps[i].beta_mu * std::pow(volumes[i], delta);
        csv += fmt(volumes[i]) + "," + fmt(tps[i].beta_mu) + "," + fmt(scaled[i]) + "\n";
    }

    json sidecar{{"command", "solve-mu"}, {"delta_candidate", delta}};
    const bool condensed = rho > critical_density(cfg.lambda);
    if (condensed) {
        const ScalingSeries fit = fit_series_log(volumes, scaled, cfg.alpha[2], 3);
        sidecar["constant_fit"] = fit_metadata(fit);
        std::vector<double> minus_mu(volumes.size());
        for (std::size_t i = 0; i < volumes.size(); ++i) minus_mu[i] = -tps[i].beta_mu;
        const ScalingSeries expfit = fit_decay_exponent(volumes, minus_mu, cfg.alpha[2]);
        sidecar["exponent_fit"] = fit_metadata(expfit);
        emit(cfg, "solve_mu", csv, sidecar);
        return (fit.converged && expfit.converged) ? 0 : 1;
    }
    // below the transition beta_mu converges to a negative constant
    std::vector<double> bm(volumes.size());
    for (std::size_t i = 0; i < volumes.size(); ++i) bm[i] = tps[i].beta_mu;
    const ScalingSeries fit = fit_series(volumes, bm);
    sidecar["beta_mu_fit"] = fit_metadata(fit);
    emit(cfg, "solve_mu", csv, sidecar);
    return fit.converged ? 0 : 1;
}

// ---------------------------------------------------------------- classify

int cmd_classify(const ExperimentConfig& cfg) {
    const BoxGeometry geom(cfg.alpha, cfg.v0);
    const ClassificationResult res =
        classify(geom, cfg.lambda, cfg.density(), cfg.volumes());

    std::string csv = "volume,zero_mode_density,first_mode_density\n";
    for (std::size_t i = 0; i < res.zero_mode.volumes.size(); ++i)
        csv += fmt(res.zero_mode.volumes[i]) + "," + fmt(res.zero_mode.values[i]) + "," +
               fmt(res.first_mode.values[i]) + "\n";

    json sidecar{{"command", "classify"},
                 {"regime", to_string(res.regime)},
                 {"conclusive", res.conclusive},
                 {"evidence", res.evidence}};
    if (!res.zero_mode.volumes.empty()) {
        sidecar["zero_mode_fit"] = fit_metadata(res.zero_mode);
        sidecar["first_mode_fit"] = fit_metadata(res.first_mode);
    }
    emit(cfg, "classify", csv, sidecar);
    return res.conclusive ? 0 : 1;
}

// ------------------------------------------------------------------ cycles

int cmd_cycles(const ExperimentConfig& cfg) {
    const BoxGeometry geom(cfg.alpha, cfg.v0);
    const double rho = cfg.density();
    const std::vector<double> volumes = cfg.volumes();

    const ScalingSeries longs = long_cycle_density(geom, cfg.lambda, rho, volumes);
    const ScalingSeries shorts = short_cycle_density(geom, cfg.lambda, rho, volumes, cfg.m_cut);
    std::optional<ScalingSeries> window;
    if (cfg.window) window = windowed_cycle_density(geom, cfg.lambda, rho, *cfg.window, volumes);

    std::string csv = "volume,short_cycle_density,long_cycle_density";
    if (window) csv += ",window_density";
    csv += "\n";
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        csv += fmt(volumes[i]) + "," + fmt(shorts.values[i]) + "," + fmt(longs.values[i]);
        if (window) csv += "," + fmt(window->values[i]);
        csv += "\n";
    }

    json sidecar{{"command", "cycles"},
                 {"m_cut", cfg.m_cut},
                 {"short_cycle_fit", fit_metadata(shorts)},
                 {"long_cycle_fit", fit_metadata(longs)},
                 {"short_cycle_limit", short_cycle_limit(cfg.lambda, rho)}};
    if (window) {
        sidecar["window"] =
            json{{"delta", cfg.window->delta}, {"x", cfg.window->x}, {"y", cfg.window->y}};
        sidecar["window_fit"] = fit_metadata(*window);
    }
    emit(cfg, "cycles", csv, sidecar);
    const bool ok = longs.converged && shorts.converged && (!window || window->converged);
    return ok ? 0 : 1;
}

// --------------------------------------------------------------- correlate

int cmd_correlate(const ExperimentConfig& cfg) {
    const BoxGeometry geom(cfg.alpha, cfg.v0);
    const double rho = cfg.density();
    const std::vector<double> volumes = cfg.volumes();

    // per-volume admissibility: rejected rows are reported, not clamped
    std::vector<double> ok_volumes;
    std::vector<std::string> rejected;
    for (double V : volumes) {
        try {
            cfg.path.validate(geom, {V});
            ok_volumes.push_back(V);
        } catch (const std::domain_error& e) {
            rejected.emplace_back(e.what());
        }
    }
    if (ok_volumes.size() < 6)
        throw ConfigError("correlate: separation path admissible at fewer than 6 volumes");

    const ScalingSeries prof = odlro_profile(geom, cfg.lambda, rho, cfg.path, ok_volumes);

    std::string csv = "volume,x1,x2,x3,sigma,status\n";
    std::size_t k = 0, r = 0;
    for (double V : volumes) {
        const std::array<double, 3> X = cfg.path.separation(V);
        csv += fmt(V) + "," + fmt(X[0]) + "," + fmt(X[1]) + "," + fmt(X[2]) + ",";
        if (k < ok_volumes.size() && ok_volumes[k] == V) {
            csv += fmt(prof.values[k]) + ",ok\n";
            ++k;
        } else {
            csv += ",rejected:half-period\n";
            ++r;
        }
    }

    json sidecar{{"command", "correlate"},
                 {"path", {{"x", cfg.path.x}, {"s", cfg.path.s}}},
                 {"profile_fit", fit_metadata(prof)},
                 {"rejected_volumes", rejected}};
    emit(cfg, "correlate", csv, sidecar);
    return prof.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bose gas in Casimir boxes: finite-size sweeps and extrapolation"};
    app.require_subcommand(1);

    std::string config_path, alpha_str, volumes_str, out_dir;
    std::optional<double> rho_offset, lambda;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--alpha", alpha_str, "box exponents a1,a2,a3 (override)");
        sub->add_option("--rho-offset", rho_offset, "density offset rho - rho_c (override)");
        sub->add_option("--lambda", lambda, "thermal de Broglie length (override)");
        sub->add_option("--volumes", volumes_str, "volume sequence v0,K (override)");
        sub->add_option("--out", out_dir, "output directory (override)");
    };

    CLI::App* solve = app.add_subcommand("solve-mu", "chemical potential sweep");
    CLI::App* classify_cmd = app.add_subcommand("classify", "condensation regime");
    CLI::App* cycles_cmd = app.add_subcommand("cycles", "cycle statistics sweep");
    CLI::App* correlate_cmd = app.add_subcommand("correlate", "two-point correlation sweep");
    for (CLI::App* sub : {solve, classify_cmd, cycles_cmd, correlate_cmd}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (!alpha_str.empty()) cfg.alpha = split_triple(alpha_str, "--alpha");
        if (rho_offset) {
            cfg.rho.reset();
            cfg.rho_offset = *rho_offset;
        }
        if (lambda) cfg.lambda = *lambda;
        if (!volumes_str.empty()) {
            const std::size_t comma = volumes_str.find(',');
            if (comma == std::string::npos)
                throw ConfigError("--volumes: expected v0,K");
            try {
                cfg.v0 = std::stod(volumes_str.substr(0, comma));
                cfg.volume_count = std::stoi(volumes_str.substr(comma + 1));
            } catch (const std::exception&) {
                throw ConfigError("--volumes: expected v0,K, got '" + volumes_str + "'");
            }
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (cfg.volume_count < 1) throw ConfigError("volume count must be >= 1");
        if (!(cfg.v0 > 0.0)) throw ConfigError("v0 must be > 0");
        if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be > 0");
        if (!(cfg.density() > 0.0)) throw ConfigError("density must be > 0");

        if (*solve) return cmd_solve_mu(cfg);
        if (*classify_cmd) return cmd_classify(cfg);
        if (*cycles_cmd) return cmd_cycles(cfg);
        if (*correlate_cmd) return cmd_correlate(cfg);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolveError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    }
}
