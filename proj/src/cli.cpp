#include "nltr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nltr/errors.hpp"
#include "nltr/io.hpp"
#include "nltr/optimizer.hpp"
#include "nltr/surface.hpp"

namespace nltr {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* artifact_version = "0.1.0";

// Rendered in place of a dBm value when a port receives no power at all.
constexpr double port_power_floor_dbm = -200.0;

// Band design targets the manifests report margins against.
constexpr double design_target_il_db = 1.0;
constexpr double design_target_isolation_db = 18.0;
constexpr double design_target_return_loss_db = 10.0;

// Canned scenario constants (reproduce subcommand).
constexpr double rx_band_p_dbm = -30.0;
constexpr double rx_band_f_start_hz = 0.8e9;
constexpr double rx_band_f_stop_hz = 1.3e9;
constexpr double crossover_f_hz = 1.2e9;
constexpr double crossover_p_start_dbm = -40.0;
constexpr double crossover_p_stop_dbm = 30.0;
constexpr std::size_t crossover_points = 71;

class stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_ =
        std::chrono::steady_clock::now();
};

std::vector<double> sweep_axis(double start, double stop, std::size_t points) {
    if (points == 1) return {start};
    return linspace(start, stop, points);
}

double port_dbm(double watts) {
    if (watts <= 0.0) return port_power_floor_dbm;
    return watts_to_dbm(watts);
}

sweep_row make_row(const run_config& cfg, const operating_point& op,
                   bool closed_form_rx) {
    sweep_row row;
    row.f_hz = op.f_hz;
    row.p_dbm = op.excitation_dbm;
    row.mode = op.mode;
    row.il_ant_rx_db = op.il_ant_rx_db;
    row.il_ant_tx_db = op.il_ant_tx_db;
    row.isolation_db = op.isolation_db;
    row.rl_db = op.rl_db;
    row.s11 = op.s_frozen[0][0];
    row.s21 = op.s_frozen[2][0];
    row.p_out_tx_dbm = port_dbm(op.p_port_watts[1]);
    row.p_out_rx_dbm = port_dbm(op.p_port_watts[2]);
    if (closed_form_rx) {
        auto [c1, c2] = rx_mode_closed_form(cfg.design, op.f_hz, op.z_nc);
        row.c1 = c1;
        row.c2 = c2;
    }
    return row;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw io_error("cannot create output directory " + dir + ": " +
                       ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

const char* solver_name_of(const run_config& cfg) {
    return cfg.solver.kind == solver_kind::hb ? "hb" : "transient";
}

ordered_json manifest_base(const run_config& cfg, const std::string& command) {
    ordered_json m;
    m["command"] = command;
    m["version"] = artifact_version;
    m["config_hash"] = config_hash(cfg);
    m["solver"] = solver_name_of(cfg);
    m["self_consistent"] = cfg.operating_point.self_consistent;
    return m;
}

void write_manifest(const std::string& out_dir, const ordered_json& manifest) {
    atomic_write_file(join_path(out_dir, "manifest.json"),
                      manifest.dump(2) + "\n");
}

impedance_surface acquire_surface(const run_config& cfg,
                                  double& build_seconds) {
    stopwatch sw;
    impedance_surface surface = load_or_build_surface(
        cfg.nc, cfg.surface_grid.to_grid(), cfg.solver, "");
    build_seconds = sw.seconds();
    return surface;
}

std::vector<std::string> touchstone_comments(const run_config& cfg,
                                             const char* ports,
                                             double excitation_dbm) {
    return {std::string("nltr ") + artifact_version,
            "config " + config_hash(cfg), std::string("ports ") + ports,
            "excitation Ant at " + fmt_g17(excitation_dbm) + " dBm"};
}

// Worst-case band metrics plus margins against the design targets.
ordered_json band_summary(const std::vector<sweep_row>& rows) {
    double worst_il = 0.0;
    double worst_iso = 0.0;
    double worst_rl = 0.0;
    bool first = true;
    for (const sweep_row& r : rows) {
        if (first) {
            worst_il = r.il_ant_rx_db;
            worst_iso = r.isolation_db;
            worst_rl = r.rl_db;
            first = false;
        } else {
            worst_il = std::max(worst_il, r.il_ant_rx_db);
            worst_iso = std::min(worst_iso, r.isolation_db);
            worst_rl = std::min(worst_rl, r.rl_db);
        }
    }
    ordered_json b;
    b["worst_il_ant_rx_db"] = worst_il;
    b["worst_isolation_db"] = worst_iso;
    b["worst_rl_db"] = worst_rl;
    ordered_json margins;
    margins["il"] = design_target_il_db - worst_il;
    margins["isolation"] = worst_iso - design_target_isolation_db;
    margins["return_loss"] = worst_rl - design_target_return_loss_db;
    b["margins_db"] = margins;
    return b;
}

// Low-power insertion-loss check and Tx/Rx delivered-power crossover scan.
ordered_json power_summary(const run_config& cfg,
                           const std::vector<sweep_row>& rows) {
    ordered_json j;

    double worst_low_il = 0.0;
    bool any_low = false;
    for (const sweep_row& r : rows) {
        if (r.p_dbm > -10.0) continue;
        worst_low_il = any_low ? std::max(worst_low_il, r.il_ant_rx_db)
                               : r.il_ant_rx_db;
        any_low = true;
    }
    if (any_low) {
        ordered_json low;
        low["max_il_ant_rx_db"] = worst_low_il;
        low["bound_db"] = cfg.sweeps.low_power_il_max_db;
        low["pass"] = worst_low_il <= cfg.sweeps.low_power_il_max_db;
        j["low_power"] = low;
    }

    std::size_t crossings = 0;
    double first_crossing_dbm = 0.0;
    bool have_crossing = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double d0 = rows[i - 1].p_out_rx_dbm - rows[i - 1].p_out_tx_dbm;
        double d1 = rows[i].p_out_rx_dbm - rows[i].p_out_tx_dbm;
        if ((d0 >= 0.0) == (d1 >= 0.0)) continue;
        ++crossings;
        if (!have_crossing) {
            double t = d0 / (d0 - d1); // linear interpolation to delta == 0
            first_crossing_dbm =
                rows[i - 1].p_dbm + t * (rows[i].p_dbm - rows[i - 1].p_dbm);
            have_crossing = true;
        }
    }
    ordered_json cross;
    cross["count"] = crossings;
    if (have_crossing) cross["p_dbm"] = first_crossing_dbm;
    j["crossover"] = cross;
    return j;
}

int cmd_surface(const run_config& cfg, const std::string& out_dir,
                const char* csv_name, const char* command, std::ostream& out) {
    stopwatch total;
    double build_seconds = 0.0;
    impedance_surface surface = acquire_surface(cfg, build_seconds);
    atomic_write_file(join_path(out_dir, csv_name), surface_to_csv(surface));

    ordered_json m = manifest_base(cfg, command);
    ordered_json s;
    s["cache_key"] = surface_cache_key(cfg.nc, surface.grid, cfg.solver);
    s["provenance"] = surface.provenance;
    s["f_points"] = surface.grid.rows();
    s["p_points"] = surface.grid.cols();
    m["surface"] = s;
    ordered_json timing;
    timing["surface"] = build_seconds;
    timing["total"] = total.seconds();
    m["timing_seconds"] = timing;
    m["outputs"] = ordered_json::array({csv_name, "manifest.json"});
    write_manifest(out_dir, m);

    out << "wrote " << join_path(out_dir, csv_name) << " ("
        << surface.grid.rows() << "x" << surface.grid.cols() << " grid)\n";
    return 0;
}

int cmd_freq_sweep(const run_config& cfg, const std::string& out_dir,
                   const char* csv_name, const char* command, double p_dbm,
                   double f_start_hz, double f_stop_hz, std::size_t points,
                   bool closed_form_rx, std::ostream& out) {
    stopwatch total;
    double build_seconds = 0.0;
    impedance_surface surface = acquire_surface(cfg, build_seconds);

    stopwatch sweep_watch;
    freq_sweep_result result = run_freq_sweep(
        cfg, surface, p_dbm, f_start_hz, f_stop_hz, points, closed_form_rx);
    double sweep_seconds = sweep_watch.seconds();

    atomic_write_file(join_path(out_dir, csv_name),
                      sweep_rows_to_csv(result.rows, false, closed_form_rx));
    write_touchstone(join_path(out_dir, "ant_rx.s2p"), result.ant_rx,
                     cfg.design.z_p,
                     touchstone_comments(cfg, "1=Ant 2=Rx", p_dbm));
    write_touchstone(join_path(out_dir, "ant_tx.s2p"), result.ant_tx,
                     cfg.design.z_p,
                     touchstone_comments(cfg, "1=Ant 2=Tx", p_dbm));

    ordered_json m = manifest_base(cfg, command);
    ordered_json sweep;
    sweep["excitation_dbm"] = p_dbm;
    sweep["f_start_hz"] = f_start_hz;
    sweep["f_stop_hz"] = f_stop_hz;
    sweep["points"] = points;
    m["sweep"] = sweep;
    m["band"] = band_summary(result.rows);
    ordered_json timing;
    timing["surface"] = build_seconds;
    timing["sweep"] = sweep_seconds;
    timing["total"] = total.seconds();
    m["timing_seconds"] = timing;
    m["outputs"] = ordered_json::array(
        {csv_name, "ant_rx.s2p", "ant_tx.s2p", "manifest.json"});
    write_manifest(out_dir, m);

    out << "wrote " << join_path(out_dir, csv_name) << " (" << points
        << " points), ant_rx.s2p, ant_tx.s2p\n";
    return 0;
}

int cmd_power_sweep(const run_config& cfg, const std::string& out_dir,
                    const char* csv_name, const char* command, double f_hz,
                    double p_start_dbm, double p_stop_dbm, std::size_t points,
                    std::ostream& out) {
    stopwatch total;
    double build_seconds = 0.0;
    impedance_surface surface = acquire_surface(cfg, build_seconds);

    stopwatch sweep_watch;
    std::vector<sweep_row> rows =
        run_power_sweep(cfg, surface, f_hz, p_start_dbm, p_stop_dbm, points);
    double sweep_seconds = sweep_watch.seconds();

    atomic_write_file(join_path(out_dir, csv_name),
                      sweep_rows_to_csv(rows, true, false));

    ordered_json m = manifest_base(cfg, command);
    ordered_json sweep;
    sweep["f_hz"] = f_hz;
    sweep["p_start_dbm"] = p_start_dbm;
    sweep["p_stop_dbm"] = p_stop_dbm;
    sweep["points"] = points;
    m["sweep"] = sweep;
    ordered_json summary = power_summary(cfg, rows);
    for (auto& [key, value] : summary.items()) m[key] = value;
    ordered_json timing;
    timing["surface"] = build_seconds;
    timing["sweep"] = sweep_seconds;
    timing["total"] = total.seconds();
    m["timing_seconds"] = timing;
    m["outputs"] = ordered_json::array({csv_name, "manifest.json"});
    write_manifest(out_dir, m);

    out << "wrote " << join_path(out_dir, csv_name) << " (" << points
        << " points)\n";
    return 0;
}

int cmd_optimize(const run_config& cfg, const std::string& out_dir,
                 std::ostream& out) {
    stopwatch total;
    double build_seconds = 0.0;
    impedance_surface surface = acquire_surface(cfg, build_seconds);
    surface_set surfaces{&surface, &surface, &surface, &surface};

    double reference_score = evaluate_objective(
        extract_design(cfg.design), cfg.objective, cfg.design, surfaces);

    stopwatch ga_watch;
    ga_report report = ga_optimize(cfg.ga, cfg.objective, cfg.design, surfaces);
    double ga_seconds = ga_watch.seconds();

    atomic_write_file(join_path(out_dir, "ga_trace.csv"),
                      ga_trace_csv(report));
    atomic_write_file(
        join_path(out_dir, "best_design.json"),
        design_config_fragment(report.best, cfg.design.it1.f_ref_hz));

    ordered_json m = manifest_base(cfg, "optimize");
    ordered_json ga;
    ga["seed"] = cfg.ga.seed;
    ga["population"] = cfg.ga.population;
    ga["generations"] = cfg.ga.generations;
    ga["evaluations"] = report.evaluations;
    ga["reference_score"] = reference_score;
    ga["best_score"] = report.best_score;
    ordered_json best;
    best["theta1_deg"] = report.best.theta1_deg;
    best["theta2_deg"] = report.best.theta2_deg;
    best["theta3_deg"] = report.best.theta3_deg;
    best["z1"] = report.best.z1;
    best["z2"] = report.best.z2;
    best["z3"] = report.best.z3;
    ga["best"] = best;
    m["ga"] = ga;
    ordered_json timing;
    timing["surface"] = build_seconds;
    timing["ga"] = ga_seconds;
    timing["total"] = total.seconds();
    m["timing_seconds"] = timing;
    m["outputs"] = ordered_json::array(
        {"ga_trace.csv", "best_design.json", "manifest.json"});
    write_manifest(out_dir, m);

    out << "best score " << fmt_g17(report.best_score) << " (reference "
        << fmt_g17(reference_score) << ") after " << report.evaluations
        << " evaluations\n";
    return 0;
}

} // namespace

freq_sweep_result run_freq_sweep(const run_config& cfg,
                                 const impedance_surface& surface, double p_dbm,
                                 double f_start_hz, double f_stop_hz,
                                 std::size_t points, bool closed_form_rx) {
    if (points < 1) throw config_error("sweep: points must be >= 1");
    surface_set surfaces{&surface, &surface, &surface, &surface};
    freq_sweep_result result;
    result.rows.reserve(points);
    result.ant_rx.reserve(points);
    result.ant_tx.reserve(points);
    for (double f : sweep_axis(f_start_hz, f_stop_hz, points)) {
        operating_point op = solve_operating_point(
            cfg.design, surfaces, f, port::ant, p_dbm, cfg.operating_point);
        result.rows.push_back(make_row(cfg, op, closed_form_rx));
        sparams rx = pair_sparams(op, port::ant, port::rx);
        sparams tx = pair_sparams(op, port::ant, port::tx);
        result.ant_rx.push_back({f, rx.s11, rx.s21, rx.s12, rx.s22});
        result.ant_tx.push_back({f, tx.s11, tx.s21, tx.s12, tx.s22});
    }
    return result;
}

std::vector<sweep_row> run_power_sweep(const run_config& cfg,
                                       const impedance_surface& surface,
                                       double f_hz, double p_start_dbm,
                                       double p_stop_dbm, std::size_t points) {
    if (points < 1) throw config_error("sweep: points must be >= 1");
    surface_set surfaces{&surface, &surface, &surface, &surface};
    std::vector<sweep_row> rows;
    rows.reserve(points);
    for (double p : sweep_axis(p_start_dbm, p_stop_dbm, points)) {
        operating_point op = solve_operating_point(
            cfg.design, surfaces, f_hz, port::ant, p, cfg.operating_point);
        rows.push_back(make_row(cfg, op, false));
    }
    return rows;
}

std::string sweep_rows_to_csv(const std::vector<sweep_row>& rows,
                              bool with_output_powers, bool with_closed_form) {
    std::string text =
        "f_hz,p_dbm,mode,il_ant_rx_db,il_ant_tx_db,isolation_db,rl_db,"
        "s11_re,s11_im,s21_re,s21_im";
    if (with_output_powers) text += ",p_out_tx_dbm,p_out_rx_dbm";
    if (with_closed_form) text += ",c1_re,c1_im,c2_re,c2_im";
    text += '\n';
    for (const sweep_row& r : rows) {
        text += fmt_g17(r.f_hz);
        text += ',';
        text += fmt_g17(r.p_dbm);
        text += ',';
        text += mode_name(r.mode);
        text += ',';
        text += fmt_g17(r.il_ant_rx_db);
        text += ',';
        text += fmt_g17(r.il_ant_tx_db);
        text += ',';
        text += fmt_g17(r.isolation_db);
        text += ',';
        text += fmt_g17(r.rl_db);
        text += ',';
        text += fmt_g17(r.s11.real());
        text += ',';
        text += fmt_g17(r.s11.imag());
        text += ',';
        text += fmt_g17(r.s21.real());
        text += ',';
        text += fmt_g17(r.s21.imag());
        if (with_output_powers) {
            text += ',';
            text += fmt_g17(r.p_out_tx_dbm);
            text += ',';
            text += fmt_g17(r.p_out_rx_dbm);
        }
        if (with_closed_form) {
            text += ',';
            text += fmt_g17(r.c1.real());
            text += ',';
            text += fmt_g17(r.c1.imag());
            text += ',';
            text += fmt_g17(r.c2.real());
            text += ',';
            text += fmt_g17(r.c2.imag());
        }
        text += '\n';
    }
    return text;
}

namespace cli {

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"nonlinear passive T/R switch: simulation and synthesis"};
    app.name("nltr");
    app.fallthrough(true);
    app.require_subcommand(1);
    app.set_version_flag("--version", artifact_version);

    std::string config_path;
    std::string out_dir_flag;
    std::string solver_flag;
    bool direct = false;
    bool self_consistent = false;
    bool closed_form_rx = false;
    bool print_cfg = false;
    std::uint64_t seed = 0;

    app.add_option("--config", config_path, "run configuration JSON file");
    app.add_option("--out", out_dir_flag,
                   "output directory (default: config output_dir)");
    app.add_option("--solver", solver_flag, "nonlinear solver backend")
        ->check(CLI::IsMember({"hb", "transient"}));
    CLI::Option* direct_flag = app.add_flag(
        "--direct", direct, "index impedance surfaces at the excitation power");
    CLI::Option* sc_flag =
        app.add_flag("--self-consistent", self_consistent,
                     "iterate local NC powers to self-consistency");
    direct_flag->excludes(sc_flag);
    sc_flag->excludes(direct_flag);
    app.add_flag("--closed-form-rx", closed_form_rx,
                 "append closed-form Rx coefficient columns to frequency "
                 "sweeps");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed, "override the synthesis RNG seed");
    app.add_flag("--print-effective-config", print_cfg,
                 "echo the defaults-applied configuration to stdout");

    CLI::App* c_surface = app.add_subcommand(
        "surface", "build (or load from cache) the NC impedance surface");
    CLI::App* c_sweep_freq = app.add_subcommand(
        "sweep-freq", "frequency sweep at fixed excitation power");
    CLI::App* c_sweep_power =
        app.add_subcommand("sweep-power", "power sweep at fixed frequency");
    CLI::App* c_reproduce =
        app.add_subcommand("reproduce", "canned reference scenarios");
    std::string scenario;
    c_reproduce->add_option("scenario", scenario, "reference scenario")
        ->required()
        ->check(CLI::IsMember({"nc-surface", "rx-band", "power-crossover"}));
    CLI::App* c_optimize = app.add_subcommand(
        "optimize", "genetic re-synthesis of the three line sections");
    CLI::App* c_validate = app.add_subcommand(
        "validate-config", "parse and validate the config, print its hash");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("nltr");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << artifact_version << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        run_config cfg = config_path.empty() ? parse_config_text("{}")
                                             : load_config(config_path);
        if (!solver_flag.empty())
            cfg.solver.kind = solver_flag == "hb" ? solver_kind::hb
                                                  : solver_kind::transient;
        if (direct) {
            cfg.operating_point.self_consistent = false;
            cfg.objective.op.self_consistent = false;
        }
        if (self_consistent) {
            cfg.operating_point.self_consistent = true;
            cfg.objective.op.self_consistent = true;
        }
        if (seed_opt->count() > 0) cfg.ga.seed = seed;

        if (print_cfg) out << effective_config_json(cfg);

        const std::string out_dir =
            out_dir_flag.empty() ? cfg.output_dir : out_dir_flag;

        if (app.got_subcommand(c_validate)) {
            out << "config ok " << config_hash(cfg) << '\n';
            return 0;
        }
        ensure_out_dir(out_dir);
        if (app.got_subcommand(c_surface))
            return cmd_surface(cfg, out_dir, "surface.csv", "surface", out);
        if (app.got_subcommand(c_sweep_freq))
            return cmd_freq_sweep(
                cfg, out_dir, "sweep_freq.csv", "sweep-freq",
                cfg.sweeps.freq.p_dbm, cfg.sweeps.freq.f_start_hz,
                cfg.sweeps.freq.f_stop_hz, cfg.sweeps.freq.points,
                closed_form_rx, out);
        if (app.got_subcommand(c_sweep_power))
            return cmd_power_sweep(
                cfg, out_dir, "sweep_power.csv", "sweep-power",
                cfg.sweeps.power.f_hz, cfg.sweeps.power.p_start_dbm,
                cfg.sweeps.power.p_stop_dbm, cfg.sweeps.power.points, out);
        if (app.got_subcommand(c_reproduce)) {
            if (scenario == "nc-surface")
                return cmd_surface(cfg, out_dir, "nc_surface.csv",
                                   "reproduce nc-surface", out);
            if (scenario == "rx-band")
                return cmd_freq_sweep(cfg, out_dir, "rx_band.csv",
                                      "reproduce rx-band", rx_band_p_dbm,
                                      rx_band_f_start_hz, rx_band_f_stop_hz,
                                      cfg.sweeps.rx_band_points,
                                      closed_form_rx, out);
            return cmd_power_sweep(cfg, out_dir, "power_crossover.csv",
                                   "reproduce power-crossover", crossover_f_hz,
                                   crossover_p_start_dbm, crossover_p_stop_dbm,
                                   crossover_points, out);
        }
        if (app.got_subcommand(c_optimize))
            return cmd_optimize(cfg, out_dir, out);

        err << "error: no command selected\n";
        return 2;
    } catch (const non_convergence& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    }
}

} // namespace cli

} // namespace nltr
