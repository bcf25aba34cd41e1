#include "nltr/config.hpp"

#include <set>
#include <utility>

#include <json.hpp>

#include "nltr/io.hpp"

namespace nltr {

namespace {

using njson = nlohmann::ordered_json;

// Field-by-field reader that records which keys were consumed and rejects the
// rest by their dotted path.
class object_reader {
  public:
    object_reader(const njson& obj, std::string path)
        : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object())
            throw config_error("config: " + path_ + " must be an object");
    }

    bool has(const char* key) const { return obj_.contains(key); }

    const njson* child(const char* key) {
        if (!obj_.contains(key)) return nullptr;
        seen_.insert(key);
        return &obj_.at(key);
    }

    void read(const char* key, double& out) {
        if (const njson* v = child(key)) {
            if (!v->is_number())
                throw config_error("config: " + dotted(key) + " must be a number");
            out = v->get<double>();
        }
    }

    void read(const char* key, std::size_t& out) {
        if (const njson* v = child(key)) {
            if (!v->is_number_integer() ||
                (v->is_number_integer() && v->get<long long>() < 0))
                throw config_error("config: " + dotted(key) +
                                   " must be a non-negative integer");
            out = static_cast<std::size_t>(v->get<long long>());
        }
    }

    void read(const char* key, bool& out) {
        if (const njson* v = child(key)) {
            if (!v->is_boolean())
                throw config_error("config: " + dotted(key) + " must be a boolean");
            out = v->get<bool>();
        }
    }

    void read(const char* key, std::string& out) {
        if (const njson* v = child(key)) {
            if (!v->is_string())
                throw config_error("config: " + dotted(key) + " must be a string");
            out = v->get<std::string>();
        }
    }

    std::string dotted(const char* key) const {
        return path_.empty() ? std::string(key) : path_ + "." + key;
    }

    // Call last: any key not consumed is unknown.
    void finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (seen_.find(it.key()) == seen_.end())
                throw config_error("config: unknown key \"" + dotted(it.key().c_str()) +
                                   "\"");
    }

  private:
    const njson& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_line(object_reader& parent, const char* key, transmission_line& line) {
    if (const njson* v = parent.child(key)) {
        object_reader r(*v, parent.dotted(key));
        r.read("z0", line.z0);
        r.read("theta_deg", line.theta_ref_deg);
        r.read("f_ref_hz", line.f_ref_hz);
        r.finish();
    }
}

} // namespace

void run_config::validate() const {
    diode.validate();
    nc.validate();
    design.validate();
    solver.validate();
    operating_point.validate();
    surface_grid.to_grid();
    ga.validate();
    objective.validate();
    auto check_sweep_axis = [](double start, double stop, std::size_t points,
                               const std::string& name) {
        if (points < 1)
            throw config_error("config: " + name + ".points must be >= 1");
        if (points >= 2 && !(start < stop))
            throw config_error("config: " + name +
                               " start must be < stop when points >= 2");
    };
    check_sweep_axis(sweeps.freq.f_start_hz, sweeps.freq.f_stop_hz,
                     sweeps.freq.points, "sweeps.freq");
    check_sweep_axis(sweeps.power.p_start_dbm, sweeps.power.p_stop_dbm,
                     sweeps.power.points, "sweeps.power");
    if (sweeps.rx_band_points < 1)
        throw config_error("config: sweeps.rx_band_points must be >= 1");
    if (!(sweeps.low_power_il_max_db > 0.0))
        throw config_error("config: sweeps.low_power_il_max_db must be > 0");
    if (output_dir.empty())
        throw config_error("config: output_dir must not be empty");
}

run_config parse_config_text(const std::string& text) {
    njson root;
    try {
        root = njson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    run_config cfg;
    object_reader r(root, "");

    if (const njson* v = r.child("diode")) {
        object_reader d(*v, "diode");
        d.read("IS", cfg.diode.i_s);
        d.read("N", cfg.diode.n_ideality);
        d.read("RS", cfg.diode.r_s);
        d.read("CJ0", cfg.diode.c_j0);
        d.read("VJ", cfg.diode.v_j);
        d.read("M", cfg.diode.m_grading);
        d.read("LP", cfg.diode.l_p);
        d.read("CP", cfg.diode.c_p);
        d.read("TEMP_K", cfg.diode.temperature_k);
        d.finish();
    }
    if (const njson* v = r.child("nc")) {
        object_reader n(*v, "nc");
        n.read("series_per_branch", cfg.nc.n_series);
        n.read("antiparallel_branches", cfg.nc.n_branches);
        n.finish();
    }
    if (const njson* v = r.child("lines")) {
        object_reader l(*v, "lines");
        read_line(l, "it1", cfg.design.it1);
        read_line(l, "it2", cfg.design.it2);
        read_line(l, "it3", cfg.design.it3);
        l.finish();
    }
    r.read("z_p", cfg.design.z_p);
    if (const njson* v = r.child("surface_grid")) {
        object_reader g(*v, "surface_grid");
        g.read("f_start_hz", cfg.surface_grid.f_start_hz);
        g.read("f_stop_hz", cfg.surface_grid.f_stop_hz);
        g.read("f_points", cfg.surface_grid.f_points);
        g.read("p_start_dbm", cfg.surface_grid.p_start_dbm);
        g.read("p_stop_dbm", cfg.surface_grid.p_stop_dbm);
        g.read("p_points", cfg.surface_grid.p_points);
        g.finish();
    }
    if (const njson* v = r.child("solver")) {
        object_reader s(*v, "solver");
        std::string kind = cfg.solver.kind == solver_kind::hb ? "hb" : "transient";
        s.read("kind", kind);
        if (kind == "hb")
            cfg.solver.kind = solver_kind::hb;
        else if (kind == "transient")
            cfg.solver.kind = solver_kind::transient;
        else
            throw config_error("config: solver.kind must be \"hb\" or \"transient\"");
        s.read("hb_harmonics", cfg.solver.hb_harmonics);
        s.read("hb_samples", cfg.solver.hb_samples);
        s.read("tol", cfg.solver.tol);
        s.read("max_iterations", cfg.solver.max_iterations);
        s.read("transient_steps_per_period", cfg.solver.transient_steps_per_period);
        s.read("transient_max_periods", cfg.solver.transient_max_periods);
        s.finish();
    }
    if (const njson* v = r.child("operating_point")) {
        object_reader o(*v, "operating_point");
        o.read("relaxation", cfg.operating_point.relaxation);
        o.read("tolerance_db", cfg.operating_point.tolerance_db);
        o.read("max_iterations", cfg.operating_point.max_iterations);
        o.read("nominal_path_loss_db", cfg.operating_point.nominal_path_loss_db);
        o.read("mode_threshold_db", cfg.operating_point.mode_threshold_db);
        o.read("self_consistent", cfg.operating_point.self_consistent);
        o.finish();
    }
    if (const njson* v = r.child("sweeps")) {
        object_reader s(*v, "sweeps");
        if (const njson* f = s.child("freq")) {
            object_reader fr(*f, "sweeps.freq");
            fr.read("p_dbm", cfg.sweeps.freq.p_dbm);
            fr.read("f_start_hz", cfg.sweeps.freq.f_start_hz);
            fr.read("f_stop_hz", cfg.sweeps.freq.f_stop_hz);
            fr.read("points", cfg.sweeps.freq.points);
            fr.finish();
        }
        if (const njson* p = s.child("power")) {
            object_reader pr(*p, "sweeps.power");
            pr.read("f_hz", cfg.sweeps.power.f_hz);
            pr.read("p_start_dbm", cfg.sweeps.power.p_start_dbm);
            pr.read("p_stop_dbm", cfg.sweeps.power.p_stop_dbm);
            pr.read("points", cfg.sweeps.power.points);
            pr.finish();
        }
        s.read("rx_band_points", cfg.sweeps.rx_band_points);
        s.read("low_power_il_max_db", cfg.sweeps.low_power_il_max_db);
        s.finish();
    }
    if (const njson* v = r.child("ga")) {
        object_reader g(*v, "ga");
        g.read("population", cfg.ga.population);
        g.read("generations", cfg.ga.generations);
        g.read("tournament", cfg.ga.tournament);
        g.read("crossover_rate", cfg.ga.crossover_rate);
        g.read("mutation_sigma", cfg.ga.mutation_sigma);
        g.read("elitism", cfg.ga.elitism);
        g.read("seed", cfg.ga.seed);
        g.read("theta_min_deg", cfg.ga.theta_min_deg);
        g.read("theta_max_deg", cfg.ga.theta_max_deg);
        g.read("z_min", cfg.ga.z_min);
        g.read("z_max", cfg.ga.z_max);
        g.finish();
    }
    if (const njson* v = r.child("objective")) {
        object_reader o(*v, "objective");
        o.read("f_start_hz", cfg.objective.f_start_hz);
        o.read("f_stop_hz", cfg.objective.f_stop_hz);
        o.read("band_points", cfg.objective.band_points);
        o.read("rx_probe_dbm", cfg.objective.rx_probe_dbm);
        o.read("tx_probe_dbm", cfg.objective.tx_probe_dbm);
        o.read("weight_rx_il", cfg.objective.weight_rx_il);
        o.read("weight_tx_il", cfg.objective.weight_tx_il);
        o.read("weight_isolation", cfg.objective.weight_isolation);
        o.read("weight_return_loss", cfg.objective.weight_return_loss);
        o.read("target_rx_il_db", cfg.objective.target_rx_il_db);
        o.read("target_tx_il_db", cfg.objective.target_tx_il_db);
        o.read("target_isolation_db", cfg.objective.target_isolation_db);
        o.read("target_return_loss_db", cfg.objective.target_return_loss_db);
        o.finish();
    }
    r.read("output_dir", cfg.output_dir);
    r.finish();

    cfg.nc.diode = cfg.diode;
    cfg.design.ncs = {cfg.nc, cfg.nc, cfg.nc, cfg.nc};
    cfg.objective.op = cfg.operating_point;
    cfg.validate();
    return cfg;
}

run_config load_config(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

std::string effective_config_json(const run_config& cfg) {
    njson root;
    root["diode"] = {{"IS", cfg.diode.i_s},
                     {"N", cfg.diode.n_ideality},
                     {"RS", cfg.diode.r_s},
                     {"CJ0", cfg.diode.c_j0},
                     {"VJ", cfg.diode.v_j},
                     {"M", cfg.diode.m_grading},
                     {"LP", cfg.diode.l_p},
                     {"CP", cfg.diode.c_p},
                     {"TEMP_K", cfg.diode.temperature_k}};
    root["nc"] = {{"series_per_branch", cfg.nc.n_series},
                  {"antiparallel_branches", cfg.nc.n_branches}};
    auto line_json = [](const transmission_line& l) {
        return njson{{"z0", l.z0}, {"theta_deg", l.theta_ref_deg},
                     {"f_ref_hz", l.f_ref_hz}};
    };
    root["lines"] = {{"it1", line_json(cfg.design.it1)},
                     {"it2", line_json(cfg.design.it2)},
                     {"it3", line_json(cfg.design.it3)}};
    root["z_p"] = cfg.design.z_p;
    root["surface_grid"] = {{"f_start_hz", cfg.surface_grid.f_start_hz},
                            {"f_stop_hz", cfg.surface_grid.f_stop_hz},
                            {"f_points", cfg.surface_grid.f_points},
                            {"p_start_dbm", cfg.surface_grid.p_start_dbm},
                            {"p_stop_dbm", cfg.surface_grid.p_stop_dbm},
                            {"p_points", cfg.surface_grid.p_points}};
    root["solver"] = {
        {"kind", cfg.solver.kind == solver_kind::hb ? "hb" : "transient"},
        {"hb_harmonics", cfg.solver.hb_harmonics},
        {"hb_samples", cfg.solver.hb_samples},
        {"tol", cfg.solver.tol},
        {"max_iterations", cfg.solver.max_iterations},
        {"transient_steps_per_period", cfg.solver.transient_steps_per_period},
        {"transient_max_periods", cfg.solver.transient_max_periods}};
    root["operating_point"] = {
        {"relaxation", cfg.operating_point.relaxation},
        {"tolerance_db", cfg.operating_point.tolerance_db},
        {"max_iterations", cfg.operating_point.max_iterations},
        {"nominal_path_loss_db", cfg.operating_point.nominal_path_loss_db},
        {"mode_threshold_db", cfg.operating_point.mode_threshold_db},
        {"self_consistent", cfg.operating_point.self_consistent}};
    root["sweeps"] = {{"freq",
                       {{"p_dbm", cfg.sweeps.freq.p_dbm},
                        {"f_start_hz", cfg.sweeps.freq.f_start_hz},
                        {"f_stop_hz", cfg.sweeps.freq.f_stop_hz},
                        {"points", cfg.sweeps.freq.points}}},
                      {"power",
                       {{"f_hz", cfg.sweeps.power.f_hz},
                        {"p_start_dbm", cfg.sweeps.power.p_start_dbm},
                        {"p_stop_dbm", cfg.sweeps.power.p_stop_dbm},
                        {"points", cfg.sweeps.power.points}}},
                      {"rx_band_points", cfg.sweeps.rx_band_points},
                      {"low_power_il_max_db", cfg.sweeps.low_power_il_max_db}};
    root["ga"] = {{"population", cfg.ga.population},
                  {"generations", cfg.ga.generations},
                  {"tournament", cfg.ga.tournament},
                  {"crossover_rate", cfg.ga.crossover_rate},
                  {"mutation_sigma", cfg.ga.mutation_sigma},
                  {"elitism", cfg.ga.elitism},
                  {"seed", cfg.ga.seed},
                  {"theta_min_deg", cfg.ga.theta_min_deg},
                  {"theta_max_deg", cfg.ga.theta_max_deg},
                  {"z_min", cfg.ga.z_min},
                  {"z_max", cfg.ga.z_max}};
    root["objective"] = {{"f_start_hz", cfg.objective.f_start_hz},
                         {"f_stop_hz", cfg.objective.f_stop_hz},
                         {"band_points", cfg.objective.band_points},
                         {"rx_probe_dbm", cfg.objective.rx_probe_dbm},
                         {"tx_probe_dbm", cfg.objective.tx_probe_dbm},
                         {"weight_rx_il", cfg.objective.weight_rx_il},
                         {"weight_tx_il", cfg.objective.weight_tx_il},
                         {"weight_isolation", cfg.objective.weight_isolation},
                         {"weight_return_loss", cfg.objective.weight_return_loss},
                         {"target_rx_il_db", cfg.objective.target_rx_il_db},
                         {"target_tx_il_db", cfg.objective.target_tx_il_db},
                         {"target_isolation_db", cfg.objective.target_isolation_db},
                         {"target_return_loss_db", cfg.objective.target_return_loss_db}};
    root["output_dir"] = cfg.output_dir;
    return root.dump(2) + "\n";
}

std::string config_hash(const run_config& cfg) {
    return fnv1a_hex(effective_config_json(cfg));
}

} // namespace nltr
