#pragma once

#include <string>

#include "nltr/diode.hpp"
#include "nltr/network.hpp"
#include "nltr/optimizer.hpp"
#include "nltr/solvers.hpp"
#include "nltr/units.hpp"

namespace nltr {

struct grid_spec {
    double f_start_hz = 0.6e9;
    double f_stop_hz = 1.5e9;
    std::size_t f_points = 46;
    double p_start_dbm = -40.0;
    double p_stop_dbm = 30.0;
    std::size_t p_points = 36;

    grid2d to_grid() const { // throws config_error on bad axes
        return make_grid(f_start_hz, f_stop_hz, f_points, p_start_dbm, p_stop_dbm,
                         p_points);
    }
};

struct sweep_freq_spec {
    double p_dbm = -30.0;
    double f_start_hz = 0.8e9;
    double f_stop_hz = 1.3e9;
    std::size_t points = 51;
};

struct sweep_power_spec {
    double f_hz = 1.2e9;
    double p_start_dbm = -40.0;
    double p_stop_dbm = 30.0;
    std::size_t points = 71;
};

struct sweep_specs {
    sweep_freq_spec freq{};
    sweep_power_spec power{};
    std::size_t rx_band_points = 101; // reproduce rx-band sweep density
    double low_power_il_max_db = 2.0; // Rx IL bound checked at <= -10 dBm rows
};

// Full run configuration. Every field has a default; an empty JSON object is
// a valid config. Unknown keys anywhere are rejected by name.
struct run_config {
    diode_params diode{};
    nonlinear_circuit nc{};   // nc.diode kept in sync with diode on load
    switch_design design{};   // lines + z_p; ncs filled from nc
    grid_spec surface_grid{};
    solver_settings solver{};
    operating_point_settings operating_point{};
    sweep_specs sweeps{};
    ga_config ga{};
    objective_spec objective{}; // objective.op mirrors operating_point
    std::string output_dir = "out";

    void validate() const;
};

// Parse + validate. Parse errors carry nlohmann's line/column text; validation
// errors name the offending field.
run_config parse_config_text(const std::string& text);
run_config load_config(const std::string& path);

// Canonical echo of the effective (defaults-applied) config: schema order,
// two-space indent, byte-stable for identical inputs.
std::string effective_config_json(const run_config& cfg);

// FNV-1a hex digest of the canonical echo.
std::string config_hash(const run_config& cfg);

} // namespace nltr
