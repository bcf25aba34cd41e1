#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nltr/config.hpp"
#include "nltr/io.hpp"
#include "nltr/network.hpp"

namespace nltr {

// One evaluated sweep point. Insertion losses, isolation, and return loss are
// attenuations of the frozen network at the row's converged operating point;
// s11/s21 are the Ant reflection and Ant->Rx transmission.
struct sweep_row {
    double f_hz = 0.0;
    double p_dbm = 0.0;
    switch_mode mode = switch_mode::transition;
    double il_ant_rx_db = 0.0;
    double il_ant_tx_db = 0.0;
    double isolation_db = 0.0;
    double rl_db = 0.0;
    cpx s11{0.0, 0.0};
    cpx s21{0.0, 0.0};
    double p_out_tx_dbm = 0.0; // delivered Tx-port power (power sweeps)
    double p_out_rx_dbm = 0.0; // delivered Rx-port power (power sweeps)
    cpx c1{0.0, 0.0};          // closed-form Rx coefficients, when requested
    cpx c2{0.0, 0.0};
};

struct freq_sweep_result {
    std::vector<sweep_row> rows;
    std::vector<sparam_record> ant_rx; // 2-port slice, ports (Ant, Rx)
    std::vector<sparam_record> ant_tx; // 2-port slice, ports (Ant, Tx)
};

// Antenna-excited operating point at every axis value, fixed power.
freq_sweep_result run_freq_sweep(const run_config& cfg,
                                 const impedance_surface& surface, double p_dbm,
                                 double f_start_hz, double f_stop_hz,
                                 std::size_t points, bool closed_form_rx);

// Antenna-excited operating point at every power, fixed frequency; fills the
// delivered-power columns.
std::vector<sweep_row> run_power_sweep(const run_config& cfg,
                                       const impedance_surface& surface,
                                       double f_hz, double p_start_dbm,
                                       double p_stop_dbm, std::size_t points);

std::string sweep_rows_to_csv(const std::vector<sweep_row>& rows,
                              bool with_output_powers, bool with_closed_form);

namespace cli {

// Entry point shared by the binary and in-process tests. args excludes the
// program name. Exit codes: 0 success, 2 configuration/usage error, 3 solver
// non-convergence, 4 I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace cli

} // namespace nltr
