#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "nltr/diode.hpp"
#include "nltr/surface.hpp"
#include "nltr/units.hpp"

namespace nltr {

// Ideal TEM line: electrical length scales linearly with frequency.
struct transmission_line {
    double z0 = 50.0;        // characteristic impedance, ohm
    double theta_ref_deg = 90.0; // electrical length at f_ref_hz
    double f_ref_hz = 1e9;

    void validate() const; // z0 > 0, theta_ref in (0, 180), f_ref > 0
    double electrical_length_rad(double f_hz) const;
};

// Chain matrix: [v1; i1] = [[a, b], [c, d]] [v2; i2], i2 flowing out of port 2.
// Reciprocal stages satisfy a*d - b*c = 1.
struct two_port_abcd {
    cpx a{1.0, 0.0};
    cpx b{0.0, 0.0};
    cpx c{0.0, 0.0};
    cpx d{1.0, 0.0};

    cpx determinant() const { return a * d - b * c; }
};

two_port_abcd line_abcd(const transmission_line& line, double f_hz);
two_port_abcd series_abcd(cpx z);
two_port_abcd shunt_abcd(cpx y);
two_port_abcd abcd_cascade(const std::vector<two_port_abcd>& stages);

// Input impedance of the line terminated by z_load (cos/sin form, regular at
// quarter-wave where it reduces to z0^2 / z_load).
cpx line_input_impedance(const transmission_line& line, double f_hz, cpx z_load);

struct sparams {
    cpx s11{0.0, 0.0};
    cpx s21{0.0, 0.0};
    cpx s12{0.0, 0.0};
    cpx s22{0.0, 0.0};
    double z_ref = 50.0;
};

// Standard ABCD -> S conversion with equal real reference impedance.
sparams abcd_to_sparams(const two_port_abcd& m, double z_ref);

// Three lines, four identical-by-default NC slots, common port impedance.
// Topology: antenna node A; it1 runs A->B; nc[0] sits in series B->C with the
// Tx port and the (it2 -> grounded nc[1]) stub both at C; it3 runs A->R with
// nc[2], nc[3] grounded shunts at R and the Rx port at R.
struct switch_design {
    transmission_line it1{89.0, 28.0, 1e9};
    transmission_line it2{97.0, 86.0, 1e9};
    transmission_line it3{84.0, 25.0, 1e9};
    std::array<nonlinear_circuit, 4> ncs{};
    double z_p = 50.0;

    void validate() const;
};

// Branch admittance of a loaded line, Y = (z0 cos t + j z_l sin t) /
// (z0 (z_l cos t + j z0 sin t)). The caller supplies the branch load.
immittance loaded_line_admittance(const transmission_line& line,
                                  const immittance& load, double f_hz);

// Sum of the three one-branch admittances with loads znc1 + z_p, znc2, znc3.
immittance total_admittance(const switch_design& design, double f_hz,
                            const std::array<cpx, 4>& znc);

// Single-shunt closed form at the antenna node: s11 = -yt zp / (2 + yt zp),
// s21 = 2 / (2 + yt zp).
sparams tx_mode_sparams(const switch_design& design, double f_hz,
                        const std::array<cpx, 4>& znc);

// Unnormalized low-power coefficients (c1, c2) of the it1 line loaded by the
// branch-2 shunt: c1 = cos t1 + j z_it1 y2 sin t1, c2 = j z_it1 sin t1. These
// are the a and b entries of cascade(line it1, shunt y2); c2 carries ohm
// units, so the dimensionally sound path is rx_mode_sparams_abcd.
std::pair<cpx, cpx> rx_mode_closed_form(const switch_design& design, double f_hz,
                                        const std::array<cpx, 4>& znc);

// Ant->Rx two-port with the Tx port absorbed as a z_p termination:
// shunt(branch 1) * line(it3) * shunt(1/znc3 + 1/znc4), converted to S at z_p.
sparams rx_mode_sparams_abcd(const switch_design& design, double f_hz,
                             const std::array<cpx, 4>& znc);

enum class port : std::size_t { ant = 0, tx = 1, rx = 2 };
enum class switch_mode { tx, rx, transition };

const char* port_name(port p);
const char* mode_name(switch_mode m);

// Exact linear solution of the three-port with frozen NC impedances and one
// excited port (the other two terminated in z_p).
struct network_solution {
    port excited = port::ant;
    double f_hz = 0.0;
    double p_available_watts = 0.0;
    double v_source_peak = 0.0;
    // s[k] = wave transmitted to port k from the excited port; at k == excited
    // it is the reflection coefficient.
    std::array<cpx, 3> s{};
    // Average power delivered to each z_p termination; the excited slot holds
    // the power accepted by the network, p_avail (1 - |s_ee|^2).
    std::array<double, 3> p_port_watts{};
    // Average power dissipated in each NC slot.
    std::array<double, 4> p_nc_watts{};
};

network_solution solve_three_port(const switch_design& design, double f_hz,
                                  const std::array<cpx, 4>& znc, port excited,
                                  double p_available_dbm);

struct operating_point_settings {
    double relaxation = 0.5;       // damping factor on local-power updates
    double tolerance_db = 0.05;    // max per-NC power change at convergence
    std::size_t max_iterations = 100;
    double nominal_path_loss_db = 3.0; // seed = excitation - this
    double mode_threshold_db = 3.0;    // dominance margin for Tx/Rx labels
    bool self_consistent = true;       // false: index surfaces at excitation

    void validate() const;
};

using surface_set = std::array<const impedance_surface*, 4>;

struct operating_point {
    switch_mode mode = switch_mode::transition;
    port excited = port::ant;
    double excitation_dbm = 0.0;
    double f_hz = 0.0;
    std::array<cpx, 4> z_nc{};
    std::array<double, 4> p_nc_dbm{};   // converged local (delivered) powers
    std::array<double, 3> p_port_watts{}; // excited slot = accepted power
    // Full reciprocal S-matrix of the frozen network at the converged point:
    // s_frozen[to][from], port order ant, tx, rx.
    std::array<std::array<cpx, 3>, 3> s_frozen{};
    double il_ant_rx_db = 0.0;
    double il_ant_tx_db = 0.0;
    double isolation_db = 0.0; // Tx<->Rx attenuation of the frozen network
    double rl_db = 0.0;        // return loss at the excited port
    std::size_t iterations = 0;
    double residual_db = 0.0;  // last undamped max per-NC power change
};

// Two-port slice of the frozen S-matrix for the (p1, p2) port pairing.
sparams pair_sparams(const operating_point& op, port p1, port p2);

// Damped fixed-point iteration on per-NC local powers; throws non_convergence
// (carrying the residual trace) if tolerance_db is not met in max_iterations.
operating_point solve_operating_point(const switch_design& design,
                                      const surface_set& surfaces, double f_hz,
                                      port excited, double excitation_dbm,
                                      const operating_point_settings& settings);

} // namespace nltr
