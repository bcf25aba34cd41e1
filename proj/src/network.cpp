#include "nltr/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nltr {

void transmission_line::validate() const {
    if (!(z0 > 0.0))
        throw config_error("line z0 must be > 0 ohm");
    if (!(theta_ref_deg > 0.0) || !(theta_ref_deg < 180.0))
        throw config_error("line theta_deg must lie in (0, 180) degrees");
    if (!(f_ref_hz > 0.0))
        throw config_error("line f_ref_hz must be > 0 Hz");
}

double transmission_line::electrical_length_rad(double f_hz) const {
    if (!(f_hz > 0.0))
        throw domain_error("electrical_length: frequency must be > 0 Hz");
    return deg_to_rad(theta_ref_deg) * (f_hz / f_ref_hz);
}

two_port_abcd line_abcd(const transmission_line& line, double f_hz) {
    const double theta = line.electrical_length_rad(f_hz);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    two_port_abcd m;
    m.a = cpx{ct, 0.0};
    m.b = cpx{0.0, line.z0 * st};
    m.c = cpx{0.0, st / line.z0};
    m.d = cpx{ct, 0.0};
    return m;
}

two_port_abcd series_abcd(cpx z) {
    two_port_abcd m;
    m.b = z;
    return m;
}

two_port_abcd shunt_abcd(cpx y) {
    two_port_abcd m;
    m.c = y;
    return m;
}

two_port_abcd abcd_cascade(const std::vector<two_port_abcd>& stages) {
    if (stages.empty())
        throw domain_error("abcd_cascade: need at least one stage");
    two_port_abcd acc = stages.front();
    for (std::size_t i = 1; i < stages.size(); ++i) {
        const two_port_abcd& s = stages[i];
        two_port_abcd next;
        next.a = acc.a * s.a + acc.b * s.c;
        next.b = acc.a * s.b + acc.b * s.d;
        next.c = acc.c * s.a + acc.d * s.c;
        next.d = acc.c * s.b + acc.d * s.d;
        acc = next;
    }
    return acc;
}

cpx line_input_impedance(const transmission_line& line, double f_hz, cpx z_load) {
    const double theta = line.electrical_length_rad(f_hz);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const cpx j{0.0, 1.0};
    return line.z0 * (z_load * ct + j * line.z0 * st) /
           (line.z0 * ct + j * z_load * st);
}

sparams abcd_to_sparams(const two_port_abcd& m, double z_ref) {
    if (!(z_ref > 0.0))
        throw domain_error("abcd_to_sparams: reference impedance must be > 0 ohm");
    const cpx denom = m.a + m.b / z_ref + m.c * z_ref + m.d;
    if (std::abs(denom) < 1e-12)
        throw domain_error("abcd_to_sparams: singular network");
    sparams s;
    s.z_ref = z_ref;
    s.s11 = (m.a + m.b / z_ref - m.c * z_ref - m.d) / denom;
    s.s21 = 2.0 * m.determinant() / denom;
    s.s12 = 2.0 / denom;
    s.s22 = (-m.a + m.b / z_ref - m.c * z_ref + m.d) / denom;
    return s;
}

void switch_design::validate() const {
    it1.validate();
    it2.validate();
    it3.validate();
    for (const auto& nc : ncs) nc.validate();
    if (!(z_p > 0.0))
        throw config_error("z_p must be > 0 ohm");
}

immittance loaded_line_admittance(const transmission_line& line,
                                  const immittance& load, double f_hz) {
    const cpx z_l = load.as_impedance();
    const double theta = line.electrical_length_rad(f_hz);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const cpx j{0.0, 1.0};
    const cpx y = (line.z0 * ct + j * z_l * st) /
                  (line.z0 * (z_l * ct + j * line.z0 * st));
    return immittance::admittance(y);
}

immittance total_admittance(const switch_design& design, double f_hz,
                            const std::array<cpx, 4>& znc) {
    const cpx y1 = loaded_line_admittance(
                       design.it1, immittance::impedance(znc[0] + design.z_p), f_hz)
                       .as_admittance();
    const cpx y2 = loaded_line_admittance(design.it2,
                                          immittance::impedance(znc[1]), f_hz)
                       .as_admittance();
    const cpx y3 = loaded_line_admittance(design.it3,
                                          immittance::impedance(znc[2]), f_hz)
                       .as_admittance();
    return immittance::admittance(y1 + y2 + y3);
}

sparams tx_mode_sparams(const switch_design& design, double f_hz,
                        const std::array<cpx, 4>& znc) {
    const cpx yt = total_admittance(design, f_hz, znc).as_admittance();
    const cpx denom = 2.0 + yt * design.z_p;
    if (std::abs(denom) < 1e-12)
        throw domain_error("tx_mode_sparams: singular network");
    sparams s;
    s.z_ref = design.z_p;
    s.s11 = -yt * design.z_p / denom;
    s.s21 = 2.0 / denom;
    s.s12 = s.s21;
    s.s22 = s.s11;
    return s;
}

std::pair<cpx, cpx> rx_mode_closed_form(const switch_design& design, double f_hz,
                                        const std::array<cpx, 4>& znc) {
    const double theta1 = design.it1.electrical_length_rad(f_hz);
    const cpx y2 = loaded_line_admittance(design.it2,
                                          immittance::impedance(znc[1]), f_hz)
                       .as_admittance();
    const cpx j{0.0, 1.0};
    const cpx c1 = std::cos(theta1) + j * design.it1.z0 * y2 * std::sin(theta1);
    const cpx c2 = j * design.it1.z0 * std::sin(theta1);
    return {c1, c2};
}

namespace {

cpx parallel(cpx z1, cpx z2) { return z1 * z2 / (z1 + z2); }

// Far-end (v, i) of an ideal line given the near-end pair; valid in both
// directions because a uniform line's chain matrix is symmetric (a == d).
void walk_line(const transmission_line& line, double f_hz, cpx v_in, cpx i_in,
               cpx& v_out, cpx& i_out) {
    const two_port_abcd m = line_abcd(line, f_hz);
    v_out = m.d * v_in - m.b * i_in;
    i_out = -m.c * v_in + m.a * i_in;
}

double shunt_power(cpx v, cpx z) {
    if (z == cpx{0.0, 0.0}) return 0.0; // ideal short dissipates nothing
    return 0.5 * std::norm(v) * (1.0 / z).real();
}

// Input impedance of branch 1 seen from the antenna node, Tx port terminated.
cpx branch1_input(const switch_design& d, double f_hz, const std::array<cpx, 4>& znc,
                  cpx& zin_stub, cpx& z_tx_node) {
    zin_stub = line_input_impedance(d.it2, f_hz, znc[1]);
    z_tx_node = parallel(cpx{d.z_p, 0.0}, zin_stub);
    return line_input_impedance(d.it1, f_hz, znc[0] + z_tx_node);
}

// Input impedance of branch 3 seen from the antenna node, Rx port terminated.
cpx branch3_input(const switch_design& d, double f_hz, const std::array<cpx, 4>& znc,
                  cpx& z_rx_node) {
    const cpx z_ncs = parallel(znc[2], znc[3]);
    z_rx_node = parallel(cpx{d.z_p, 0.0}, z_ncs);
    return line_input_impedance(d.it3, f_hz, z_rx_node);
}

} // namespace

const char* port_name(port p) {
    switch (p) {
        case port::ant: return "Ant";
        case port::tx: return "Tx";
        case port::rx: return "Rx";
    }
    return "?";
}

const char* mode_name(switch_mode m) {
    switch (m) {
        case switch_mode::tx: return "Tx";
        case switch_mode::rx: return "Rx";
        case switch_mode::transition: return "Transition";
    }
    return "?";
}

network_solution solve_three_port(const switch_design& design, double f_hz,
                                  const std::array<cpx, 4>& znc, port excited,
                                  double p_available_dbm) {
    design.validate();
    if (!(f_hz > 0.0))
        throw domain_error("solve_three_port: frequency must be > 0 Hz");

    network_solution sol;
    sol.excited = excited;
    sol.f_hz = f_hz;
    sol.p_available_watts = dbm_to_watts(p_available_dbm);
    sol.v_source_peak = source_peak_voltage(sol.p_available_watts, design.z_p);
    const double vs = sol.v_source_peak;
    const double zp = design.z_p;

    cpx zin_stub, z_tx_node, z_rx_node;
    const cpx zin_b1 = branch1_input(design, f_hz, znc, zin_stub, z_tx_node);
    const cpx zin_b3 = branch3_input(design, f_hz, znc, z_rx_node);

    cpx v_ant, v_tx, v_rx; // node voltages at the three port nodes
    cpx i_nc1;             // current through the series NC slot
    cpx v_nc2;             // voltage across the grounded stub NC

    auto walk_branch1_from_ant = [&](cpx v_a) {
        cpx i_in = v_a / zin_b1;
        cpx v_b, i_b;
        walk_line(design.it1, f_hz, v_a, i_in, v_b, i_b);
        i_nc1 = i_b;
        v_tx = v_b - znc[0] * i_b;
        cpx i_stub = v_tx / zin_stub;
        cpx v_d, i_d;
        walk_line(design.it2, f_hz, v_tx, i_stub, v_d, i_d);
        v_nc2 = v_d;
    };
    auto walk_branch3_from_ant = [&](cpx v_a) {
        cpx i_in = v_a / zin_b3;
        cpx v_r, i_r;
        walk_line(design.it3, f_hz, v_a, i_in, v_r, i_r);
        v_rx = v_r;
    };

    switch (excited) {
        case port::ant: {
            const cpx z_node = parallel(zin_b1, zin_b3);
            v_ant = vs * z_node / (z_node + zp);
            walk_branch1_from_ant(v_ant);
            walk_branch3_from_ant(v_ant);
            break;
        }
        case port::tx: {
            const cpx z_ant_node = parallel(cpx{zp, 0.0}, zin_b3);
            const cpx z_b_in = line_input_impedance(design.it1, f_hz, z_ant_node);
            const cpx z_toward_ant = znc[0] + z_b_in;
            const cpx z_node = parallel(zin_stub, z_toward_ant);
            v_tx = vs * z_node / (z_node + zp);
            i_nc1 = v_tx / z_toward_ant;
            const cpx v_b = v_tx - znc[0] * i_nc1;
            cpx i_a_out;
            walk_line(design.it1, f_hz, v_b, i_nc1, v_ant, i_a_out);
            walk_branch3_from_ant(v_ant);
            {
                cpx i_stub = v_tx / zin_stub;
                cpx v_d, i_d;
                walk_line(design.it2, f_hz, v_tx, i_stub, v_d, i_d);
                v_nc2 = v_d;
            }
            break;
        }
        case port::rx: {
            const cpx z_ant_node = parallel(cpx{zp, 0.0}, zin_b1);
            const cpx z_toward_ant = line_input_impedance(design.it3, f_hz, z_ant_node);
            const cpx z_ncs = parallel(znc[2], znc[3]);
            const cpx z_node = parallel(z_ncs, z_toward_ant);
            v_rx = vs * z_node / (z_node + zp);
            const cpx i_line = v_rx / z_toward_ant;
            cpx i_a_out;
            walk_line(design.it3, f_hz, v_rx, i_line, v_ant, i_a_out);
            walk_branch1_from_ant(v_ant);
            break;
        }
    }

    sol.s[0] = 2.0 * v_ant / vs;
    sol.s[1] = 2.0 * v_tx / vs;
    sol.s[2] = 2.0 * v_rx / vs;
    sol.s[static_cast<std::size_t>(excited)] -= 1.0;

    sol.p_nc_watts[0] = 0.5 * std::norm(i_nc1) * znc[0].real();
    sol.p_nc_watts[1] = shunt_power(v_nc2, znc[1]);
    sol.p_nc_watts[2] = shunt_power(v_rx, znc[2]);
    sol.p_nc_watts[3] = shunt_power(v_rx, znc[3]);

    sol.p_port_watts[0] = 0.5 * std::norm(v_ant) / zp;
    sol.p_port_watts[1] = 0.5 * std::norm(v_tx) / zp;
    sol.p_port_watts[2] = 0.5 * std::norm(v_rx) / zp;
    const std::size_t e = static_cast<std::size_t>(excited);
    sol.p_port_watts[e] =
        sol.p_available_watts * (1.0 - std::norm(sol.s[e]));

    return sol;
}

sparams rx_mode_sparams_abcd(const switch_design& design, double f_hz,
                             const std::array<cpx, 4>& znc) {
    cpx zin_stub, z_tx_node;
    const cpx zin_b1 = branch1_input(design, f_hz, znc, zin_stub, z_tx_node);
    const cpx y_b1 = 1.0 / zin_b1;
    const cpx y_rx = 1.0 / znc[2] + 1.0 / znc[3];
    const two_port_abcd m = abcd_cascade(
        {shunt_abcd(y_b1), line_abcd(design.it3, f_hz), shunt_abcd(y_rx)});
    return abcd_to_sparams(m, design.z_p);
}

void operating_point_settings::validate() const {
    if (!(relaxation > 0.0) || !(relaxation <= 1.0))
        throw config_error("operating_point.relaxation must lie in (0, 1]");
    if (!(tolerance_db > 0.0))
        throw config_error("operating_point.tolerance_db must be > 0");
    if (max_iterations < 1)
        throw config_error("operating_point.max_iterations must be >= 1");
    if (!(nominal_path_loss_db >= 0.0))
        throw config_error("operating_point.nominal_path_loss_db must be >= 0");
    if (!(mode_threshold_db >= 0.0))
        throw config_error("operating_point.mode_threshold_db must be >= 0");
}

sparams pair_sparams(const operating_point& op, port p1, port p2) {
    const std::size_t a = static_cast<std::size_t>(p1);
    const std::size_t b = static_cast<std::size_t>(p2);
    sparams s;
    s.s11 = op.s_frozen[a][a];
    s.s21 = op.s_frozen[b][a];
    s.s12 = op.s_frozen[a][b];
    s.s22 = op.s_frozen[b][b];
    return s;
}

namespace {

constexpr double local_power_floor_dbm = -70.0; // keeps dB arithmetic finite
constexpr double local_power_cap_dbm = 40.0;

double delivered_dbm(double watts) {
    if (!(watts > 0.0)) return local_power_floor_dbm;
    return std::clamp(watts_to_dbm(watts), local_power_floor_dbm,
                      local_power_cap_dbm);
}

// Attenuation in dB of a transmission coefficient; clipped at 200 dB so an
// exact null stays finite and comparable.
double attenuation_db(cpx s) {
    const double mag = std::abs(s);
    if (!(mag > 1e-10)) return 200.0;
    return -20.0 * std::log10(mag);
}

switch_mode classify_mode(port excited, const std::array<double, 3>& p_port,
                          double threshold_db) {
    // Tx-path terminus vs Rx-path terminus as seen from the excited port.
    double p_tx_path, p_rx_path;
    switch (excited) {
        case port::ant:
            p_tx_path = p_port[1];
            p_rx_path = p_port[2];
            break;
        case port::tx:
            p_tx_path = p_port[0];
            p_rx_path = p_port[2];
            break;
        case port::rx:
            p_tx_path = p_port[1];
            p_rx_path = p_port[0];
            break;
        default:
            return switch_mode::transition;
    }
    if (excited == port::rx) {
        // For an Rx-side probe the functioning path delivers to the antenna.
        if (p_rx_path <= 0.0 && p_tx_path <= 0.0) return switch_mode::transition;
        if (p_tx_path <= 0.0) return switch_mode::rx;
        if (p_rx_path <= 0.0) return switch_mode::tx;
        const double margin = 10.0 * std::log10(p_rx_path / p_tx_path);
        if (margin >= threshold_db) return switch_mode::rx;
        if (-margin >= threshold_db) return switch_mode::tx;
        return switch_mode::transition;
    }
    if (p_tx_path <= 0.0 && p_rx_path <= 0.0) return switch_mode::transition;
    if (p_rx_path <= 0.0) return switch_mode::tx;
    if (p_tx_path <= 0.0) return switch_mode::rx;
    const double margin = 10.0 * std::log10(p_tx_path / p_rx_path);
    if (margin >= threshold_db) return switch_mode::tx;
    if (-margin >= threshold_db) return switch_mode::rx;
    return switch_mode::transition;
}

} // namespace

operating_point solve_operating_point(const switch_design& design,
                                      const surface_set& surfaces, double f_hz,
                                      port excited, double excitation_dbm,
                                      const operating_point_settings& settings) {
    design.validate();
    settings.validate();
    for (std::size_t i = 0; i < surfaces.size(); ++i)
        if (surfaces[i] == nullptr)
            throw config_error("solve_operating_point: surface slot " +
                               std::to_string(i) + " is unbound");

    operating_point op;
    op.excited = excited;
    op.excitation_dbm = excitation_dbm;
    op.f_hz = f_hz;

    std::array<double, 4> p_local{};
    p_local.fill(std::clamp(excitation_dbm - settings.nominal_path_loss_db,
                            local_power_floor_dbm, local_power_cap_dbm));

    std::array<cpx, 4> znc{};
    network_solution sol;
    std::vector<double> trace;

    if (!settings.self_consistent) {
        for (std::size_t i = 0; i < 4; ++i)
            znc[i] = interpolate_power_clamped(*surfaces[i], f_hz, excitation_dbm);
        sol = solve_three_port(design, f_hz, znc, excited, excitation_dbm);
        for (std::size_t i = 0; i < 4; ++i)
            p_local[i] = delivered_dbm(sol.p_nc_watts[i]);
        op.iterations = 0;
        op.residual_db = 0.0;
    } else {
        bool converged = false;
        for (std::size_t it = 0; it < settings.max_iterations; ++it) {
            for (std::size_t i = 0; i < 4; ++i)
                znc[i] = interpolate_power_clamped(*surfaces[i], f_hz, p_local[i]);
            sol = solve_three_port(design, f_hz, znc, excited, excitation_dbm);

            double delta = 0.0;
            std::array<double, 4> p_new{};
            for (std::size_t i = 0; i < 4; ++i) {
                p_new[i] = delivered_dbm(sol.p_nc_watts[i]);
                delta = std::max(delta, std::abs(p_new[i] - p_local[i]));
            }
            trace.push_back(delta);
            for (std::size_t i = 0; i < 4; ++i)
                p_local[i] += settings.relaxation * (p_new[i] - p_local[i]);
            op.iterations = it + 1;
            op.residual_db = delta;
            if (delta < settings.tolerance_db) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw non_convergence(
                "operating point did not settle within " +
                    std::to_string(settings.max_iterations) + " iterations at f=" +
                    std::to_string(f_hz) + " Hz, P=" + std::to_string(excitation_dbm) +
                    " dBm (last residual " + std::to_string(op.residual_db) + " dB)",
                trace);
    }

    op.z_nc = znc;
    op.p_nc_dbm = p_local;
    op.p_port_watts = sol.p_port_watts;
    op.mode = classify_mode(excited, sol.p_port_watts, settings.mode_threshold_db);

    // Frozen-network probes from all three ports fill the reciprocal S-matrix.
    for (std::size_t from = 0; from < 3; ++from) {
        const network_solution probe = solve_three_port(
            design, f_hz, znc, static_cast<port>(from), excitation_dbm);
        for (std::size_t to = 0; to < 3; ++to) op.s_frozen[to][from] = probe.s[to];
    }

    op.il_ant_rx_db = attenuation_db(op.s_frozen[2][0]);
    op.il_ant_tx_db = attenuation_db(op.s_frozen[1][0]);
    op.isolation_db = attenuation_db(op.s_frozen[2][1]);
    const std::size_t e = static_cast<std::size_t>(excited);
    op.rl_db = attenuation_db(op.s_frozen[e][e]);
    return op;
}

} // namespace nltr
