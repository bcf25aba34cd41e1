#include "nltr/diode.hpp"

#include <cmath>
#include <string>

namespace nltr {

void diode_params::validate() const {
    if (!(i_s > 0.0)) throw config_error("diode.IS must be > 0");
    if (!(n_ideality > 0.0)) throw config_error("diode.N must be > 0");
    if (!(r_s >= 0.0)) throw config_error("diode.RS must be >= 0");
    if (!(c_j0 > 0.0)) throw config_error("diode.CJ0 must be > 0");
    if (!(v_j > 0.0)) throw config_error("diode.VJ must be > 0");
    if (!(m_grading > 0.0 && m_grading < 1.0)) throw config_error("diode.M must be in (0, 1)");
    if (!(l_p >= 0.0)) throw config_error("diode.LP must be >= 0");
    if (!(c_p >= 0.0)) throw config_error("diode.CP must be >= 0");
    if (!(temperature_k > 0.0)) throw config_error("diode.TEMP_K must be > 0");
}

namespace {

// Shared junction laws in terms of (i_s, n_vt) and (c_j0, v_j, m).
double junction_i(double v, double i_s, double n_vt) {
    const double x = v / n_vt;
    if (x <= diode_params::x_clamp)
        return i_s * std::expm1(x);
    const double i_c = i_s * std::expm1(diode_params::x_clamp);
    const double g_c = i_s * std::exp(diode_params::x_clamp) / n_vt;
    return i_c + g_c * (v - diode_params::x_clamp * n_vt);
}

double junction_g(double v, double i_s, double n_vt) {
    const double x = std::min(v / n_vt, diode_params::x_clamp);
    return i_s * std::exp(x) / n_vt;
}

double junction_c(double v, double c_j0, double v_j, double m) {
    const double v_k = diode_params::f_c * v_j;
    if (v < v_k)
        return c_j0 * std::pow(1.0 - v / v_j, -m);
    const double c_k = c_j0 * std::pow(1.0 - diode_params::f_c, -m);
    const double slope = c_k * m / (v_j * (1.0 - diode_params::f_c));
    return c_k + slope * (v - v_k);
}

double junction_q(double v, double c_j0, double v_j, double m) {
    // Antiderivative of junction_c, continuous at the knee, q(0) = 0.
    const double v_k = diode_params::f_c * v_j;
    const double lead = c_j0 * v_j / (1.0 - m);
    if (v < v_k)
        return lead * (1.0 - std::pow(1.0 - v / v_j, 1.0 - m));
    const double q_k = lead * (1.0 - std::pow(1.0 - diode_params::f_c, 1.0 - m));
    const double c_k = c_j0 * std::pow(1.0 - diode_params::f_c, -m);
    const double slope = c_k * m / (v_j * (1.0 - diode_params::f_c));
    const double dv = v - v_k;
    return q_k + c_k * dv + 0.5 * slope * dv * dv;
}

} // namespace

double diode_current(double v, const diode_params& d) {
    return junction_i(v, d.i_s, d.n_ideality * thermal_voltage(d.temperature_k));
}

double diode_conductance(double v, const diode_params& d) {
    return junction_g(v, d.i_s, d.n_ideality * thermal_voltage(d.temperature_k));
}

double junction_capacitance(double v, const diode_params& d) {
    return junction_c(v, d.c_j0, d.v_j, d.m_grading);
}

double junction_charge(double v, const diode_params& d) {
    return junction_q(v, d.c_j0, d.v_j, d.m_grading);
}

void nonlinear_circuit::validate() const {
    diode.validate();
    if (n_series < 1) throw config_error("nc.series_per_branch must be >= 1");
    if (n_branches < 2 || n_branches % 2 != 0)
        throw config_error("nc.antiparallel_branches must be an even count >= 2");
}

double polarity_lump::current(double v) const { return junction_i(v, i_s_q, n_vt); }
double polarity_lump::conductance(double v) const { return junction_g(v, i_s_q, n_vt); }
double polarity_lump::capacitance(double v) const { return junction_c(v, c_j0_q, v_j_b, m_grading); }
double polarity_lump::charge(double v) const { return junction_q(v, c_j0_q, v_j_b, m_grading); }

polarity_lump make_lump(const nonlinear_circuit& nc) {
    nc.validate();
    const double m = static_cast<double>(nc.n_series);
    const double q = static_cast<double>(nc.n_branches) / 2.0;
    const diode_params& d = nc.diode;
    polarity_lump lump;
    lump.i_s_q = q * d.i_s;
    lump.n_vt = m * d.n_ideality * thermal_voltage(d.temperature_k);
    lump.r_q = m * d.r_s / q;
    lump.l_q = m * d.l_p / q;
    lump.c_j0_q = q * d.c_j0 / m;
    lump.v_j_b = m * d.v_j;
    lump.m_grading = d.m_grading;
    lump.c_p_total = static_cast<double>(nc.n_branches) * d.c_p / m;
    return lump;
}

} // namespace nltr
