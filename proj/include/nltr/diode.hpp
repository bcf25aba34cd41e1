#pragma once

#include <cstddef>

#include "nltr/units.hpp"

namespace nltr {

// One packaged Schottky diode: exponential junction with graded-junction
// capacitance, series r_s, package series inductance l_p and a package
// capacitance c_p across the (l_p + junction) branch.
struct diode_params {
    double i_s = 4e-8;          // A, saturation current
    double n_ideality = 1.05;   // dimensionless
    double r_s = 12.0;          // ohm, series resistance
    double c_j0 = 0.1e-12;      // F, zero-bias junction capacitance
    double v_j = 0.5;           // V, junction potential
    double m_grading = 0.35;    // dimensionless, 0 < m < 1
    double l_p = 2e-9;          // H, package series inductance
    double c_p = 0.08e-12;      // F, package parallel capacitance
    double temperature_k = 298.15;

    // Exponent clamp: above x_clamp the junction law continues linearly in v
    // so Newton overshoot cannot overflow. Converged physical solutions stay
    // below the clamp.
    static constexpr double x_clamp = 40.0;
    // Forward-bias capacitance knee as a fraction of v_j (SPICE f_c).
    static constexpr double f_c = 0.5;

    void validate() const; // throws config_error naming the field
};

// i(v) = i_s*expm1(v/(n*V_T)), linear continuation above the exponent clamp.
double diode_current(double v, const diode_params& d);
// di/dv of diode_current (constant above the clamp).
double diode_conductance(double v, const diode_params& d);
// c(v) = c_j0*(1 - v/v_j)^(-m) below the f_c*v_j knee, C1 linear extension above.
double junction_capacitance(double v, const diode_params& d);
// Exact antiderivative of junction_capacitance with q(0) = 0.
double junction_charge(double v, const diode_params& d);

// One NC block: n_series diodes per branch, n_branches antiparallel branches
// (alternating polarity, so n_branches must be even). The reference design
// uses eight diodes total, split 4x2.
struct nonlinear_circuit {
    diode_params diode;
    std::size_t n_series = 2;
    std::size_t n_branches = 4;

    std::size_t total_diodes() const { return n_series * n_branches; }
    void validate() const; // throws config_error naming the field
};

// All same-polarity branches of an NC collapse into one composite branch;
// the NC terminal then carries two antiparallel composite branches plus the
// lumped package capacitance. Scaling with m = n_series, q = n_branches/2:
// stack voltage scale m*n*V_T, i_s -> q*i_s, r -> m*r_s/q, l -> m*l_p/q,
// c_j0 -> q*c_j0/m, v_j -> m*v_j, and c_p of both polarities at the terminal
// -> n_branches*c_p/m.
struct polarity_lump {
    double i_s_q;      // A
    double n_vt;       // V, stack voltage scale m*n*V_T
    double r_q;        // ohm
    double l_q;        // H
    double c_j0_q;     // F
    double v_j_b;      // V
    double m_grading;  // unchanged
    double c_p_total;  // F, both polarities, at the NC terminal

    // Junction laws of the composite branch (same shapes as the single diode).
    double current(double v) const;
    double conductance(double v) const;
    double capacitance(double v) const;
    double charge(double v) const;
};

polarity_lump make_lump(const nonlinear_circuit& nc);

} // namespace nltr
