#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nltr/errors.hpp"

namespace nltr {

using cpx = std::complex<double>;

inline constexpr double k_boltzmann = 1.380649e-23;   // J/K (exact, SI 2019)
inline constexpr double q_electron  = 1.602176634e-19; // C   (exact, SI 2019)
inline constexpr double pi = 3.141592653589793238462643383279502884;

// kT/q in volts.
double thermal_voltage(double temperature_k);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

// Power conversions. Internal bookkeeping is in watts; dBm only at the edges.
double dbm_to_watts(double p_dbm);
double watts_to_dbm(double p_watts);

// 10*log10(r) for power ratios; r must be > 0.
double ratio_to_db(double ratio);
// 20*log10|v| for wave amplitudes; |v| must be > 0.
double amplitude_to_db(cpx v);

// Peak source voltage delivering available power p_watts from a source of
// real impedance r_source: V = 2*sqrt(2*P*R).
double source_peak_voltage(double p_watts, double r_source);

// Tagged complex immittance. The tag exists to catch Z/Y mixups at module
// boundaries; arithmetic-heavy internals use bare cpx.
struct immittance {
    enum class kind { impedance, admittance };

    cpx value{0.0, 0.0};
    kind as{kind::impedance};

    static immittance impedance(cpx z) { return {z, kind::impedance}; }
    static immittance admittance(cpx y) { return {y, kind::admittance}; }

    // Value converted to the requested view; reciprocal taken when the tag
    // differs. Reciprocal of 0 is flagged as a domain error (open/short has
    // no finite dual).
    cpx as_impedance() const;
    cpx as_admittance() const;
};

// Rectangular sweep grid: strictly increasing frequency axis in Hz and
// power axis in dBm.
struct grid2d {
    std::vector<double> f_hz;
    std::vector<double> p_dbm;

    std::size_t rows() const { return f_hz.size(); }   // frequency index
    std::size_t cols() const { return p_dbm.size(); }  // power index
};

// Linearly spaced grid with bit-exact endpoints. points >= 2 per axis,
// start < stop; violations raise config_error.
grid2d make_grid(double f_start_hz, double f_stop_hz, std::size_t f_points,
                 double p_start_dbm, double p_stop_dbm, std::size_t p_points);

// Linearly spaced axis with bit-exact endpoints (n >= 2, start < stop), the
// single-axis building block of make_grid, shared by the sweep commands.
std::vector<double> linspace(double start, double stop, std::size_t n);

} // namespace nltr
