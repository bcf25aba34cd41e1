#include "nltr/units.hpp"

#include <cmath>
#include <string>

namespace nltr {

double thermal_voltage(double temperature_k) {
    if (!(temperature_k > 0.0))
        throw domain_error("thermal_voltage: temperature must be > 0 K");
    return k_boltzmann * temperature_k / q_electron;
}

double deg_to_rad(double deg) { return deg * (pi / 180.0); }
double rad_to_deg(double rad) { return rad * (180.0 / pi); }

double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

double watts_to_dbm(double p_watts) {
    if (!(p_watts > 0.0))
        throw domain_error("watts_to_dbm: power must be > 0 W");
    return 10.0 * std::log10(p_watts) + 30.0;
}

double ratio_to_db(double ratio) {
    if (!(ratio > 0.0))
        throw domain_error("ratio_to_db: ratio must be > 0");
    return 10.0 * std::log10(ratio);
}

double amplitude_to_db(cpx v) {
    const double mag = std::abs(v);
    if (!(mag > 0.0))
        throw domain_error("amplitude_to_db: |value| must be > 0");
    return 20.0 * std::log10(mag);
}

double source_peak_voltage(double p_watts, double r_source) {
    if (!(p_watts >= 0.0))
        throw domain_error("source_peak_voltage: power must be >= 0 W");
    if (!(r_source > 0.0))
        throw domain_error("source_peak_voltage: source impedance must be > 0 ohm");
    return 2.0 * std::sqrt(2.0 * p_watts * r_source);
}

cpx immittance::as_impedance() const {
    if (as == kind::impedance) return value;
    if (value == cpx{0.0, 0.0})
        throw domain_error("immittance: zero admittance has no finite impedance");
    return 1.0 / value;
}

cpx immittance::as_admittance() const {
    if (as == kind::admittance) return value;
    if (value == cpx{0.0, 0.0})
        throw domain_error("immittance: zero impedance has no finite admittance");
    return 1.0 / value;
}

std::vector<double> linspace(double start, double stop, std::size_t n) {
    if (n < 2)
        throw config_error("linspace: need at least 2 points, got " + std::to_string(n));
    if (!(start < stop))
        throw config_error("linspace: start must be < stop");
    std::vector<double> out(n);
    const double span = stop - start;
    for (std::size_t i = 0; i + 1 < n; ++i)
        out[i] = start + span * (static_cast<double>(i) / static_cast<double>(n - 1));
    out[0] = start;       // endpoints reproduce the requested bounds bit-exactly
    out[n - 1] = stop;
    return out;
}

grid2d make_grid(double f_start_hz, double f_stop_hz, std::size_t f_points,
                 double p_start_dbm, double p_stop_dbm, std::size_t p_points) {
    if (!(f_start_hz > 0.0))
        throw config_error("make_grid: frequency axis must be positive");
    grid2d g;
    try {
        g.f_hz = linspace(f_start_hz, f_stop_hz, f_points);
    } catch (const config_error& e) {
        throw config_error(std::string("make_grid: frequency axis: ") + e.what());
    }
    try {
        g.p_dbm = linspace(p_start_dbm, p_stop_dbm, p_points);
    } catch (const config_error& e) {
        throw config_error(std::string("make_grid: power axis: ") + e.what());
    }
    return g;
}

} // namespace nltr
