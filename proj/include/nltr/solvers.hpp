#pragma once

#include <cstddef>

#include "nltr/diode.hpp"
#include "nltr/units.hpp"

namespace nltr {

// Single-tone drive: available power p_dbm from a real source impedance.
struct drive_spec {
    double f_hz = 1e9;
    double p_dbm = -30.0;
    double r_source = 50.0;

    void validate() const;
};

struct steady_state_result {
    cpx z_fundamental{0.0, 0.0}; // V1/I1 at the NC terminal, ohms
    double v1_amplitude = 0.0;   // |V1| peak, volts
    double i1_amplitude = 0.0;   // |I1| peak, amperes
    std::size_t iterations = 0;  // Newton iterations (HB) / periods (transient)
    double residual = 0.0;       // final relative fundamental change
};

enum class solver_kind { hb, transient };

struct solver_settings {
    solver_kind kind = solver_kind::hb;
    std::size_t hb_harmonics = 10;             // H: DC + harmonics 1..H
    std::size_t hb_samples = 256;              // K time samples per period
    double tol = 1e-6;                         // relative fundamental change
    std::size_t max_iterations = 200;          // Newton cap per HB solve
    std::size_t transient_steps_per_period = 512;
    std::size_t transient_max_periods = 400;

    void validate() const;
};

// Linear AC impedance of the lumped NC at zero bias: package capacitance in
// parallel with two antiparallel branches of r_q + jwl_q + junction(g0, c_j0).
cpx small_signal_impedance(const polarity_lump& lump, double f_hz);

// Frequency-domain steady state by single-tone harmonic balance on the
// forward composite branch (antiparallel symmetry folds the reverse branch
// in: even terminal harmonics cancel, odd ones see both branches). Drives
// above -10 dBm are reached by a deterministic 5 dB source-power ramp with
// warm starts; the truncated system has spurious high-drive solutions that a
// cold Newton start can land on, and the ramp tracks the physical branch.
steady_state_result describing_function_impedance(const nonlinear_circuit& nc,
                                                  const drive_spec& drive,
                                                  const solver_settings& settings);

// Time-domain oracle: full two-branch DAE (no symmetry assumption),
// trapezoidal rule on the charge/flux form, Newton per step, integrated
// until the fundamental phasors of two successive periods agree.
steady_state_result transient_steady_state(const nonlinear_circuit& nc,
                                           const drive_spec& drive,
                                           const solver_settings& settings);

// Dispatch on settings.kind.
steady_state_result solve_nc_impedance(const nonlinear_circuit& nc,
                                       const drive_spec& drive,
                                       const solver_settings& settings);

} // namespace nltr
