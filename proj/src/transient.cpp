#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "nltr/solvers.hpp"

namespace nltr {

namespace {

// State vector y = [v_t, i_f, v_f, i_r, v_r]:
//   v_t terminal voltage, (i_f, v_f) forward-branch inductor current and
//   junction voltage, (i_r, v_r) the same for the reversed branch (its
//   junction forward direction points from ground into the terminal, so it
//   enters terminal KCL with opposite sign).
//
// Conservation form: d/dt [c_pt*v_t, l_q*i_f, q_j(v_f), l_q*i_r, q_j(v_r)]
//                    = f(y, t), integrated by the trapezoidal rule on rows
// whose mass coefficient is structurally nonzero; rows with zero mass
// (c_pt = 0 or l_q = 0) are enforced algebraically at the new time point.
class transient_problem {
public:
    transient_problem(const polarity_lump& lump, const drive_spec& drive)
        : lump_(lump), g_s_(1.0 / drive.r_source),
          v_src_(source_peak_voltage(dbm_to_watts(drive.p_dbm), drive.r_source)),
          w_(2.0 * pi * drive.f_hz) {
        if (lump_.r_q == 0.0 && lump_.l_q == 0.0)
            throw domain_error("transient: branch needs r_s > 0 or l_p > 0");
        has_mass_ = {lump_.c_p_total > 0.0, lump_.l_q > 0.0, true,
                     lump_.l_q > 0.0, true};
    }

    using vec5 = Eigen::Matrix<double, 5, 1>;
    using mat5 = Eigen::Matrix<double, 5, 5>;

    double v_source(double t) const { return v_src_ * std::cos(w_ * t); }

    vec5 f(const vec5& y, double t) const {
        const double v_t = y(0), i_f = y(1), v_f = y(2), i_r = y(3), v_r = y(4);
        vec5 out;
        out(0) = g_s_ * (v_source(t) - v_t) - i_f + i_r;
        out(1) = v_t - lump_.r_q * i_f - v_f;
        out(2) = i_f - lump_.current(v_f);
        out(3) = -v_t - lump_.r_q * i_r - v_r;
        out(4) = i_r - lump_.current(v_r);
        return out;
    }

    vec5 mass(const vec5& y) const {
        vec5 out;
        out(0) = lump_.c_p_total * y(0);
        out(1) = lump_.l_q * y(1);
        out(2) = lump_.charge(y(2));
        out(3) = lump_.l_q * y(3);
        out(4) = lump_.charge(y(4));
        return out;
    }

    // One trapezoidal step from (y0, t0) to t0 + h by Newton with the
    // analytic Jacobian; the step is accepted after the update stagnates.
    vec5 step(const vec5& y0, double t0, double h) const {
        const vec5 f0 = f(y0, t0);
        const vec5 m0 = mass(y0);
        vec5 y1 = y0;
        for (int it = 0; it < 60; ++it) {
            const vec5 f1 = f(y1, t0 + h);
            const vec5 m1 = mass(y1);
            vec5 res;
            for (int i = 0; i < 5; ++i)
                res(i) = has_mass_[static_cast<std::size_t>(i)]
                             ? m1(i) - m0(i) - 0.5 * h * (f1(i) + f0(i))
                             : f1(i);

            mat5 dfdy;
            dfdy << -g_s_, -1.0, 0.0, 1.0, 0.0,
                    1.0, -lump_.r_q, -1.0, 0.0, 0.0,
                    0.0, 1.0, -lump_.conductance(y1(2)), 0.0, 0.0,
                    -1.0, 0.0, 0.0, -lump_.r_q, -1.0,
                    0.0, 0.0, 0.0, 1.0, -lump_.conductance(y1(4));
            mat5 J;
            for (int i = 0; i < 5; ++i) {
                if (has_mass_[static_cast<std::size_t>(i)]) {
                    for (int j = 0; j < 5; ++j) J(i, j) = -0.5 * h * dfdy(i, j);
                    // d(mass_i)/dy_i on the diagonal
                    const double dm = (i == 0)   ? lump_.c_p_total
                                      : (i == 2) ? lump_.capacitance(y1(2))
                                      : (i == 4) ? lump_.capacitance(y1(4))
                                                 : lump_.l_q;
                    J(i, i) += dm;
                } else {
                    for (int j = 0; j < 5; ++j) J(i, j) = dfdy(i, j);
                }
            }
            const vec5 dy = J.partialPivLu().solve(-res);
            y1 += dy;
            const double scale = std::max(1.0, y1.cwiseAbs().maxCoeff());
            if (dy.cwiseAbs().maxCoeff() < 1e-12 * scale) break;
        }
        return y1;
    }

private:
    const polarity_lump& lump_;
    double g_s_;
    double v_src_;
    double w_;
    std::array<bool, 5> has_mass_{};
};

cpx fundamental_phasor(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    cpx acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
        acc += samples[k] * std::exp(cpx{0.0, -theta});
    }
    return 2.0 / static_cast<double>(n) * acc;
}

} // namespace

steady_state_result transient_steady_state(const nonlinear_circuit& nc,
                                           const drive_spec& drive,
                                           const solver_settings& settings) {
    drive.validate();
    settings.validate();
    const polarity_lump lump = make_lump(nc);
    transient_problem problem(lump, drive);

    const std::size_t steps = settings.transient_steps_per_period;
    const double period = 1.0 / drive.f_hz;
    const double h = period / static_cast<double>(steps);
    const double g_s = 1.0 / drive.r_source;

    transient_problem::vec5 y = transient_problem::vec5::Zero();
    std::vector<double> v_t(steps), i_in(steps);
    std::vector<double> trace;
    cpx v1_prev{0.0, 0.0}, i1_prev{0.0, 0.0};
    std::size_t consecutive_passes = 0;
    constexpr std::size_t min_periods = 5;

    for (std::size_t per = 0; per < settings.transient_max_periods; ++per) {
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = (static_cast<double>(per) +
                              static_cast<double>(k) / static_cast<double>(steps)) *
                             period;
            v_t[k] = y(0);
            i_in[k] = g_s * (problem.v_source(t) - y(0));
            y = problem.step(y, t, h);
        }
        const cpx v1 = fundamental_phasor(v_t);
        const cpx i1 = fundamental_phasor(i_in);
        const double dv = std::abs(v1 - v1_prev) / std::max(std::abs(v1), 1e-15);
        const double di = std::abs(i1 - i1_prev) / std::max(std::abs(i1), 1e-15);
        const double rel = std::max(dv, di);
        trace.push_back(rel);
        if (per + 1 >= min_periods && rel < settings.tol)
            ++consecutive_passes;
        else
            consecutive_passes = 0;
        if (consecutive_passes >= 2) {
            steady_state_result out;
            out.z_fundamental = v1 / i1;
            out.v1_amplitude = std::abs(v1);
            out.i1_amplitude = std::abs(i1);
            out.iterations = per + 1;
            out.residual = rel;
            return out;
        }
        v1_prev = v1;
        i1_prev = i1;
    }
    throw non_convergence("transient: fundamental did not settle within " +
                              std::to_string(settings.transient_max_periods) +
                              " periods",
                          trace);
}

} // namespace nltr
