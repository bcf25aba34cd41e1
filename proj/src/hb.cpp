#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nltr/solvers.hpp"

namespace nltr {

void drive_spec::validate() const {
    if (!(f_hz > 0.0)) throw config_error("drive.f_hz must be > 0");
    if (!std::isfinite(p_dbm)) throw config_error("drive.p_dbm must be finite");
    if (!(r_source > 0.0)) throw config_error("drive.r_source must be > 0");
}

void solver_settings::validate() const {
    if (hb_harmonics < 1) throw config_error("solver.hb_harmonics must be >= 1");
    if (hb_samples < 4 * (hb_harmonics + 1))
        throw config_error("solver.hb_samples must be >= 4*(hb_harmonics+1)");
    if (!(tol > 0.0)) throw config_error("solver.tol must be > 0");
    if (max_iterations < 1) throw config_error("solver.max_iterations must be >= 1");
    if (transient_steps_per_period < 200)
        throw config_error("solver.transient_steps_per_period must be >= 200");
    if (transient_max_periods < 2)
        throw config_error("solver.transient_max_periods must be >= 2");
}

cpx small_signal_impedance(const polarity_lump& lump, double f_hz) {
    const double w = 2.0 * pi * f_hz;
    const cpx jw{0.0, w};
    const cpx y_j = lump.conductance(0.0) + jw * lump.capacitance(0.0);
    const cpx z_branch = lump.r_q + jw * lump.l_q + 1.0 / y_j;
    const cpx y_in = jw * lump.c_p_total + 2.0 / z_branch;
    return 1.0 / y_in;
}

namespace {

constexpr double ramp_start_dbm = -10.0; // cold starts are safe up to here
constexpr double ramp_step_db = 5.0;

// One HB solve at a fixed drive; u holds [V0, Re V1, Im V1, ..., Re VH, Im VH]
// of the forward-branch junction voltage and is used as the warm start.
struct hb_state {
    cpx v_t1{0.0, 0.0};
    cpx i_1{0.0, 0.0};
    std::size_t iterations = 0;
    double residual = 0.0;
};

class hb_problem {
public:
    hb_problem(const polarity_lump& lump, const drive_spec& drive,
               const solver_settings& settings, double v_src_peak)
        : lump_(lump), settings_(settings), v_src_(v_src_peak),
          w_(2.0 * pi * drive.f_hz), g_s_(1.0 / drive.r_source),
          h_(settings.hb_harmonics), k_(settings.hb_samples),
          n_(2 * settings.hb_harmonics + 1) {
        if (lump_.r_q == 0.0 && lump_.l_q == 0.0)
            throw domain_error("harmonic balance: branch needs r_s > 0 or l_p > 0");
        basis_.resize(n_, std::vector<double>(k_));
        twiddle_.resize(h_ + 1, std::vector<cpx>(k_));
        for (std::size_t k = 0; k < k_; ++k) {
            const double theta = 2.0 * pi * static_cast<double>(k) / static_cast<double>(k_);
            basis_[0][k] = 1.0;
            for (std::size_t h = 1; h <= h_; ++h) {
                basis_[2 * h - 1][k] = std::cos(static_cast<double>(h) * theta);
                basis_[2 * h][k] = -std::sin(static_cast<double>(h) * theta);
            }
            for (std::size_t h = 0; h <= h_; ++h)
                twiddle_[h][k] = std::exp(cpx{0.0, -static_cast<double>(h) * theta});
        }
    }

    std::size_t n() const { return n_; }

    cpx y_branch(std::size_t h) const {
        return 1.0 / (lump_.r_q + cpx{0.0, static_cast<double>(h) * w_ * lump_.l_q});
    }

    cpx terminal_denominator(std::size_t h) const {
        return g_s_ + cpx{0.0, static_cast<double>(h) * w_ * lump_.c_p_total} +
               2.0 * y_branch(h);
    }

    // Terminal voltage harmonic for odd h given the branch junction harmonic.
    cpx terminal_voltage(std::size_t h, cpx v_h) const {
        const cpx src = (h == 1) ? g_s_ * v_src_ : cpx{0.0, 0.0};
        return (src + 2.0 * y_branch(h) * v_h) / terminal_denominator(h);
    }

    // Residual and, when jac != nullptr, the analytic Jacobian.
    void evaluate(const Eigen::VectorXd& u, Eigen::VectorXd& r,
                  Eigen::MatrixXd* jac) const {
        std::vector<double> v(k_), i_d(k_), q_j(k_), g_d(k_), c_j(k_);
        for (std::size_t k = 0; k < k_; ++k) {
            double vk = 0.0;
            for (std::size_t j = 0; j < n_; ++j) vk += u(static_cast<long>(j)) * basis_[j][k];
            v[k] = vk;
            i_d[k] = lump_.current(vk);
            q_j[k] = lump_.charge(vk);
            if (jac) {
                g_d[k] = lump_.conductance(vk);
                c_j[k] = lump_.capacitance(vk);
            }
        }

        std::vector<cpx> i_nl(h_ + 1);
        for (std::size_t h = 0; h <= h_; ++h) {
            cpx si{0.0, 0.0}, sq{0.0, 0.0};
            for (std::size_t k = 0; k < k_; ++k) {
                si += i_d[k] * twiddle_[h][k];
                sq += q_j[k] * twiddle_[h][k];
            }
            const double scale = (h == 0 ? 1.0 : 2.0) / static_cast<double>(k_);
            i_nl[h] = scale * (si + cpx{0.0, static_cast<double>(h) * w_} * sq);
        }

        r.resize(static_cast<long>(n_));
        if (lump_.r_q > 0.0)
            r(0) = i_nl[0].real() + u(0) / lump_.r_q;
        else
            r(0) = u(0); // zero branch resistance pins the DC junction voltage
        for (std::size_t h = 1; h <= h_; ++h) {
            const cpx v_h{u(static_cast<long>(2 * h - 1)), u(static_cast<long>(2 * h))};
            cpx r_h;
            if (h % 2 == 1)
                r_h = y_branch(h) * (terminal_voltage(h, v_h) - v_h) - i_nl[h];
            else
                r_h = -y_branch(h) * v_h - i_nl[h];
            r(static_cast<long>(2 * h - 1)) = r_h.real();
            r(static_cast<long>(2 * h)) = r_h.imag();
        }

        if (!jac) return;
        Eigen::MatrixXd& J = *jac;
        J.setZero(static_cast<long>(n_), static_cast<long>(n_));

        // Nonlinear part: d(i_nl[h])/du_j = DFT_h((g + jhw c) * basis_j).
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t h = 0; h <= h_; ++h) {
                cpx sg{0.0, 0.0}, sc{0.0, 0.0};
                for (std::size_t k = 0; k < k_; ++k) {
                    const double b = basis_[j][k];
                    sg += g_d[k] * b * twiddle_[h][k];
                    sc += c_j[k] * b * twiddle_[h][k];
                }
                const double scale = (h == 0 ? 1.0 : 2.0) / static_cast<double>(k_);
                const cpx d = scale * (sg + cpx{0.0, static_cast<double>(h) * w_} * sc);
                if (h == 0) {
                    J(0, static_cast<long>(j)) += d.real(); // R0 = Re(i_nl0) + u0/r_q
                } else {
                    J(static_cast<long>(2 * h - 1), static_cast<long>(j)) -= d.real();
                    J(static_cast<long>(2 * h), static_cast<long>(j)) -= d.imag();
                }
            }
        }

        // Linear parts act complex-linearly on the same-harmonic unknown.
        if (lump_.r_q > 0.0)
            J(0, 0) += 1.0 / lump_.r_q;
        else {
            J.row(0).setZero();
            J(0, 0) = 1.0;
        }
        for (std::size_t h = 1; h <= h_; ++h) {
            const cpx y_l = y_branch(h);
            const cpx lin = (h % 2 == 1)
                                ? y_l * (2.0 * y_l / terminal_denominator(h) - 1.0)
                                : -y_l;
            const long rr = static_cast<long>(2 * h - 1);
            J(rr, rr) += lin.real();
            J(rr, rr + 1) += -lin.imag();
            J(rr + 1, rr) += lin.imag();
            J(rr + 1, rr + 1) += lin.real();
        }
    }

    // Linear small-signal junction harmonic as the cold-start iterate.
    Eigen::VectorXd cold_start() const {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<long>(n_));
        const cpx jw{0.0, w_};
        const cpx y_j = lump_.conductance(0.0) + jw * lump_.capacitance(0.0);
        const cpx z_branch = lump_.r_q + jw * lump_.l_q + 1.0 / y_j;
        const cpx v_t = g_s_ * v_src_ /
                        (g_s_ + jw * lump_.c_p_total + 2.0 / z_branch);
        const cpx v_1 = v_t * (1.0 / y_j) / z_branch;
        u(1) = v_1.real();
        u(2) = v_1.imag();
        return u;
    }

    hb_state solve(Eigen::VectorXd& u, std::vector<double>* trace) const {
        hb_state st;
        Eigen::VectorXd r;
        Eigen::MatrixXd J;
        double rel = 1.0;
        for (std::size_t it = 1; it <= settings_.max_iterations; ++it) {
            evaluate(u, r, &J);
            Eigen::VectorXd dx = J.partialPivLu().solve(-r);
            if (!dx.allFinite())
                throw non_convergence("harmonic balance: singular Jacobian",
                                      trace ? *trace : std::vector<double>{});
            // Backtracking on the residual norm; small steps are accepted so a
            // short plateau cannot stall the iteration.
            const double n0 = r.norm();
            double lambda = 1.0;
            Eigen::VectorXd r_try;
            for (int halvings = 0; halvings < 12; ++halvings) {
                evaluate(u + lambda * dx, r_try, nullptr);
                if (r_try.norm() < n0 || lambda < 1e-4) break;
                lambda *= 0.5;
            }
            u += lambda * dx;
            st.iterations = it;
            const double v1_mag =
                std::max(std::hypot(u(1), u(2)), 1e-12);
            rel = lambda * std::hypot(dx(1), dx(2)) / v1_mag;
            if (trace) trace->push_back(rel);
            if (rel < settings_.tol) break;
        }
        st.residual = rel;
        if (rel >= settings_.tol)
            throw non_convergence(
                "harmonic balance: no convergence in " +
                    std::to_string(settings_.max_iterations) + " iterations",
                trace ? *trace : std::vector<double>{});
        const cpx v_1{u(1), u(2)};
        st.v_t1 = terminal_voltage(1, v_1);
        st.i_1 = g_s_ * (v_src_ - st.v_t1);
        return st;
    }

private:
    const polarity_lump& lump_;
    const solver_settings& settings_;
    double v_src_;
    double w_;
    double g_s_;
    std::size_t h_;
    std::size_t k_;
    std::size_t n_;
    std::vector<std::vector<double>> basis_;
    std::vector<std::vector<cpx>> twiddle_;
};

} // namespace

steady_state_result describing_function_impedance(const nonlinear_circuit& nc,
                                                  const drive_spec& drive,
                                                  const solver_settings& settings) {
    drive.validate();
    settings.validate();
    const polarity_lump lump = make_lump(nc);

    // Deterministic drive schedule: direct solve at or below the ramp start,
    // otherwise 5 dB rungs from -10 dBm up to the target.
    std::vector<double> rungs;
    if (drive.p_dbm <= ramp_start_dbm) {
        rungs.push_back(drive.p_dbm);
    } else {
        for (double p = ramp_start_dbm; p < drive.p_dbm - 1e-9; p += ramp_step_db)
            rungs.push_back(p);
        rungs.push_back(drive.p_dbm);
    }

    std::vector<double> trace;
    Eigen::VectorXd u;
    hb_state st;
    std::size_t total_iterations = 0;
    for (std::size_t i = 0; i < rungs.size(); ++i) {
        drive_spec rung = drive;
        rung.p_dbm = rungs[i];
        const double v_src = source_peak_voltage(dbm_to_watts(rung.p_dbm), rung.r_source);
        hb_problem problem(lump, rung, settings, v_src);
        if (i == 0) u = problem.cold_start();
        st = problem.solve(u, &trace);
        total_iterations += st.iterations;
    }

    steady_state_result out;
    out.z_fundamental = st.v_t1 / st.i_1;
    out.v1_amplitude = std::abs(st.v_t1);
    out.i1_amplitude = std::abs(st.i_1);
    out.iterations = total_iterations;
    out.residual = st.residual;
    return out;
}

steady_state_result solve_nc_impedance(const nonlinear_circuit& nc,
                                       const drive_spec& drive,
                                       const solver_settings& settings) {
    return settings.kind == solver_kind::hb
               ? describing_function_impedance(nc, drive, settings)
               : transient_steady_state(nc, drive, settings);
}

} // namespace nltr
