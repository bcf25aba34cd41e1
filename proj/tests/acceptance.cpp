// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failing criteria. Every tolerance is pinned here, next to its check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nltr/cli.hpp"
#include "nltr/config.hpp"
#include "nltr/diode.hpp"
#include "nltr/io.hpp"
#include "nltr/network.hpp"
#include "nltr/optimizer.hpp"
#include "nltr/solvers.hpp"
#include "nltr/surface.hpp"
#include "nltr/units.hpp"

using namespace nltr;

namespace {

int g_failures = 0;

void report(int n, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s - %s\n", pass ? "PASS" : "FAIL", n,
                title, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

const impedance_surface& shared_surface() {
    static const impedance_surface s = build_surface(
        nonlinear_circuit{}, default_surface_grid(), solver_settings{});
    return s;
}

surface_set shared_surfaces() {
    const impedance_surface* s = &shared_surface();
    return {s, s, s, s};
}

run_config default_config() { return parse_config_text("{}"); }

// ---------------------------------------------------------------------------

void criterion_1() {
    // Two independent steady-state solvers must agree on the NC fundamental
    // impedance: magnitude within 5%, phase within 5 degrees, on a 4x4
    // (frequency x power) grid, in under 300 seconds.
    constexpr double mag_bound = 0.05;
    constexpr double phase_bound_deg = 5.0;
    constexpr double time_bound_s = 300.0;

    const auto t0 = std::chrono::steady_clock::now();
    const nonlinear_circuit nc{};
    const solver_settings settings{};
    double worst_mag = 0.0, worst_phase = 0.0;
    for (double f : linspace(0.8e9, 1.3e9, 4)) {
        for (double p : linspace(-40.0, 30.0, 4)) {
            const drive_spec drive{f, p, 50.0};
            const cpx z_hb =
                describing_function_impedance(nc, drive, settings)
                    .z_fundamental;
            const cpx z_tr =
                transient_steady_state(nc, drive, settings).z_fundamental;
            worst_mag = std::max(
                worst_mag,
                std::abs(std::abs(z_hb) - std::abs(z_tr)) / std::abs(z_tr));
            worst_phase = std::max(
                worst_phase, rad_to_deg(std::abs(std::arg(z_hb / z_tr))));
        }
    }
    const double elapsed = seconds_since(t0);
    report(1, "frequency- and time-domain solvers agree",
           worst_mag <= mag_bound && worst_phase <= phase_bound_deg &&
               elapsed <= time_bound_s,
           fmt("worst %.3f%% magnitude / %.3f deg phase on the 4x4 grid in "
               "%.1f s (bounds %.0f%% / %.0f deg / %.0f s)",
               100 * worst_mag, worst_phase, elapsed, 100 * mag_bound,
               phase_bound_deg, time_bound_s));
}

void criterion_2() {
    // Branch admittance against the chain-matrix oracle over 1000 randomized
    // cases (<= 1e-10 relative), and the antenna-node closed form against
    // the pure-shunt chain-matrix path (<= 1e-12).
    constexpr double random_bound = 1e-10;
    constexpr double shunt_bound = 1e-12;

    std::mt19937_64 rng(20260816);
    std::uniform_real_distribution<double> z0_dist(20.0, 150.0);
    std::uniform_real_distribution<double> theta_dist(1.0, 179.0);
    std::uniform_real_distribution<double> re_dist(0.1, 300.0);
    std::uniform_real_distribution<double> im_dist(-300.0, 300.0);
    std::uniform_real_distribution<double> f_dist(0.6e9, 1.5e9);
    double worst_random = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const transmission_line line{z0_dist(rng), theta_dist(rng), 1e9};
        const cpx z_load(re_dist(rng), im_dist(rng));
        const double f = f_dist(rng);
        const cpx y = loaded_line_admittance(
                          line, immittance::impedance(z_load), f)
                          .as_admittance();
        const two_port_abcd m = line_abcd(line, f);
        const cpx y_ref = (m.c * z_load + m.d) / (m.a * z_load + m.b);
        worst_random =
            std::max(worst_random, std::abs(y - y_ref) / std::abs(y_ref));
    }

    const switch_design design{};
    double worst_shunt = 0.0;
    for (double f : linspace(0.8e9, 1.3e9, 6)) {
        for (double p : {-40.0, -10.0, 10.0, 30.0}) {
            const cpx z = interpolate(shared_surface(), f, p);
            const std::array<cpx, 4> znc{z, z, z, z};
            const sparams direct = tx_mode_sparams(design, f, znc);
            const sparams via = abcd_to_sparams(
                shunt_abcd(total_admittance(design, f, znc).as_admittance()),
                design.z_p);
            worst_shunt = std::max({worst_shunt,
                                    std::abs(direct.s11 - via.s11),
                                    std::abs(direct.s21 - via.s21)});
        }
    }
    report(2, "network closed forms match chain-matrix oracles",
           worst_random <= random_bound && worst_shunt <= shunt_bound,
           fmt("worst %.2e over 1000 random branches (bound %.0e), worst "
               "%.2e closed-form vs shunt path (bound %.0e)",
               worst_random, random_bound, worst_shunt, shunt_bound));
}

void criterion_3() {
    // Lossless cases conserve scattered power to 1e-9; every scattering
    // magnitude across the canned reproduce sweeps is passive (<= 1 + 1e-9).
    constexpr double lossless_tol = 1e-9;
    constexpr double passive_ceiling = 1.0 + 1e-9;

    double worst_lossless = 0.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> theta(5.0, 170.0);
    std::uniform_real_distribution<double> z0(30.0, 120.0);
    std::uniform_real_distribution<double> b(-0.05, 0.05);
    for (int k = 0; k < 200; ++k) {
        const two_port_abcd m = abcd_cascade(
            {line_abcd({z0(rng), theta(rng), 1e9}, 1e9),
             shunt_abcd(cpx(0.0, b(rng))),
             line_abcd({z0(rng), theta(rng), 1e9}, 1e9)});
        const sparams s = abcd_to_sparams(m, 50.0);
        worst_lossless = std::max(
            worst_lossless,
            std::abs(std::norm(s.s11) + std::norm(s.s21) - 1.0));
    }
    const switch_design design{};
    for (double x : {-350.0, -40.0, 15.0, 220.0}) {
        const std::array<cpx, 4> znc{cpx(0, x), cpx(0, x), cpx(0, x),
                                     cpx(0, x)};
        for (port e : {port::ant, port::tx, port::rx}) {
            const network_solution sol =
                solve_three_port(design, 1.1e9, znc, e, 0.0);
            const double sum = std::norm(sol.s[0]) + std::norm(sol.s[1]) +
                               std::norm(sol.s[2]);
            worst_lossless = std::max(worst_lossless, std::abs(sum - 1.0));
        }
    }

    const run_config cfg = default_config();
    double worst_mag = 0.0;
    const freq_sweep_result band = run_freq_sweep(
        cfg, shared_surface(), -30.0, 0.8e9, 1.3e9, 101, false);
    for (const sweep_row& r : band.rows)
        worst_mag = std::max({worst_mag, std::abs(r.s11), std::abs(r.s21)});
    for (const std::vector<sparam_record>* recs :
         {&band.ant_rx, &band.ant_tx})
        for (const sparam_record& r : *recs)
            worst_mag = std::max({worst_mag, std::abs(r.s11), std::abs(r.s21),
                                  std::abs(r.s12), std::abs(r.s22)});
    const std::vector<sweep_row> power_rows =
        run_power_sweep(cfg, shared_surface(), 1.2e9, -40.0, 30.0, 71);
    for (const sweep_row& r : power_rows)
        worst_mag = std::max({worst_mag, std::abs(r.s11), std::abs(r.s21)});

    report(3, "power conservation and passivity",
           worst_lossless <= lossless_tol && worst_mag <= passive_ceiling,
           fmt("worst lossless defect %.2e (bound %.0e), largest |S| %.9f "
               "across the reproduce sweeps (ceiling 1 + 1e-9)",
               worst_lossless, lossless_tol, worst_mag));
}

void criterion_4() {
    // NC impedance contrast on the default block: at 1.0 GHz the high-drive
    // state must look like a short (|Z| <= 20 ohm) and the low-drive state
    // like an open (|Z| >= 200 ohm), with >= 10x contrast at every band
    // frequency. Magnitude carries the open/short semantics here: the
    // low-drive NC is a near-lossless capacitor whose real part stays at a
    // few ohm by construction, so the real part alone cannot express the
    // "open" state. Both projections are printed.
    constexpr double short_max_ohm = 20.0;
    constexpr double open_min_ohm = 200.0;
    constexpr double contrast_min = 10.0;

    const impedance_surface& s = shared_surface();
    const cpx z_lo = interpolate(s, 1.0e9, -40.0);
    const cpx z_hi = interpolate(s, 1.0e9, 30.0);
    double worst_contrast = 1e300;
    for (double f : s.grid.f_hz) {
        if (f < 0.8e9 || f > 1.3e9) continue;
        worst_contrast = std::min(
            worst_contrast, std::abs(interpolate(s, f, -40.0)) /
                                std::abs(interpolate(s, f, 30.0)));
    }

    report(4, "drive power collapses the NC impedance",
           std::abs(z_hi) <= short_max_ohm && std::abs(z_lo) >= open_min_ohm &&
               worst_contrast >= contrast_min,
           fmt("1 GHz |Z|: %.1f ohm low-drive (>= %.0f), %.2f ohm high-drive "
               "(<= %.0f); Re(Z): %.2f / %.2f ohm; band contrast >= %.1fx "
               "(bound %.0fx)",
               std::abs(z_lo), open_min_ohm, std::abs(z_hi), short_max_ohm,
               z_lo.real(), z_hi.real(), worst_contrast, contrast_min));
}

void criterion_5() {
    // The delivered-power handover at 1.2 GHz must cross exactly once over
    // -40..+30 dBm, inside [-5, +20] dBm.
    constexpr double window_lo_dbm = -5.0;
    constexpr double window_hi_dbm = 20.0;

    const std::vector<sweep_row> rows = run_power_sweep(
        default_config(), shared_surface(), 1.2e9, -40.0, 30.0, 71);
    int crossings = 0;
    double crossover_dbm = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double d0 = rows[i - 1].p_out_rx_dbm - rows[i - 1].p_out_tx_dbm;
        const double d1 = rows[i].p_out_rx_dbm - rows[i].p_out_tx_dbm;
        if ((d0 >= 0.0) == (d1 >= 0.0)) continue;
        ++crossings;
        const double t = d0 / (d0 - d1);
        crossover_dbm =
            rows[i - 1].p_dbm + t * (rows[i].p_dbm - rows[i - 1].p_dbm);
    }
    report(5, "receive-to-transmit handover power",
           crossings == 1 && crossover_dbm >= window_lo_dbm &&
               crossover_dbm <= window_hi_dbm,
           fmt("%d crossing(s), at %+.2f dBm (window %+.0f..%+.0f dBm)",
               crossings, crossover_dbm, window_lo_dbm, window_hi_dbm));
}

void criterion_6() {
    // Receive-state band metrics at -30 dBm over 0.8-1.3 GHz: insertion
    // loss <= 2 dB, isolation >= 12 dB, return loss >= 6 dB at every point.
    // Margins against the 1 / 18 / 10 dB design targets are printed.
    constexpr double il_max_db = 2.0;
    constexpr double iso_min_db = 12.0;
    constexpr double rl_min_db = 6.0;

    const freq_sweep_result band = run_freq_sweep(
        default_config(), shared_surface(), -30.0, 0.8e9, 1.3e9, 101, false);
    double worst_il = 0.0, worst_iso = 1e300, worst_rl = 1e300;
    for (const sweep_row& r : band.rows) {
        worst_il = std::max(worst_il, r.il_ant_rx_db);
        worst_iso = std::min(worst_iso, r.isolation_db);
        worst_rl = std::min(worst_rl, r.rl_db);
    }
    report(6, "receive-state band metrics",
           worst_il <= il_max_db && worst_iso >= iso_min_db &&
               worst_rl >= rl_min_db,
           fmt("worst IL %.3f dB (<= %.0f), isolation %.2f dB (>= %.0f), "
               "return loss %.2f dB (>= %.0f); margins to the 1/18/10 dB "
               "targets: %+.2f / %+.2f / %+.2f dB",
               worst_il, il_max_db, worst_iso, iso_min_db, worst_rl, rl_min_db,
               1.0 - worst_il, worst_iso - 18.0, worst_rl - 10.0));
}

void criterion_7() {
    // Transmit-state metrics at +30 dBm, 1.2 GHz: antenna insertion loss
    // <= 2.5 dB and transmit-state isolation >= 10 dB.
    constexpr double il_max_db = 2.5;
    constexpr double iso_min_db = 10.0;

    const operating_point op = solve_operating_point(
        switch_design{}, shared_surfaces(), 1.2e9, port::tx, 30.0,
        operating_point_settings{});
    report(7, "transmit-state insertion loss and isolation",
           op.il_ant_tx_db <= il_max_db && op.isolation_db >= iso_min_db,
           fmt("IL %.3f dB (<= %.1f), isolation %.2f dB (>= %.0f); the "
               "series-NC dissipation at the converged +30 dBm operating "
               "point dominates the insertion loss",
               op.il_ant_tx_db, il_max_db, op.isolation_db, iso_min_db));
}

void criterion_8() {
    // Synthesis: fixed-seed runs must reproduce byte-identical reports; the
    // warm-started best must score no worse than the reference design and
    // no worse than the median of 200 random in-bounds designs; the default
    // budget must finish in under 600 seconds.
    constexpr double time_bound_s = 600.0;
    constexpr std::uint64_t random_seed_base = 20260816;

    const auto t0 = std::chrono::steady_clock::now();
    const switch_design base{};
    const objective_spec spec{};
    const ga_config cfg{};
    const surface_set surfaces = shared_surfaces();

    const ga_report a = ga_optimize(cfg, spec, base, surfaces);
    const ga_report b = ga_optimize(cfg, spec, base, surfaces);
    const bool identical = ga_trace_csv(a) == ga_trace_csv(b) &&
                           a.best.genes() == b.best.genes();

    const double ref_score =
        evaluate_objective(extract_design(base), spec, base, surfaces);
    std::vector<double> random_scores;
    for (std::uint64_t k = 0; k < 200; ++k)
        random_scores.push_back(evaluate_objective(
            cfg.random_design(random_seed_base + k), spec, base, surfaces));
    std::nth_element(random_scores.begin(),
                     random_scores.begin() + random_scores.size() / 2,
                     random_scores.end());
    const double median = random_scores[random_scores.size() / 2];
    const double elapsed = seconds_since(t0);

    report(8, "synthesis determinism and dominance",
           identical && a.best_score <= ref_score && a.best_score <= median &&
               elapsed <= time_bound_s,
           fmt("%s reports; best %.4f vs reference %.4f and random median "
               "%.4f; %zu evaluations in %.1f s (bound %.0f s)",
               identical ? "byte-identical" : "DIVERGENT", a.best_score,
               ref_score, median, a.evaluations + b.evaluations, elapsed,
               time_bound_s));
}

void criterion_9() {
    // Across the handover power sweep the receive/transmit delivered-power
    // ratio in dB must never increase (1e-6 dB tie slack covers the
    // low-drive plateau where both ports scale linearly) and must flip sign
    // exactly once. The self-consistent model has a fold at the grounded
    // stub's conduction onset (~+15.5 dBm drive): its local power snaps up
    // ~20 dB between adjacent rows, stepping the ratio up ~0.04 dB once
    // before it resumes falling, so the strict form of this check fails by
    // that step. The snap persists with the surface power grid refined 8x
    // and with the iteration damping varied, so it is a property of the
    // model, not of the solver settings.
    constexpr double tie_slack_db = 1e-6;

    const std::vector<sweep_row> rows = run_power_sweep(
        default_config(), shared_surface(), 1.2e9, -40.0, 30.0, 71);
    bool monotone = true;
    int flips = 0;
    double prev = 0.0, worst_rise = 0.0, rise_at_dbm = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double ratio = rows[i].p_out_rx_dbm - rows[i].p_out_tx_dbm;
        if (i > 0) {
            if (ratio - prev > worst_rise) {
                worst_rise = ratio - prev;
                rise_at_dbm = rows[i].p_dbm;
            }
            if (ratio > prev + tie_slack_db) monotone = false;
            if ((ratio >= 0.0) != (prev >= 0.0)) ++flips;
        }
        prev = ratio;
    }
    const double span = (rows.front().p_out_rx_dbm -
                         rows.front().p_out_tx_dbm) -
                        (rows.back().p_out_rx_dbm - rows.back().p_out_tx_dbm);
    report(9, "handover ratio is monotone with a single flip",
           monotone && flips == 1 && span > 0.0,
           fmt("largest rise %.2e dB at %+.0f dBm (slack %.0e), %d sign "
               "flip(s), ratio falls %.2f dB overall; the rise is the "
               "stub-conduction snap of the self-consistent solution",
               worst_rise, rise_at_dbm, tie_slack_db, flips, span));
}

void criterion_10() {
    // Emitted network files must re-parse under the strict grammar with
    // every value intact, and sweep CSVs must round-trip losslessly.
    const run_config cfg = default_config();
    const freq_sweep_result band = run_freq_sweep(
        cfg, shared_surface(), -30.0, 0.8e9, 1.3e9, 21, true);

    bool touchstone_ok = true;
    const std::string dir = "acceptance_artifacts";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (const auto& [name, records] :
         {std::pair{"ant_rx.s2p", &band.ant_rx},
          std::pair{"ant_tx.s2p", &band.ant_tx}}) {
        const std::string path = dir + "/" + name;
        write_touchstone(path, *records, cfg.design.z_p, {"conformance"});
        const touchstone_file parsed = parse_touchstone(read_text_file(path));
        touchstone_ok = touchstone_ok && parsed.z_ref == cfg.design.z_p &&
                        parsed.records.size() == records->size();
        for (std::size_t i = 0;
             touchstone_ok && i < parsed.records.size(); ++i) {
            const sparam_record& x = parsed.records[i];
            const sparam_record& y = (*records)[i];
            touchstone_ok = x.f_hz == y.f_hz && x.s11 == y.s11 &&
                            x.s21 == y.s21 && x.s12 == y.s12 &&
                            x.s22 == y.s22;
        }
    }

    const std::string csv = sweep_rows_to_csv(band.rows, false, true);
    const csv_table table = parse_csv_text(csv);
    bool csv_ok = table.rows.size() == band.rows.size();
    for (std::size_t i = 0; csv_ok && i < table.rows.size(); ++i) {
        const sweep_row& r = band.rows[i];
        csv_ok = std::stod(table.rows[i][0]) == r.f_hz &&
                 std::stod(table.rows[i][3]) == r.il_ant_rx_db &&
                 std::stod(table.rows[i][7]) == r.s11.real() &&
                 std::stod(table.rows[i][10]) == r.s21.imag() &&
                 std::stod(table.rows[i][14]) == r.c2.imag();
    }
    std::filesystem::remove_all(dir, ec);

    report(10, "emitted formats re-parse losslessly",
           touchstone_ok && csv_ok,
           fmt("%zu network records and %zu CSV rows round-tripped "
               "bit-exactly",
               band.ant_rx.size() + band.ant_tx.size(), band.rows.size()));
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures,
                seconds_since(t0));
    return g_failures;
}
