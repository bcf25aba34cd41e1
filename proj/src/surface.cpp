#include "nltr/surface.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "nltr/io.hpp"

namespace nltr {

void impedance_surface::validate_shape() const {
    if (grid.rows() < 1 || grid.cols() < 1)
        throw error("impedance_surface: empty grid");
    if (values.size() != grid.rows() * grid.cols())
        throw error("impedance_surface: value count " + std::to_string(values.size()) +
                    " does not match grid " + std::to_string(grid.rows()) + "x" +
                    std::to_string(grid.cols()));
}

grid2d default_surface_grid() {
    return make_grid(0.6e9, 1.5e9, 46, -40.0, 30.0, 36);
}

namespace {

void validate_axes(const grid2d& grid) {
    auto check = [](const std::vector<double>& axis, const char* name) {
        if (axis.size() < 1)
            throw config_error(std::string("surface grid: empty ") + name + " axis");
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (!(axis[i] > axis[i - 1]))
                throw config_error(std::string("surface grid: ") + name +
                                   " axis must be strictly increasing");
    };
    check(grid.f_hz, "frequency");
    check(grid.p_dbm, "power");
}

// Index of the cell [i, i+1] containing x; x must already be inside the axis
// hull. The last node maps into the final cell so node queries stay exact.
std::size_t cell_index(const std::vector<double>& axis, double x) {
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    if (hi < 1) hi = 1;
    if (hi > axis.size() - 1) hi = axis.size() - 1;
    return hi - 1;
}

} // namespace

impedance_surface build_surface(const nonlinear_circuit& nc, const grid2d& grid,
                                const solver_settings& settings) {
    nc.validate();
    settings.validate();
    validate_axes(grid);

    impedance_surface surface;
    surface.grid = grid;
    surface.values.assign(grid.rows() * grid.cols(), cpx{0.0, 0.0});
    {
        std::ostringstream prov;
        prov << (settings.kind == solver_kind::hb ? "hb" : "transient")
             << " tol=" << fmt_g17(settings.tol);
        if (settings.kind == solver_kind::hb)
            prov << " H=" << settings.hb_harmonics << " K=" << settings.hb_samples;
        else
            prov << " steps=" << settings.transient_steps_per_period;
        surface.provenance = prov.str();
    }

    const std::size_t n_cells = surface.values.size();
    std::atomic<std::size_t> next{0};
    std::mutex failures_mutex;
    std::vector<std::string> failures;

    auto worker = [&] {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= n_cells) return;
            const std::size_t fi = cell / grid.cols();
            const std::size_t pi = cell % grid.cols();
            drive_spec drive;
            drive.f_hz = grid.f_hz[fi];
            drive.p_dbm = grid.p_dbm[pi];
            try {
                const steady_state_result r = solve_nc_impedance(nc, drive, settings);
                surface.values[cell] = r.z_fundamental;
            } catch (const error& e) {
                std::lock_guard<std::mutex> lock(failures_mutex);
                failures.push_back("(f=" + fmt_g17(drive.f_hz) +
                                   " Hz, p=" + fmt_g17(drive.p_dbm) + " dBm): " + e.what());
            }
        }
    };

    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, n_cells);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (!failures.empty()) {
        std::sort(failures.begin(), failures.end());
        std::string msg = "surface build failed at " + std::to_string(failures.size()) +
                          " cell(s):";
        for (const auto& f : failures) msg += "\n  " + f;
        throw non_convergence(msg, {});
    }
    return surface;
}

cpx interpolate(const impedance_surface& surface, double f_hz, double p_dbm) {
    const auto& f_axis = surface.grid.f_hz;
    const auto& p_axis = surface.grid.p_dbm;
    if (f_axis.size() < 2 || p_axis.size() < 2)
        throw range_error("interpolate: grid needs at least 2x2 nodes");
    if (f_hz < f_axis.front() || f_hz > f_axis.back())
        throw range_error("interpolate: frequency " + fmt_g17(f_hz) +
                          " Hz outside surface grid [" + fmt_g17(f_axis.front()) +
                          ", " + fmt_g17(f_axis.back()) + "]");
    if (p_dbm < p_axis.front() || p_dbm > p_axis.back())
        throw range_error("interpolate: power " + fmt_g17(p_dbm) +
                          " dBm outside surface grid [" + fmt_g17(p_axis.front()) +
                          ", " + fmt_g17(p_axis.back()) + "]");

    const std::size_t fi = cell_index(f_axis, f_hz);
    const std::size_t pi = cell_index(p_axis, p_dbm);
    const double tf = (f_hz - f_axis[fi]) / (f_axis[fi + 1] - f_axis[fi]);
    const double tp = (p_dbm - p_axis[pi]) / (p_axis[pi + 1] - p_axis[pi]);

    const cpx z00 = surface.at(fi, pi);
    const cpx z01 = surface.at(fi, pi + 1);
    const cpx z10 = surface.at(fi + 1, pi);
    const cpx z11 = surface.at(fi + 1, pi + 1);
    return (1.0 - tf) * ((1.0 - tp) * z00 + tp * z01) +
           tf * ((1.0 - tp) * z10 + tp * z11);
}

cpx interpolate_power_clamped(const impedance_surface& surface, double f_hz,
                              double p_dbm) {
    const auto& p_axis = surface.grid.p_dbm;
    if (p_axis.empty())
        throw range_error("interpolate: empty power axis");
    const double p = std::clamp(p_dbm, p_axis.front(), p_axis.back());
    return interpolate(surface, f_hz, p);
}

std::string surface_to_csv(const impedance_surface& surface) {
    surface.validate_shape();
    std::ostringstream out;
    out << "f_hz,p_dbm,re_ohm,im_ohm\n";
    for (std::size_t fi = 0; fi < surface.grid.rows(); ++fi)
        for (std::size_t pi = 0; pi < surface.grid.cols(); ++pi) {
            const cpx z = surface.at(fi, pi);
            out << fmt_g17(surface.grid.f_hz[fi]) << ',' << fmt_g17(surface.grid.p_dbm[pi])
                << ',' << fmt_g17(z.real()) << ',' << fmt_g17(z.imag()) << "\n";
        }
    return out.str();
}

impedance_surface surface_from_csv(const std::string& csv_text) {
    const csv_table table = parse_csv_text(csv_text);
    const std::vector<std::string> expect = {"f_hz", "p_dbm", "re_ohm", "im_ohm"};
    if (table.header != expect)
        throw io_error("surface CSV: unexpected header");
    impedance_surface surface;
    std::vector<double> f_axis, p_axis;
    for (const auto& row : table.rows) {
        const double f = std::stod(row[0]);
        if (f_axis.empty() || f > f_axis.back())
            f_axis.push_back(f);
        else if (f != f_axis.back())
            throw io_error("surface CSV: frequency order not row-major ascending");
    }
    // power axis from the first frequency block
    for (const auto& row : table.rows) {
        if (std::stod(row[0]) != f_axis.front()) break;
        p_axis.push_back(std::stod(row[1]));
    }
    if (f_axis.empty() || p_axis.empty() ||
        table.rows.size() != f_axis.size() * p_axis.size())
        throw io_error("surface CSV: incomplete grid (" + std::to_string(table.rows.size()) +
                       " rows for " + std::to_string(f_axis.size()) + "x" +
                       std::to_string(p_axis.size()) + ")");
    surface.grid.f_hz = f_axis;
    surface.grid.p_dbm = p_axis;
    surface.values.resize(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t fi = i / p_axis.size();
        const std::size_t pi = i % p_axis.size();
        if (std::stod(row[0]) != f_axis[fi] || std::stod(row[1]) != p_axis[pi])
            throw io_error("surface CSV: rows not in row-major grid order");
        surface.values[i] = cpx{std::stod(row[2]), std::stod(row[3])};
    }
    validate_axes(surface.grid);
    surface.validate_shape();
    return surface;
}

std::string surface_cache_key(const nonlinear_circuit& nc, const grid2d& grid,
                              const solver_settings& settings) {
    std::ostringstream canon;
    const diode_params& d = nc.diode;
    canon << "diode|" << fmt_g17(d.i_s) << '|' << fmt_g17(d.n_ideality) << '|'
          << fmt_g17(d.r_s) << '|' << fmt_g17(d.c_j0) << '|' << fmt_g17(d.v_j) << '|'
          << fmt_g17(d.m_grading) << '|' << fmt_g17(d.l_p) << '|' << fmt_g17(d.c_p)
          << '|' << fmt_g17(d.temperature_k) << "\nnc|" << nc.n_series << '|'
          << nc.n_branches << "\nsolver|"
          << (settings.kind == solver_kind::hb ? "hb" : "transient") << '|'
          << settings.hb_harmonics << '|' << settings.hb_samples << '|'
          << fmt_g17(settings.tol) << '|' << settings.max_iterations << '|'
          << settings.transient_steps_per_period << '|'
          << settings.transient_max_periods << "\ngrid";
    for (double f : grid.f_hz) canon << '|' << fmt_g17(f);
    canon << "\npow";
    for (double p : grid.p_dbm) canon << '|' << fmt_g17(p);
    return fnv1a_hex(canon.str());
}

std::string resolve_cache_dir(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("NLTR_CACHE_DIR"); env && *env) return env;
    return ".nltr-cache";
}

impedance_surface load_or_build_surface(const nonlinear_circuit& nc,
                                        const grid2d& grid,
                                        const solver_settings& settings,
                                        const std::string& cache_dir) {
    const std::string dir = resolve_cache_dir(cache_dir);
    const std::string key = surface_cache_key(nc, grid, settings);
    const std::string csv_path = dir + "/" + key + ".csv";

    std::error_code ec;
    if (std::filesystem::exists(csv_path, ec)) {
        try {
            impedance_surface cached = surface_from_csv(read_text_file(csv_path));
            if (cached.grid.f_hz == grid.f_hz && cached.grid.p_dbm == grid.p_dbm) {
                cached.provenance = "cache:" + key;
                return cached;
            }
        } catch (const error&) {
            // unreadable cache entry: fall through and rebuild
        }
    }

    impedance_surface surface = build_surface(nc, grid, settings);
    std::filesystem::create_directories(dir, ec);
    if (!ec) {
        try {
            atomic_write_file(csv_path, surface_to_csv(surface));
            atomic_write_file(dir + "/" + key + ".meta.json",
                              std::string("{\n  \"key\": \"") + key +
                                  "\",\n  \"provenance\": \"" + surface.provenance +
                                  "\"\n}\n");
        } catch (const io_error&) {
            // cache write failure is not a build failure
        }
    }
    return surface;
}

} // namespace nltr
