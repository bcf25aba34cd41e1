#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nltr/solvers.hpp"
#include "nltr/units.hpp"

namespace nltr {

// Precomputed grounded-NC impedance over a frequency x power grid; the
// runtime stand-in for re-solving the nonlinear circuit per query.
struct impedance_surface {
    grid2d grid;
    std::vector<cpx> values; // row-major: [f_index * cols + p_index], ohms
    std::string provenance;  // solver id + tolerances

    cpx at(std::size_t f_index, std::size_t p_index) const {
        return values[f_index * grid.cols() + p_index];
    }

    void validate_shape() const; // throws error on dimension mismatch
};

// Default characterization grid: 46 frequencies (0.6-1.5 GHz, 20 MHz step)
// x 36 powers (-40..+30 dBm, 2 dB step).
grid2d default_surface_grid();

// Solve every grid cell independently (cells are parallelized across
// hardware threads). Any per-cell convergence failure aborts the build with
// a non_convergence listing the failed (f, p) cells.
impedance_surface build_surface(const nonlinear_circuit& nc, const grid2d& grid,
                                const solver_settings& settings);

// Bilinear interpolation on the (Hz, dBm) axes, Re and Im independently.
// Grid nodes reproduce stored values bit-exactly. Queries outside the grid
// raise range_error naming the offending axis; no extrapolation.
cpx interpolate(const impedance_surface& surface, double f_hz, double p_dbm);

// Operating-point lookup policy: the power coordinate saturates at the grid
// edges (delivered powers below/above the characterized range reuse the edge
// impedance); frequency stays strict. This is a solver policy, distinct from
// plain interpolate().
cpx interpolate_power_clamped(const impedance_surface& surface, double f_hz,
                              double p_dbm);

// CSV schema: header `f_hz,p_dbm,re_ohm,im_ohm`, row-major by frequency then
// power, 17-significant-digit floats, '\n' line endings.
std::string surface_to_csv(const impedance_surface& surface);
impedance_surface surface_from_csv(const std::string& csv_text);

// Content hash (FNV-1a over a canonical serialization of diode card, NC
// topology, grid and solver settings) keying the on-disk cache.
std::string surface_cache_key(const nonlinear_circuit& nc, const grid2d& grid,
                              const solver_settings& settings);

// Cache directory resolution order: explicit argument, $NLTR_CACHE_DIR,
// ./.nltr-cache. Returns the chosen directory.
std::string resolve_cache_dir(const std::string& explicit_dir);

// Load the surface from cache if present (key match), otherwise build and
// cache it (<key>.csv + <key>.meta.json, atomic writes). Unreadable or
// mismatched cache entries are rebuilt, never trusted.
impedance_surface load_or_build_surface(const nonlinear_circuit& nc,
                                        const grid2d& grid,
                                        const solver_settings& settings,
                                        const std::string& cache_dir);

} // namespace nltr
