#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nltr/network.hpp"

namespace nltr {

// The six synthesized line parameters.
struct design_vector {
    double theta1_deg = 28.0;
    double theta2_deg = 86.0;
    double theta3_deg = 25.0;
    double z1 = 89.0;
    double z2 = 97.0;
    double z3 = 84.0;

    std::array<double, 6> genes() const;
    static design_vector from_genes(const std::array<double, 6>& g);
};

// base supplies f_ref per line, the NC slots, and z_p; v supplies the six
// synthesized parameters.
switch_design apply_design(const switch_design& base, const design_vector& v);
design_vector extract_design(const switch_design& d);

struct objective_spec {
    double f_start_hz = 0.8e9;
    double f_stop_hz = 1.3e9;
    std::size_t band_points = 11;
    double rx_probe_dbm = -30.0;
    double tx_probe_dbm = 30.0;
    double weight_rx_il = 1.0;
    double weight_tx_il = 1.0;
    double weight_isolation = 1.0;
    double weight_return_loss = 1.0;
    // Hinge targets in dB; a metric meeting its target contributes zero.
    double target_rx_il_db = 1.0;
    double target_tx_il_db = 1.0;
    double target_isolation_db = 15.0;
    double target_return_loss_db = 10.0;
    operating_point_settings op{};

    void validate() const; // weights >= 0 and not all zero, band valid
};

// Finite score charged to a design whose operating point fails to settle at
// any probe: rejected, not crashed.
inline constexpr double non_convergence_penalty = 1e6;

// Worst-case (over the band) weighted hinge loss; >= 0, 0 means every target
// met at every band point. Bounds are NOT enforced here.
double evaluate_objective(const design_vector& v, const objective_spec& spec,
                          const switch_design& base, const surface_set& surfaces);

struct ga_config {
    std::size_t population = 32;
    std::size_t generations = 40;
    std::size_t tournament = 3;
    double crossover_rate = 0.9;  // probability of uniform crossover per child
    double mutation_sigma = 0.05; // Gaussian sigma as fraction of bound width
    std::size_t elitism = 2;
    std::uint64_t seed = 1;
    double theta_min_deg = 10.0;
    double theta_max_deg = 120.0;
    double z_min = 30.0;
    double z_max = 120.0;

    void validate() const;
    design_vector random_design(std::uint64_t seed) const;
};

struct ga_report {
    design_vector best{};
    double best_score = 0.0;
    std::vector<double> best_trace; // per-generation best (non-increasing)
    std::vector<double> mean_trace;
    std::size_t evaluations = 0;
};

// Tournament selection, uniform crossover, per-gene Gaussian mutation with
// clamping, elitism. Individual 0 of the initial population is the base
// design itself (warm start), so the result never scores worse than it.
// Deterministic for a fixed seed.
ga_report ga_optimize(const ga_config& cfg, const objective_spec& spec,
                      const switch_design& base, const surface_set& surfaces);

// "generation,best_score,mean_score" rows.
std::string ga_trace_csv(const ga_report& report);
// JSON fragment with the best design's three line definitions, ingestible as
// the "lines" section of a run config.
std::string design_config_fragment(const design_vector& v, double f_ref_hz);

} // namespace nltr
