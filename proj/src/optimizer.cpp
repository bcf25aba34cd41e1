#include "nltr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nltr/io.hpp"

namespace nltr {

std::array<double, 6> design_vector::genes() const {
    return {theta1_deg, theta2_deg, theta3_deg, z1, z2, z3};
}

design_vector design_vector::from_genes(const std::array<double, 6>& g) {
    design_vector v;
    v.theta1_deg = g[0];
    v.theta2_deg = g[1];
    v.theta3_deg = g[2];
    v.z1 = g[3];
    v.z2 = g[4];
    v.z3 = g[5];
    return v;
}

switch_design apply_design(const switch_design& base, const design_vector& v) {
    switch_design d = base;
    d.it1.theta_ref_deg = v.theta1_deg;
    d.it2.theta_ref_deg = v.theta2_deg;
    d.it3.theta_ref_deg = v.theta3_deg;
    d.it1.z0 = v.z1;
    d.it2.z0 = v.z2;
    d.it3.z0 = v.z3;
    return d;
}

design_vector extract_design(const switch_design& d) {
    design_vector v;
    v.theta1_deg = d.it1.theta_ref_deg;
    v.theta2_deg = d.it2.theta_ref_deg;
    v.theta3_deg = d.it3.theta_ref_deg;
    v.z1 = d.it1.z0;
    v.z2 = d.it2.z0;
    v.z3 = d.it3.z0;
    return v;
}

void objective_spec::validate() const {
    if (!(f_start_hz > 0.0) || !(f_stop_hz > f_start_hz))
        throw config_error("objective band must satisfy 0 < f_start < f_stop");
    if (band_points < 1)
        throw config_error("objective band_points must be >= 1");
    const double ws[] = {weight_rx_il, weight_tx_il, weight_isolation,
                         weight_return_loss};
    double sum = 0.0;
    for (double w : ws) {
        if (!(w >= 0.0))
            throw config_error("objective weights must be >= 0");
        sum += w;
    }
    if (!(sum > 0.0))
        throw config_error("objective weights must not all be zero");
    op.validate();
}

namespace {

double hinge(double x) { return x > 0.0 ? x : 0.0; }

std::vector<double> band_axis(const objective_spec& spec) {
    if (spec.band_points == 1) return {spec.f_start_hz};
    return linspace(spec.f_start_hz, spec.f_stop_hz, spec.band_points);
}

} // namespace

double evaluate_objective(const design_vector& v, const objective_spec& spec,
                          const switch_design& base, const surface_set& surfaces) {
    spec.validate();
    const switch_design d = apply_design(base, v);
    double worst = 0.0;
    try {
        for (double f : band_axis(spec)) {
            const operating_point rx = solve_operating_point(
                d, surfaces, f, port::ant, spec.rx_probe_dbm, spec.op);
            const operating_point tx = solve_operating_point(
                d, surfaces, f, port::tx, spec.tx_probe_dbm, spec.op);
            const double iso = std::min(rx.isolation_db, tx.isolation_db);
            const double point_score =
                spec.weight_rx_il * hinge(rx.il_ant_rx_db - spec.target_rx_il_db) +
                spec.weight_tx_il * hinge(tx.il_ant_tx_db - spec.target_tx_il_db) +
                spec.weight_isolation * hinge(spec.target_isolation_db - iso) +
                spec.weight_return_loss * hinge(spec.target_return_loss_db - rx.rl_db);
            worst = std::max(worst, point_score);
        }
    } catch (const non_convergence&) {
        return non_convergence_penalty;
    }
    return worst;
}

void ga_config::validate() const {
    if (population < 2)
        throw config_error("ga.population must be >= 2");
    if (generations < 1)
        throw config_error("ga.generations must be >= 1");
    if (tournament < 1 || tournament > population)
        throw config_error("ga.tournament must lie in [1, population]");
    if (!(crossover_rate >= 0.0) || !(crossover_rate <= 1.0))
        throw config_error("ga.crossover_rate must lie in [0, 1]");
    if (!(mutation_sigma >= 0.0) || !(mutation_sigma <= 1.0))
        throw config_error("ga.mutation_sigma must lie in [0, 1]");
    if (elitism < 1 || elitism > population)
        throw config_error("ga.elitism must lie in [1, population]");
    if (!(theta_min_deg > 0.0) || !(theta_max_deg < 180.0) ||
        !(theta_min_deg < theta_max_deg))
        throw config_error("ga theta bounds must satisfy 0 < min < max < 180");
    if (!(z_min > 0.0) || !(z_min < z_max))
        throw config_error("ga z0 bounds must satisfy 0 < min < max");
}

namespace {

struct gene_bounds {
    std::array<double, 6> lo;
    std::array<double, 6> hi;
};

gene_bounds bounds_of(const ga_config& cfg) {
    gene_bounds b;
    for (std::size_t i = 0; i < 3; ++i) {
        b.lo[i] = cfg.theta_min_deg;
        b.hi[i] = cfg.theta_max_deg;
    }
    for (std::size_t i = 3; i < 6; ++i) {
        b.lo[i] = cfg.z_min;
        b.hi[i] = cfg.z_max;
    }
    return b;
}

std::array<double, 6> random_genes(std::mt19937_64& rng, const gene_bounds& b) {
    std::array<double, 6> g;
    for (std::size_t i = 0; i < 6; ++i) {
        std::uniform_real_distribution<double> u(b.lo[i], b.hi[i]);
        g[i] = u(rng);
    }
    return g;
}

std::size_t tournament_pick(std::mt19937_64& rng, const std::vector<double>& scores,
                            std::size_t rounds) {
    std::uniform_int_distribution<std::size_t> u(0, scores.size() - 1);
    std::size_t best = u(rng);
    for (std::size_t r = 1; r < rounds; ++r) {
        const std::size_t cand = u(rng);
        if (scores[cand] < scores[best]) best = cand;
    }
    return best;
}

} // namespace

design_vector ga_config::random_design(std::uint64_t seed_value) const {
    std::mt19937_64 rng(seed_value);
    return design_vector::from_genes(random_genes(rng, bounds_of(*this)));
}

ga_report ga_optimize(const ga_config& cfg, const objective_spec& spec,
                      const switch_design& base, const surface_set& surfaces) {
    cfg.validate();
    spec.validate();
    const gene_bounds b = bounds_of(cfg);
    std::mt19937_64 rng(cfg.seed);

    // Warm start: slot 0 carries the base design so elitism pins the report
    // best at or below the base score.
    std::vector<std::array<double, 6>> pop;
    pop.reserve(cfg.population);
    pop.push_back(extract_design(base).genes());
    while (pop.size() < cfg.population) pop.push_back(random_genes(rng, b));

    ga_report report;
    report.best_score = non_convergence_penalty + 1.0;
    std::vector<double> scores(cfg.population);

    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        // All RNG draws for this generation happened before this loop, so the
        // evaluations are order-free (parallel == serial).
        for (std::size_t i = 0; i < cfg.population; ++i) {
            scores[i] = evaluate_objective(design_vector::from_genes(pop[i]), spec,
                                           base, surfaces);
            ++report.evaluations;
        }

        std::vector<std::size_t> order(cfg.population);
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t c) {
                             return scores[a] < scores[c];
                         });

        const double gen_best = scores[order.front()];
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(cfg.population);
        report.best_trace.push_back(gen_best);
        report.mean_trace.push_back(mean);
        if (gen_best < report.best_score) {
            report.best_score = gen_best;
            report.best = design_vector::from_genes(pop[order.front()]);
        }

        if (gen + 1 == cfg.generations) break;

        std::vector<std::array<double, 6>> next;
        next.reserve(cfg.population);
        for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[e]]);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        while (next.size() < cfg.population) {
            const std::size_t pa = tournament_pick(rng, scores, cfg.tournament);
            const std::size_t pb = tournament_pick(rng, scores, cfg.tournament);
            std::array<double, 6> child = pop[pa];
            if (unit(rng) < cfg.crossover_rate)
                for (std::size_t g = 0; g < 6; ++g)
                    if (unit(rng) < 0.5) child[g] = pop[pb][g];
            if (cfg.mutation_sigma > 0.0)
                for (std::size_t g = 0; g < 6; ++g) {
                    std::normal_distribution<double> n(
                        0.0, cfg.mutation_sigma * (b.hi[g] - b.lo[g]));
                    child[g] = std::clamp(child[g] + n(rng), b.lo[g], b.hi[g]);
                }
            next.push_back(child);
        }
        pop = std::move(next);
    }
    return report;
}

std::string ga_trace_csv(const ga_report& report) {
    std::ostringstream out;
    out << "generation,best_score,mean_score\n";
    for (std::size_t g = 0; g < report.best_trace.size(); ++g)
        out << g << ',' << fmt_g17(report.best_trace[g]) << ','
            << fmt_g17(report.mean_trace[g]) << "\n";
    return out.str();
}

std::string design_config_fragment(const design_vector& v, double f_ref_hz) {
    nlohmann::ordered_json lines;
    const char* names[3] = {"it1", "it2", "it3"};
    const double thetas[3] = {v.theta1_deg, v.theta2_deg, v.theta3_deg};
    const double zs[3] = {v.z1, v.z2, v.z3};
    for (int i = 0; i < 3; ++i) {
        lines[names[i]] = {{"z0", zs[i]},
                           {"theta_deg", thetas[i]},
                           {"f_ref_hz", f_ref_hz}};
    }
    nlohmann::ordered_json fragment;
    fragment["lines"] = lines;
    return fragment.dump(2) + "\n";
}

} // namespace nltr
