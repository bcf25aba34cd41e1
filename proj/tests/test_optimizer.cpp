#include <doctest.h>

#include <array>
#include <cmath>

#include <json.hpp>

#include "helpers.hpp"
#include "nltr/errors.hpp"
#include "nltr/network.hpp"
#include "nltr/optimizer.hpp"

using namespace nltr;
using nltr_test::reference_surface;

namespace {

surface_set surfaces() {
    const impedance_surface* s = &reference_surface();
    return {s, s, s, s};
}

const switch_design base{};

ga_config small_ga() {
    ga_config cfg{};
    cfg.population = 8;
    cfg.generations = 5;
    cfg.seed = 42;
    return cfg;
}

} // namespace

TEST_CASE("design vector round-trips through genes and designs") {
    const design_vector v{31.0, 79.0, 22.5, 95.0, 60.0, 110.0};
    CHECK(design_vector::from_genes(v.genes()).theta3_deg == 22.5);
    CHECK(design_vector::from_genes(v.genes()).z3 == 110.0);

    const switch_design d = apply_design(base, v);
    CHECK(d.it1.theta_ref_deg == 31.0);
    CHECK(d.it2.theta_ref_deg == 79.0);
    CHECK(d.it3.theta_ref_deg == 22.5);
    CHECK(d.it1.z0 == 95.0);
    CHECK(d.it2.z0 == 60.0);
    CHECK(d.it3.z0 == 110.0);
    CHECK(d.it1.f_ref_hz == base.it1.f_ref_hz);
    CHECK(d.z_p == base.z_p);

    const design_vector back = extract_design(d);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(back.genes()[i] == v.genes()[i]);

    // The default-constructed vector is the reference design.
    const design_vector ref = extract_design(base);
    CHECK(ref.theta1_deg == 28.0);
    CHECK(ref.theta2_deg == 86.0);
    CHECK(ref.theta3_deg == 25.0);
    CHECK(ref.z1 == 89.0);
    CHECK(ref.z2 == 97.0);
    CHECK(ref.z3 == 84.0);
}

TEST_CASE("objective scores the reference design and punishes vandalism") {
    const objective_spec spec{};
    const double ref_score =
        evaluate_objective(extract_design(base), spec, base, surfaces());
    CHECK(ref_score >= 0.0);
    CHECK(ref_score < 100.0);

    // Degrading all three sections far from the reference must not score
    // better.
    const design_vector mangled{119.0, 12.0, 119.0, 31.0, 31.0, 119.0};
    const double bad_score =
        evaluate_objective(mangled, spec, base, surfaces());
    CHECK(bad_score > ref_score);
}

TEST_CASE("objective charges the finite penalty when probes cannot settle") {
    objective_spec spec{};
    spec.op.max_iterations = 1;
    spec.op.tolerance_db = 1e-12;
    const double score =
        evaluate_objective(extract_design(base), spec, base, surfaces());
    CHECK(score == non_convergence_penalty);
}

TEST_CASE("synthesis is deterministic for a fixed seed") {
    const objective_spec spec{};
    const ga_config cfg = small_ga();
    const ga_report a = ga_optimize(cfg, spec, base, surfaces());
    const ga_report b = ga_optimize(cfg, spec, base, surfaces());
    CHECK(a.best_score == b.best_score);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(a.best.genes()[i] == b.best.genes()[i]);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.evaluations == cfg.population * cfg.generations);
    CHECK(ga_trace_csv(a) == ga_trace_csv(b));

    // A different seed explores a different path.
    ga_config other = cfg;
    other.seed = 43;
    const ga_report c = ga_optimize(other, spec, base, surfaces());
    bool differs = c.best_score != a.best_score;
    for (std::size_t i = 0; i < 6; ++i)
        differs = differs || c.best.genes()[i] != a.best.genes()[i];
    CHECK(differs);
}

TEST_CASE("elitism keeps the best trace non-increasing and the warm start "
          "bounds the score") {
    const objective_spec spec{};
    const ga_report r = ga_optimize(small_ga(), spec, base, surfaces());
    REQUIRE(r.best_trace.size() == small_ga().generations);
    for (std::size_t g = 1; g < r.best_trace.size(); ++g)
        CHECK(r.best_trace[g] <= r.best_trace[g - 1]);

    const double ref_score =
        evaluate_objective(extract_design(base), spec, base, surfaces());
    CHECK(r.best_score <= ref_score);
    CHECK(r.best_trace.front() <= ref_score); // slot 0 is the base design
}

TEST_CASE("full elitism freezes the population") {
    ga_config cfg = small_ga();
    cfg.elitism = cfg.population;
    const ga_report r = ga_optimize(cfg, objective_spec{}, base, surfaces());
    for (double s : r.best_trace) CHECK(s == r.best_trace.front());
    for (double m : r.mean_trace)
        CHECK(m == doctest::Approx(r.mean_trace.front()).epsilon(1e-12));
}

TEST_CASE("random designs and the best result respect the bounds") {
    const ga_config cfg{};
    for (std::uint64_t k = 0; k < 100; ++k) {
        const design_vector v = cfg.random_design(k);
        for (double theta : {v.theta1_deg, v.theta2_deg, v.theta3_deg}) {
            CHECK(theta >= cfg.theta_min_deg);
            CHECK(theta <= cfg.theta_max_deg);
        }
        for (double z : {v.z1, v.z2, v.z3}) {
            CHECK(z >= cfg.z_min);
            CHECK(z <= cfg.z_max);
        }
    }

    ga_config tight = small_ga();
    tight.theta_min_deg = 20.0;
    tight.theta_max_deg = 100.0;
    tight.z_min = 40.0;
    tight.z_max = 110.0;
    const ga_report r = ga_optimize(tight, objective_spec{}, base, surfaces());
    const design_vector& v = r.best;
    for (double theta : {v.theta1_deg, v.theta2_deg, v.theta3_deg}) {
        CHECK(theta >= tight.theta_min_deg);
        CHECK(theta <= tight.theta_max_deg);
    }
    for (double z : {v.z1, v.z2, v.z3}) {
        CHECK(z >= tight.z_min);
        CHECK(z <= tight.z_max);
    }
}

TEST_CASE("configuration validation rejects degenerate settings") {
    ga_config cfg{};
    cfg.population = 1;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = ga_config{};
    cfg.elitism = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = ga_config{};
    cfg.elitism = cfg.population + 1;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = ga_config{};
    cfg.tournament = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = ga_config{};
    cfg.crossover_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = ga_config{};
    cfg.theta_min_deg = 120.0;
    cfg.theta_max_deg = 10.0;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    objective_spec spec{};
    spec.weight_rx_il = 0.0;
    spec.weight_tx_il = 0.0;
    spec.weight_isolation = 0.0;
    spec.weight_return_loss = 0.0;
    CHECK_THROWS_AS(spec.validate(), config_error);
}

TEST_CASE("trace serialization and the design fragment are well-formed") {
    const ga_report r = ga_optimize(small_ga(), objective_spec{}, base,
                                    surfaces());
    const std::string csv = ga_trace_csv(r);
    CHECK(csv.rfind("generation,best_score,mean_score\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + r.best_trace.size());

    const std::string fragment = design_config_fragment(r.best, 1e9);
    const nlohmann::json j = nlohmann::json::parse(fragment);
    CHECK(j.at("lines").at("it1").at("z0").get<double>() == r.best.z1);
    CHECK(j.at("lines").at("it2").at("theta_deg").get<double>() ==
          r.best.theta2_deg);
    CHECK(j.at("lines").at("it3").at("f_ref_hz").get<double>() == 1e9);
}
