#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "recur/verification.hpp"

using namespace recur;

TEST_CASE("brute-force ladder agrees with the accelerated one on traces") {
    const auto alpha2 = partition_scheme::alphabet(2);
    const auto dy = partition_scheme::dyadic();

    past_window w1{{1, 0, 1, 1, 0, 1}};
    REQUIRE(ladders_equal(brute_force_ladder(w1, alpha2), build_ladder(w1, alpha2)));

    past_window w2{std::vector<double>(100, 0.7)};  // deep ladder, hits the level cap
    const auto b2 = brute_force_ladder(w2, dy);
    REQUIRE(ladders_equal(b2, build_ladder(w2, dy)));
    REQUIRE(b2.kappa() == 56);

    // values sitting exactly on cell boundaries
    past_window w3{{0.5, 0.25, 0.5, 0.5, 0.25, 0.5, -0.5, 0.5, 0.25, 0.5}};
    REQUIRE(ladders_equal(brute_force_ladder(w3, dy), build_ladder(w3, dy)));
}

TEST_CASE("randomized equivalence harness finds no disagreement") {
    const auto res = run_equivalence(120, 60, 20260818);
    REQUIRE(res.checked == 180);
    REQUIRE(res.mismatches == 0);
    REQUIRE(res.ok());
}

TEST_CASE("matched-sample frequency reproduces the next-value frequency") {
    // independent coins: on the atom {last two symbols = (1,1)} the matched
    // value and the upcoming value are both fresh coins, so both joint
    // frequencies estimate p^3
    identity_check_config cfg;
    cfg.j = 2;
    cfg.atom_pattern = {1, 1};
    cfg.C = query_set::from_points({1.0});
    cfg.paths = 20000;
    cfg.window_len = 256;

    const auto rep = run_identity_check(iid_bernoulli(0.4), partition_scheme::alphabet(2),
                                        cfg, 1234);
    REQUIRE(rep.verdict == identity_check_report::verdict_t::pass);
    REQUIRE(rep.n_paths == 20000);
    REQUIRE(rep.undetermined == 0);
    const double atom_rate = static_cast<double>(rep.n_atom) / 20000.0;
    REQUIRE(atom_rate == Catch::Approx(0.16).margin(0.012));    // p^2
    REQUIRE(rep.freq_x0 == Catch::Approx(0.064).margin(0.008)); // p^3
    REQUIRE(rep.freq_tau == Catch::Approx(0.064).margin(0.008));
    REQUIRE(rep.se_pooled > 0.0);
}

TEST_CASE("conditioning on the most recent cell only") {
    identity_check_config cfg;
    cfg.kind = identity_check_config::atom_kind::last_cell;
    cfg.atom_pattern = {1};
    cfg.C = query_set::from_points({1.0});
    cfg.paths = 20000;
    cfg.window_len = 128;
    const auto rep = run_identity_check(iid_bernoulli(0.4), partition_scheme::alphabet(2),
                                        cfg, 4321);
    REQUIRE(rep.verdict == identity_check_report::verdict_t::pass);
    const double atom_rate = static_cast<double>(rep.n_atom) / 20000.0;
    REQUIRE(atom_rate == Catch::Approx(0.4).margin(0.015));
    REQUIRE(rep.freq_x0 == Catch::Approx(0.16).margin(0.012));  // p^2
    REQUIRE(rep.freq_tau == Catch::Approx(0.16).margin(0.012));

    cfg.atom_pattern = {1, 1};  // last_cell takes a single cell
    REQUIRE_THROWS_AS(
        run_identity_check(iid_bernoulli(0.4), partition_scheme::alphabet(2), cfg, 1),
        std::invalid_argument);
}

TEST_CASE("identity check is honest about undecidable configurations") {
    identity_check_config cfg;
    cfg.atom_pattern = {0, 1};  // contradicts the stage-1 recurrence it conditions on
    cfg.C = query_set::from_points({1.0});
    cfg.paths = 500;
    cfg.window_len = 64;
    const auto rep = run_identity_check(iid_bernoulli(0.5), partition_scheme::alphabet(2),
                                        cfg, 99);
    REQUIRE(rep.n_atom == 0);
    REQUIRE(rep.verdict == identity_check_report::verdict_t::inconclusive);

    cfg.atom_pattern = {1, 1};
    cfg.paths = 0;
    const auto rep2 = run_identity_check(iid_bernoulli(0.5), partition_scheme::alphabet(2),
                                         cfg, 99);
    REQUIRE(rep2.verdict == identity_check_report::verdict_t::inconclusive);
}

TEST_CASE("identity check rejects malformed configurations") {
    identity_check_config cfg;
    cfg.atom_pattern = {1, 1};
    cfg.C = query_set::from_points({1.0});
    cfg.j = 1;
    REQUIRE_THROWS_AS(
        run_identity_check(iid_bernoulli(0.5), partition_scheme::alphabet(2), cfg, 1),
        std::invalid_argument);
    cfg.j = 2;
    cfg.atom_pattern = {};
    REQUIRE_THROWS_AS(
        run_identity_check(iid_bernoulli(0.5), partition_scheme::alphabet(2), cfg, 1),
        std::invalid_argument);
    cfg.atom_pattern = {1, 1};
    cfg.window_len = 2;
    REQUIRE_THROWS_AS(
        run_identity_check(iid_bernoulli(0.5), partition_scheme::alphabet(2), cfg, 1),
        std::invalid_argument);
}

TEST_CASE("report aggregation skips NA rows and computes order statistics") {
    convergence_report rep;
    rep.records = {
        {"p", 8, 0, 1, "err", 3.0, false}, {"p", 8, 1, 1, "err", 1.0, false},
        {"p", 8, 2, 1, "err", 2.0, false}, {"p", 8, 3, 0, "err", 0.0, true},
        {"p", 8, 4, 1, "other", 9.0, false}, {"p", 16, 0, 1, "err", 4.0, false},
    };
    REQUIRE(rep.values("err", 8) == std::vector<double>{3.0, 1.0, 2.0});
    REQUIRE(rep.median_of("err", 8) == 2.0);
    REQUIRE(rep.mean_of("err", 8) == 2.0);
    rep.records.push_back({"p", 8, 5, 1, "err", 4.0, false});
    REQUIRE(rep.median_of("err", 8) == 2.5);  // even count averages the middle pair
    REQUIRE_THROWS_AS(rep.median_of("missing", 8), std::runtime_error);
}

TEST_CASE("size ladders must be positive and strictly increasing") {
    REQUIRE_THROWS_AS(check_sizes({}), std::invalid_argument);
    REQUIRE_THROWS_AS(check_sizes({0, 4}), std::invalid_argument);
    REQUIRE_THROWS_AS(check_sizes({4, 4}), std::invalid_argument);
    REQUIRE_THROWS_AS(check_sizes({8, 4}), std::invalid_argument);
    REQUIRE_NOTHROW(check_sizes({1, 4, 64}));
}

TEST_CASE("fixed-window experiment emits the advertised grid of records") {
    consistency_options opts;
    opts.query = query_set::from_points({1.0});
    opts.cdf_grid = {-0.5, 0.0, 0.5, 1.0};
    const auto rep = consistency_experiment(markov_chain({{0.9, 0.1}, {0.2, 0.8}}),
                                            partition_scheme::alphabet(2), {64, 256}, 5,
                                            777, opts);
    // 6 metrics x 2 sizes x 5 seeds
    REQUIRE(rep.records.size() == 60);
    std::set<std::string> metrics;
    for (const auto& r : rep.records) {
        metrics.insert(r.metric);
        REQUIRE((r.t == 64 || r.t == 256));
        REQUIRE(!r.na);  // binary windows this long always contain a recurrence
        REQUIRE(r.k >= 1);
        REQUIRE(r.process == "markov");
        if (r.metric != "estimate_mean") {
            REQUIRE(r.value >= 0.0);
            REQUIRE(r.value <= 1.0);
        }
    }
    REQUIRE(metrics == std::set<std::string>{"tv", "kolmogorov", "abs_mean_err", "oracle_mean",
                                             "estimate_mean", "prob_query"});
}

TEST_CASE("processes without closed-form laws still yield raw estimates") {
    const auto rep = consistency_experiment(rotation_process(), partition_scheme::alphabet(2),
                                            {32, 64}, 3, 5);
    REQUIRE(rep.records.size() == 6);  // only the raw estimate column
    for (const auto& r : rep.records) REQUIRE(r.metric == "estimate_mean");
}

TEST_CASE("forecasting a constant process is exact at every checkpoint") {
    const auto rep = online_experiment(constant_process(2.5), partition_scheme::dyadic(),
                                       {2, 8, 32}, 3, 11);
    REQUIRE(rep.records.size() == 9);
    for (const auto& r : rep.records) {
        REQUIRE(r.metric == "abs_online_err");
        REQUIRE(!r.na);
        REQUIRE(r.value == 0.0);
    }
}

TEST_CASE("forecasting from a one-point prefix is reported as undefined") {
    const auto rep = online_experiment(iid_bernoulli(0.5), partition_scheme::alphabet(2),
                                       {1, 4}, 2, 13);
    REQUIRE(rep.records.size() == 4);
    for (const auto& r : rep.records) {
        if (r.t == 1) {
            REQUIRE(r.na);
            REQUIRE(r.k == 0);
        }
    }
    REQUIRE_THROWS_AS(
        online_experiment(rotation_process(), partition_scheme::alphabet(2), {4}, 1, 1),
        std::invalid_argument);
}

TEST_CASE("classification experiment is exact when labels are certain") {
    const auto model = labeled_cell_process({labeled_cell{0.25, 0x1.0p-16, 1.0}});
    const auto rep =
        classification_experiment(model, partition_scheme::dyadic(), {2, 8}, 3, 17);
    REQUIRE(rep.records.size() == 24);  // 4 metrics x 2 sizes x 3 seeds
    for (const auto& r : rep.records) {
        REQUIRE(!r.na);
        REQUIRE(r.value == 0.0);
    }
    REQUIRE_THROWS_AS(classification_experiment(iid_bernoulli(0.5),
                                                partition_scheme::alphabet(2), {4}, 1, 1),
                      std::invalid_argument);
}

TEST_CASE("reports render to a self-describing table and reproduce byte for byte") {
    const auto run = [] {
        return consistency_experiment(markov_chain({{0.9, 0.1}, {0.2, 0.8}}),
                                      partition_scheme::alphabet(2), {32, 64}, 4, 4242);
    };
    const auto csv1 = report_to_csv(run(), {"tool 0.1.0", "master_seed=4242"});
    const auto csv2 = report_to_csv(run(), {"tool 0.1.0", "master_seed=4242"});
    REQUIRE(csv1 == csv2);
    REQUIRE(csv1.rfind("# tool 0.1.0\n# master_seed=4242\nprocess,t,seed,k,metric_name,value\n",
                       0) == 0);
    REQUIRE(csv1.find("markov,32,0,") != std::string::npos);

    convergence_report na_rep;
    na_rep.records = {{"p", 1, 0, 0, "err", 0.0, true}};
    REQUIRE(report_to_csv(na_rep, {}) == "process,t,seed,k,metric_name,value\np,1,0,0,err,NA\n");
}
