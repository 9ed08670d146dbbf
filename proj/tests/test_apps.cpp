#include <cmath>
#include <doctest.h>
#include <fstream>

#include "riskmarket/apps.hpp"
#include "riskmarket/detail/rng.hpp"
#include "riskmarket/runner.hpp"

using namespace riskmarket;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

} // namespace

TEST_CASE("opinion pool market converges to the analytic pool") {
    SUBCASE("single agent") {
        const MarketConfig config =
            build_opinion_pool_market({vec({0.8, 0.2})}, {1.0}, 1.0);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        CHECK(out.summary.final_price(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    }
    SUBCASE("three heterogeneous agents") {
        const std::vector<Vector> beliefs{vec({0.7, 0.3}), vec({0.45, 0.55}),
                                          vec({0.9, 0.1})};
        const std::vector<double> thetas{1.0, 0.5, 2.0};
        const MarketConfig config = build_opinion_pool_market(beliefs, thetas, 1.0);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        const Vector pool = analytic_log_pool(beliefs, thetas, 1.0);
        CHECK((out.summary.final_price - pool).lpNorm<Eigen::Infinity>() <= 1e-5);
    }
    SUBCASE("shared belief with a negligible market maker") {
        const Vector q = vec({0.35, 0.65});
        // crowd pooling weight 100x the maker's: the bias toward uniform
        // shrinks to ~1e-3
        const std::vector<Vector> beliefs(10, q);
        const std::vector<double> thetas(10, 0.1);
        const MarketConfig config = build_opinion_pool_market(beliefs, thetas, 1.0);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        const Vector pool = analytic_log_pool(beliefs, thetas, 1.0);
        CHECK((out.summary.final_price - pool).lpNorm<Eigen::Infinity>() <= 1e-5);
        CHECK((out.summary.final_price - q).lpNorm<Eigen::Infinity>() <= 2e-3);
    }
    SUBCASE("zero-probability beliefs are rejected") {
        CHECK_THROWS_AS(build_opinion_pool_market({vec({1.0, 0.0})}, {1.0}, 1.0),
                        error);
    }
}

TEST_CASE("gaussian map market") {
    SUBCASE("closed form across a parameter grid") {
        for (double theta0 : {0.5, 1.0, 2.0}) {
            for (double s1sq : {0.5, 1.0, 2.0}) {
                const auto sol =
                    gaussian_map_closed_form(1.0, std::sqrt(s1sq), 1.0, theta0);
                CHECK(sol.s_star ==
                      doctest::Approx(1.0 / (theta0 + s1sq)).epsilon(1e-12));
                CHECK(sol.mu_map == doctest::Approx(theta0 * sol.s_star).epsilon(1e-12));
            }
        }
    }
    SUBCASE("engine equilibrium matches the closed form") {
        const MarketConfig config = build_gaussian_map_market(1.0, 1.0, 1.0, 1.0);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        CHECK(std::abs(out.run.state.inventory(0) - 0.5) <= 1e-8);
        CHECK(std::abs(out.summary.final_price(0) - 0.5) <= 1e-8);
    }
    SUBCASE("zero likelihood mean trades nothing") {
        const MarketConfig config = build_gaussian_map_market(0.0, 1.0, 1.0, 1.0);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        CHECK(std::abs(out.run.state.inventory(0)) <= 1e-12);
    }
    SUBCASE("a strong prior pins the estimate near zero") {
        const MarketConfig config = build_gaussian_map_market(1.0, 1.0, 1.0, 1e6);
        const RunOutput out = run_config(config);
        CHECK(std::abs(out.run.state.inventory(0)) <= 2e-6);
    }
    SUBCASE("general hyperprior shifts the posterior mean") {
        const double mu0 = 0.4, sigma0 = 2.0;
        const auto sol = gaussian_map_closed_form(1.0, 1.0, 1.0, 1.0, mu0, sigma0);
        const MarketConfig config =
            build_gaussian_map_market(1.0, 1.0, 1.0, 1.0, mu0, sigma0);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        CHECK(std::abs(out.run.state.inventory(0) - sol.s_star) <= 1e-8);
        CHECK(std::abs(out.summary.final_price(0) - sol.mu_map) <= 1e-8);
    }
}

TEST_CASE("reference logistic solver") {
    SUBCASE("zero features give zero weights") {
        Dataset data;
        data.features = Matrix::Zero(10, 2);
        data.labels = Vector::Ones(10);
        CHECK(reference_logistic_solver(data, 1.0).isZero(0.0));
    }
    SUBCASE("1-d separable data matches a dense grid search") {
        Dataset data;
        data.features = Matrix(4, 1);
        data.features << 1.0, 2.0, -1.0, -2.0;
        data.labels = vec({1.0, 1.0, -1.0, -1.0});
        const double lambda = 1.0;
        double best_w = 0.0, best_f = 1e300;
        for (int i = -40000; i <= 40000; ++i) {
            const double w = i * 1e-4;
            const double f = regularized_logistic_objective(data, vec({w}), lambda);
            if (f < best_f) {
                best_f = f;
                best_w = w;
            }
        }
        const Vector w = reference_logistic_solver(data, lambda);
        CHECK(std::abs(w(0) - best_w) <= 1e-4);
    }
}

TEST_CASE("logistic market" * doctest::timeout(60)) {
    SUBCASE("zero features trade nothing") {
        Dataset data;
        data.features = Matrix::Zero(8, 2);
        data.labels = Vector::Ones(8);
        const MarketConfig config = build_logistic_market(data, 0.5);
        const RunOutput out = run_config(config);
        REQUIRE(out.summary.converged);
        CHECK(out.run.state.inventory.isZero(0.0));
    }
    SUBCASE("coordinate-descent market agrees with the reference solver") {
        const Dataset data = make_synthetic_dataset({40, 3, 5, 1.0});
        const double lambda = 0.1;
        const Vector w_ref = reference_logistic_solver(data, lambda);
        const RunOutput out = run_config(build_logistic_market(data, lambda));
        REQUIRE(out.summary.converged);
        CHECK((out.run.state.inventory - w_ref).lpNorm<Eigen::Infinity>() <= 1e-4);
        CHECK(std::abs(regularized_logistic_objective(data, out.run.state.inventory,
                                                      lambda) -
                       regularized_logistic_objective(data, w_ref, lambda)) <= 1e-6);
    }
    SUBCASE("heavy regularization pushes the weights to zero") {
        const Dataset data = make_synthetic_dataset({30, 2, 9, 1.0});
        const RunOutput out = run_config(build_logistic_market(data, 1e5));
        REQUIRE(out.summary.converged);
        CHECK(out.run.state.inventory.lpNorm<Eigen::Infinity>() <= 1e-4);
    }
}

TEST_CASE("csv dataset loading") {
    const std::string path = "test_dataset_tmp.csv";
    {
        std::ofstream out(path);
        out << "x1,x2,y\n";
        out << "0.5,-1.25,1\n";
        out << "-0.75,2.0,-1\n";
    }
    const Dataset data = load_dataset_csv(path);
    CHECK(data.num_rows() == 2);
    CHECK(data.num_features() == 2);
    CHECK(data.features(0, 1) == -1.25);
    CHECK(data.labels(1) == -1.0);
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "0.5,2\n"; // label must be +-1
    }
    CHECK_THROWS_AS(load_dataset_csv(path), error);
    std::remove(path.c_str());
}

TEST_CASE("synthetic datasets are reproducible") {
    const Dataset a = make_synthetic_dataset({20, 3, 42, 1.0});
    const Dataset b = make_synthetic_dataset({20, 3, 42, 1.0});
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    const Dataset c = make_synthetic_dataset({20, 3, 43, 1.0});
    CHECK(a.features != c.features);
}
