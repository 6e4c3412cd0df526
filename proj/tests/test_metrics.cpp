#include <doctest.h>

#include <cmath>

#include "trom/errors.hpp"
#include "trom/metrics.hpp"
#include "test_support.hpp"

using namespace trom;
using namespace trom::testsupport;

TEST_CASE("trajectory norm") {
    std::mt19937_64 rng(121);
    const Matrix q = random_matrix(rng, 5, 7);
    const SpdOperator eye = SpdOperator::identity(5);
    CHECK(trajectory_norm(q, eye) == doctest::Approx(q.norm()).epsilon(1e-14));

    const SpdOperator four = SpdOperator::diagonal(Vector::Constant(3, 4.0));
    const Matrix col = random_matrix(rng, 3, 1);
    CHECK(trajectory_norm(col, four) == doctest::Approx(2.0 * col.norm()).epsilon(1e-14));

    CHECK(trajectory_norm(Matrix::Zero(3, 4), four) == 0.0);
}

TEST_CASE("relative rom error") {
    std::mt19937_64 rng(122);
    const Matrix fom = random_matrix(rng, 4, 6);
    const SpdOperator m = random_spd(rng, 4);
    CHECK(relative_rom_error(fom, fom, m) == 0.0);
    CHECK(relative_rom_error(fom, Matrix::Zero(4, 6), m) == doctest::Approx(1.0));
    CHECK(relative_rom_error(fom, 2.0 * fom, m) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(relative_rom_error(Matrix::Zero(4, 6), fom, m), NumericalError);
    CHECK_THROWS_AS(relative_rom_error(fom, Matrix::Zero(4, 5), m), UsageError);
}

TEST_CASE("percentile matches a sort-based oracle on integer samples") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t n = 1 + rng() % 20;
        std::vector<double> values(n);
        for (double& v : values) v = static_cast<double>(rng() % 10);
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const double h = (static_cast<double>(n) - 1.0) * q;
            const size_t lo = static_cast<size_t>(h);
            const double expect = (lo + 1 < n)
                                      ? sorted[lo] + (h - static_cast<double>(lo)) *
                                                         (sorted[lo + 1] - sorted[lo])
                                      : sorted.back();
            CHECK(percentile(values, q) == expect);
        }
    }
    CHECK_THROWS_AS(percentile({}, 0.5), UsageError);
    CHECK_THROWS_AS(percentile({1.0}, 1.5), UsageError);
}

TEST_CASE("rank sweep keeps grid order and aggregates per cell") {
    const std::vector<std::string> methods = {"a", "b"};
    const std::vector<Index> ranks = {1, 3};
    const SweepResult result =
        rank_sweep(methods, ranks, 3, [](const std::string& method, Index rank, Index param) {
            const double base = (method == "a") ? 10.0 : 20.0;
            return std::make_pair(base + rank, base + rank + param);
        });
    REQUIRE(result.rows.size() == 12);
    CHECK(result.failures.empty());
    CHECK(result.rows[0].method == "a");
    CHECK(result.rows[0].rank == 1);
    CHECK(result.rows[0].param_index == 0);
    CHECK(result.rows[11].method == "b");
    CHECK(result.rows[11].rank == 3);
    CHECK(result.rows[11].param_index == 2);

    const auto aggs = aggregate_sweep(result.rows);
    REQUIRE(aggs.size() == 4);
    CHECK(aggs[0].method == "a");
    CHECK(aggs[0].rank == 1);
    CHECK(aggs[0].median == doctest::Approx(12.0));  // rom errors 11, 12, 13
    CHECK(aggs[0].q25 == doctest::Approx(11.5));
    CHECK(aggs[0].q75 == doctest::Approx(12.5));
}

TEST_CASE("rank sweep retains partial results on failure") {
    const SweepResult result = rank_sweep(
        {"only"}, {2}, 4, [](const std::string&, Index, Index param) {
            if (param == 2) throw NumericalError("synthetic failure");
            return std::make_pair(1.0, 2.0);
        });
    CHECK(result.rows.size() == 3);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures[0].find("(only, 2, 2)") != std::string::npos);
}

TEST_CASE("single-cell sweep equals the direct call") {
    const SweepResult result =
        rank_sweep({"m"}, {5}, 1, [](const std::string&, Index, Index) {
            return std::make_pair(0.25, 0.75);
        });
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].projection_error == 0.25);
    CHECK(result.rows[0].rom_error == 0.75);
    const auto aggs = aggregate_sweep(result.rows);
    REQUIRE(aggs.size() == 1);
    CHECK(aggs[0].median == 0.75);
    CHECK(aggs[0].q25 == 0.75);
    CHECK(aggs[0].q75 == 0.75);
}

TEST_CASE("representation budget bookkeeping") {
    const RepresentationErrorBudget ok = check_representation_bound(0.42, 0.1, 2.0, 0.4);
    CHECK(ok.tucker_term == doctest::Approx(0.04));
    CHECK(ok.svd_tail == 0.4);
    CHECK(ok.holds());
    CHECK_FALSE(ok.interp_term_estimated);

    const RepresentationErrorBudget bad = check_representation_bound(1.0, 0.1, 2.0, 0.4);
    CHECK_FALSE(bad.holds());
}

TEST_CASE("rom bound constants") {
    const double l_f = 2.0, tau = 0.5;
    const RomErrorBound bound = check_rom_bound(l_f, tau, 1.0, 1.5);
    const double c_ref = std::sqrt((std::exp(2.0 * l_f * tau) - 1.0) / (2.0 * l_f));
    CHECK(bound.c_tau == doctest::Approx(c_ref).epsilon(1e-12));
    CHECK(bound.factor == doctest::Approx(1.0 + l_f * c_ref * std::sqrt(tau)).epsilon(1e-12));
    CHECK(bound.holds());

    const RomErrorBound tight = check_rom_bound(l_f, tau, 1.0, 1e9);
    CHECK_FALSE(tight.holds());
    CHECK_THROWS_AS(check_rom_bound(-1.0, tau, 1.0, 1.0), UsageError);
}
