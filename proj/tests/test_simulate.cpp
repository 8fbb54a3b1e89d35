#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "tasep/simulate.hpp"

using namespace tasep;

namespace {

bool decreasing(const Config& c) {
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i] >= c[i - 1]) return false;
    return true;
}

// empirical law of one sampler over many streams
template <class F>
std::map<Config, double> empirical(F step, long n) {
    std::map<Config, double> out;
    for (long k = 0; k < n; ++k) out[step(RngStream{7, static_cast<std::uint64_t>(k)})] += 1.0 / n;
    return out;
}

void check_against(const std::map<Config, double>& emp, const oracle::Law& exact, long n) {
    for (const auto& [c, p] : exact) {
        double got = emp.count(c) ? emp.at(c) : 0.0;
        double sd = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(got - p) <= 4 * sd + 1e-12);
    }
    for (const auto& [c, p] : emp) CHECK(exact.count(c) == 1);
}

}  // namespace

TEST_CASE("Bernoulli step examples") {
    CHECK(step_bernoulli({0, -1, -2}, 1.0, {1, 0}) == Config{1, 0, -1});
    CHECK(step_bernoulli({0, -1, -2}, 0.0, {1, 0}) == Config{0, -1, -2});
    const long n = 200000;
    const double p = 0.3;
    auto emp = empirical([&](RngStream r) { return step_bernoulli({0, -1}, p, r); }, n);
    CHECK(std::abs(emp[Config{1, 0}] - p * p) < 4 * std::sqrt(p * p * (1 - p * p) / n));
    CHECK(std::abs(emp[Config{0, -1}] - (1 - p)) < 4 * std::sqrt(p * (1 - p) / n));
    check_against(emp, oracle::bernoulli_step(oracle::point({0, -1}), p), n);
}

TEST_CASE("geometric step examples") {
    CHECK(step_geometric({5, 2, 1}, 0.0, {3, 0}) == Config{5, 2, 1});
    const long n = 200000;
    auto emp = empirical([](RngStream r) { return step_geometric({0, -1}, 0.5, r); }, n);
    CHECK(std::abs(emp[Config{0, -1}] - 0.5) < 4 * std::sqrt(0.25 / n));
    for (const auto& [c, p] : emp) CHECK(c[1] == -1);

    double lost = 0;
    auto exact = oracle::geometric_step(oracle::point({0, -3, -4}), 0.4, 40, &lost);
    auto emp3 = empirical([](RngStream r) { return step_geometric({0, -3, -4}, 0.4, r); }, n);
    for (const auto& [c, p] : exact) {
        double got = emp3.count(c) ? emp3.at(c) : 0.0;
        CHECK(std::abs(got - p) <= 4 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
}

TEST_CASE("continuous evolution") {
    CHECK(evolve_continuous({0, -1}, 0.0, 5.0, {1, 0}) == Config{0, -1});
    CHECK(evolve_continuous({0, -1}, 2.0, 0.0, {1, 0}) == Config{0, -1});
    const long n = 100000;
    const double gamma = 1.3, T = 0.8;
    double zero = 0, mean = 0;
    for (long k = 0; k < n; ++k) {
        long d = evolve_continuous({0}, gamma, T, {11, static_cast<std::uint64_t>(k)})[0];
        zero += d == 0;
        mean += d;
    }
    zero /= n;
    mean /= n;
    double p0 = std::exp(-gamma * T);
    CHECK(std::abs(zero - p0) < 4 * std::sqrt(p0 * (1 - p0) / n));
    CHECK(std::abs(mean - gamma * T) < 4 * std::sqrt(gamma * T / n));
}

TEST_CASE("exclusion holds along mixed trajectories") {
    ParamSchedule s{{0.6, 0.6}, {3.0, 3.0}, 2.0, 1.0};
    for (std::uint64_t k = 0; k < 2000; ++k) {
        std::vector<Config> traj;
        run_mixed({4, 3, 1, 0, -1, -5}, s, {5, k}, &traj);
        CHECK(traj.size() == 6);
        for (const auto& c : traj) REQUIRE(decreasing(c));
    }
}

TEST_CASE("run_mixed bookkeeping") {
    CHECK(run_mixed({0, -1, -2}, ParamSchedule{}, {1, 0}) == Config{0, -1, -2});
    ParamSchedule blk;
    blk.betas = {1e300};
    CHECK(run_mixed({0, -1, -2}, blk, {1, 0}) == Config{1, 0, -1});
    ParamSchedule one;
    one.betas = {1.0};
    const long n = 100000;
    double moved = 0;
    for (long k = 0; k < n; ++k) moved += run_mixed({0}, one, {3, static_cast<std::uint64_t>(k)})[0] == 1;
    CHECK(std::abs(moved / n - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("one-particle laws match binomial, negative binomial and Poisson") {
    const long n = 200000;
    ParamSchedule b;
    b.betas = {1.0, 0.5, 2.0};
    ParamSchedule g;
    g.alphas = {0.4, 0.4, 0.4};
    ParamSchedule c;
    c.gamma = 1.5;
    c.t3 = 2.0;
    std::vector<double> ps = b.ps();
    double bmean = ps[0] + ps[1] + ps[2];
    double bvar = 0;
    for (double p : ps) bvar += p * (1 - p);
    struct Case {
        ParamSchedule s;
        double mean, var;
    };
    for (const Case& cs : {Case{b, bmean, bvar}, Case{g, 3 * 0.4 / 0.6, 3 * 0.4 / 0.36},
                           Case{c, 3.0, 3.0}}) {
        double m = 0;
        for (long k = 0; k < n; ++k)
            m += run_mixed({0}, cs.s, {9, static_cast<std::uint64_t>(k)})[0];
        m /= n;
        CHECK(std::abs(m - cs.mean) < 3 * std::sqrt(cs.var / n));
    }
    // negative binomial tail by chi-square over the first cells
    std::vector<double> counts(8, 0.0);
    for (long k = 0; k < n; ++k) {
        long d = run_mixed({0}, g, {10, static_cast<std::uint64_t>(k)})[0];
        counts[std::min<long>(d, 7)] += 1;
    }
    double chi = 0;
    for (int j = 0; j < 8; ++j) {
        double pj = j < 7 ? oracle::negbin_upper(3, 0.4, j) - oracle::negbin_upper(3, 0.4, j + 1)
                          : oracle::negbin_upper(3, 0.4, 7);
        chi += (counts[j] - n * pj) * (counts[j] - n * pj) / (n * pj);
    }
    CHECK(chi < 24.3);  // 0.999 quantile, 7 degrees of freedom
}

TEST_CASE("leading labels ignore particles appended behind") {
    ParamSchedule s{{0.5, 0.3}, {1.0, 2.0}, 1.0, 1.5};
    for (std::uint64_t k = 0; k < 500; ++k) {
        Config a = run_mixed({3, 1, 0}, s, {2, k});
        Config b = run_mixed({3, 1, 0, -1, -4, -5}, s, {2, k});
        CHECK(Config(b.begin(), b.begin() + 3) == a);
    }
}

TEST_CASE("Monte Carlo estimator") {
    ParamSchedule s;
    s.betas = {1.0, 1.0, 1.0};
    McEstimate e = mc_joint_prob({0}, s, {{1, 0}}, 200000, 42);
    CHECK(std::abs(e.value - 0.875) < 3 * e.stderr_);
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(e.value * (1 - e.value) / 200000)));

    McEstimate all = mc_joint_prob({0, -1}, s, {{1, -1000}, {2, -1000}}, 1000, 1);
    CHECK(all.value == 1.0);

    McEstimate a = mc_joint_prob({0, -1, -3}, s, {{1, 1}, {3, -2}}, 20000, 5, 1);
    McEstimate b = mc_joint_prob({0, -1, -3}, s, {{1, 1}, {3, -2}}, 20000, 5, 3);
    CHECK(a.value == b.value);
    McEstimate c = mc_joint_prob({0, -1, -3}, s, {{1, 1}, {3, -2}}, 20000, 5, 2);
    CHECK(a.value == c.value);

    CHECK_THROWS_AS(mc_joint_prob({0, -1}, s, {{3, 0}}, 10, 1), LabelOutOfRange);
    CHECK_THROWS_AS(mc_joint_prob({0, -1}, s, {{1, 0}}, 0, 1), OutOfRange);
}

TEST_CASE("streams are reproducible and independent of consumption elsewhere") {
    Stream a(1, 2, 3, 4), b(1, 2, 3, 4), c(1, 2, 3, 5);
    for (int i = 0; i < 10; ++i) {
        auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
    Stream u(9, 9);
    for (int i = 0; i < 1000; ++i) {
        double v = u.uniform();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
}
