#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "tasep/kpz.hpp"
#include "tasep/simulate.hpp"

using namespace tasep;

TEST_CASE("Airy values") {
    CHECK(std::abs(airy(0.0) - 0.35502805388781723926) < 1e-12);
    CHECK(std::abs(airy(1.0) - 0.13529241631288141552) < 1e-12);
    CHECK(std::abs(airy(-2.33810741045976704)) < 1e-9);
    double worst = 0;
    for (double z = -6; z <= 6; z += 0.05) worst = std::max(worst, std::abs(airy_series(z) - airy_contour(z)));
    CHECK(worst < 1e-10);
    for (double z : {-29.5, -17.0, -8.0, 7.5, 12.0, 25.0})
        CHECK(std::abs(airy(z) - boost::math::airy_ai(z)) <
              1e-12 * std::max(1e-300, std::abs(boost::math::airy_ai(z))) + 1e-15);
    CHECK_THROWS_AS(airy(30.5), RangeGuard);
    CHECK_THROWS_AS(airy(-31.0), RangeGuard);
}

TEST_CASE("limit kernel") {
    CHECK(S_limit(1, 0, 0, 0) == doctest::Approx(airy(0.0)));
    CHECK(S_limit(1, 0, 0.7, 0.2) == doctest::Approx(S_limit(1, 0, 1.5, 1.0)));
    double pts[10][4] = {{1, 0, 0, 0},     {1, 0.3, 0.5, -0.2}, {2, -0.4, 0.2, 0.6}, {1.5, 0.5, -1, 1},
                         {0.7, 0.1, 0.3, 0}, {1, -0.2, -0.5, 0.5}, {3, 0.2, 1, -1},   {1.2, 0, 2, 0},
                         {0.5, -0.1, 0, -1}, {2.5, 0.4, -0.3, 0.3}};
    for (auto& p : pts) CHECK(std::abs(S_limit(p[0], p[1], p[2], p[3]) - S_limit_contour(p[0], p[1], p[2], p[3])) < 1e-9);
    CHECK(S_limit(1, 0, -40, 0) >= 0.0);
}

TEST_CASE("heat kernel normalization") {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (double s : {0.1, 0.5, 2.0}) {
        double tot = GK::integrate([&](double u) { return heat_kernel(s, u); },
                                   -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity(), 15, 1e-12);
        CHECK(std::abs(tot - 1.0) < 1e-8);
    }
}

TEST_CASE("first-passage limit") {
    CHECK(epi_limit(1, 0.2, 0.5, 0.1) == doctest::Approx(S_limit(1, -0.2, 0.1, 0.5)));
    CHECK(std::abs(epi_limit(1, 0.2, -1e-6, 0.1) - epi_limit(1, 0.2, 0.0, 0.1)) < 1e-4);
    CHECK(std::abs(epi_limit(1, 0.0, -8.0, 0.0)) < std::abs(epi_limit(1, 0.0, -0.5, 0.0)));
}

TEST_CASE("scaling frames") {
    for (Model m : {Model::bernoulli, Model::geometric}) {
        FrameConstants c = frame_constants(m, 0.5);
        CHECK(c.ct == doctest::Approx(1.5 * 1.5 * 1.5 / (4 * 0.25)));
        for (double eps : {0.1, 0.05}) {
            ScalingFrame f = make_frame(m, 0.5, eps, 1.0, 0.25, -0.5, -0.4);
            double E = std::pow(eps, -1.5);
            CHECK(std::abs(f.te - 1.0) <= 0.5 / (c.ct * E) + 1e-15);
            CHECK(std::abs(f.xe - 0.25) <= 0.5 * eps + 1e-12);
            CHECK(std::abs(f.ue + 0.5) <= 0.5 * std::sqrt(eps) + 1e-12);
            CHECK(std::abs(f.ve + 0.4) <= 0.5 * std::sqrt(eps) + 1e-12);
            CHECK(static_cast<double>(f.n) == doctest::Approx(c.cn * E * f.te - f.xe / eps + 1));
        }
    }
    CHECK(model_from_string("geometric") == Model::geometric);
    CHECK(to_string(Model::bernoulli) == "bernoulli");
    CHECK_THROWS_AS(model_from_string("x"), ValidationError);
    CHECK_THROWS_AS(frame_constants(Model::bernoulli, 1.0), OutOfRange);
    CHECK_THROWS_AS(make_frame(Model::bernoulli, 0.5, 1.5, 1, 0, 0, 0), OutOfRange);
    CHECK_THROWS_AS(make_frame(Model::bernoulli, 0.5, 0.1, -1, 0, 0, 0), OutOfRange);
    CHECK(half_flat(3) == Config{-2, -4, -6});
    CHECK(frame_schedule(Model::bernoulli, 0.5, 4).betas.size() == 4);
    CHECK(frame_schedule(Model::geometric, 0.5, 4).alphas.size() == 4);
}

TEST_CASE("start above the curve reduces the epigraph kernel") {
    ScalingFrame f = make_frame(Model::bernoulli, 0.5, 0.1, 1.0, 0.0, 0.0, 1.0);
    REQUIRE(f.y > -2);
    CHECK(scaled_S_epi(f) == doctest::Approx(scaled_S(f, SVariant::Sbar)).epsilon(1e-12));
}

TEST_CASE("scaled height") {
    Config step;
    for (long j = 1; j <= 400; ++j) step.push_back(-j);
    for (double X : {-0.5, 0.0, 0.3})
        CHECK(scaled_height(Model::bernoulli, 0.5, 0.05, step, step, 0.0, X) ==
              doctest::Approx(-2 * std::abs(X) / std::sqrt(0.05)));
    Config flat;
    for (long j = 1; j <= 200; ++j) flat.push_back(1 - 2 * j);
    double eps = 0.1, T = 0.7;
    double expect = std::sqrt(eps) * (0 + 0.75 * std::pow(eps, -1.5) * T);
    CHECK(scaled_height(Model::bernoulli, 0.5, eps, flat, flat, T, 0.0) == doctest::Approx(expect));
    CHECK_THROWS_AS(scaled_height(Model::bernoulli, 0.5, 0.01, flat, flat, 0.0, -3.0), WindowUnderflow);
}

TEST_CASE("flat-data height drifts at minus the particle current") {
    // current p rho (1 - rho) / (1 - p rho) at rho = 1/2, so h_t / t -> -p / (2 - p)
    const double p = 0.5;
    const long t = 300, K = 600;
    Config x0;
    for (long j = 1; j <= 2 * K; ++j) x0.push_back(2 * K + 1 - 2 * j);
    ParamSchedule s;
    s.betas.assign(t, p / (1 - p));
    double mean = 0;
    const int samples = 100;
    for (int k = 0; k < samples; ++k) {
        Config c = run_mixed(x0, s, {17, static_cast<std::uint64_t>(k)});
        mean += height_from_config(c, x0, 0, 0).at(0);
    }
    mean /= samples * static_cast<double>(t);
    CHECK(std::abs(mean + p / (2 - p)) < 0.03);
}

TEST_CASE("saddle structure and far arc") {
    for (Model m : {Model::bernoulli, Model::geometric}) {
        SaddleReport r = saddle_check(m, 0.5, 1000.0);
        CHECK(std::abs(r.f0) < 1e-12);
        CHECK(std::abs(r.f1) < 1e-6 * r.expected_f3);
        CHECK(std::abs(r.f2) < 1e-6 * r.expected_f3);
        CHECK(std::abs(r.f3 - r.expected_f3) < 1e-6 * r.expected_f3);
        CHECK(far_arc_kappa(m, 0.5, 1000.0) > 0.0);
    }
}

TEST_CASE("Q-term converges to the heat kernel") {
    double prev = 1e300;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        QLimitPoint q = q_term_limit(eps, 0.5, 0.3, 0.0, -0.2);
        double err = std::abs(q.scaled - q.limit);
        CHECK(err <= prev);
        CHECK(err < 0.25 * std::sqrt(eps));
        prev = err;
    }
    CHECK_THROWS_AS(q_term_limit(0.1, 0.0, 0, 0.25, 0), OutOfRange);
}

TEST_CASE("convergence report") {
    std::vector<double> eps{0.1, 0.05, 0.025};
    ConvergenceReport a = convergence_report(Model::bernoulli, 0.5, 1, 0, 0, 0, eps);
    ConvergenceReport b = convergence_report(Model::bernoulli, 0.5, 1, 0, 0, 0, eps);
    CHECK(a.rows.size() == 3);
    CHECK(a.monotone_S());
    CHECK(a.monotone_Sbar());
    CHECK(a.monotone_epi());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.rows[i].err_S == b.rows[i].err_S);
        CHECK(a.rows[i].err_epi == b.rows[i].err_epi);
    }
    CHECK_THROWS_AS(convergence_report(Model::bernoulli, 0.5, 1, 0, 0, 0, {0.05, 0.1}), ValidationError);
}
