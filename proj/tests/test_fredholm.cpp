#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "tasep/fredholm.hpp"

using namespace tasep;

namespace {

const Config kX0{3, 1, 0, -4};

ParamSchedule bern(std::vector<double> b) { return ParamSchedule{{}, std::move(b), 0, 0}; }
ParamSchedule geo(std::vector<double> a) { return ParamSchedule{std::move(a), {}, 0, 0}; }

}  // namespace

TEST_CASE("determinant of I - M") {
    CHECK(fredholm_det(Eigen::MatrixXd::Zero(3, 3)).det == 1.0);
    CHECK(fredholm_det(0.5 * Eigen::MatrixXd::Identity(2, 2)).det == doctest::Approx(0.25));
    Eigen::VectorXd u(3), v(3);
    u << 0.3, -0.2, 0.5;
    v << 0.1, 0.4, -0.7;
    CHECK(fredholm_det(u * v.transpose()).det == doctest::Approx(1 - v.dot(u)));
    FredholmResult sing = fredholm_det(Eigen::MatrixXd::Identity(2, 2));
    CHECK(sing.ill_conditioned);
    CHECK(std::abs(sing.det) < 1e-15);
    CHECK_THROWS_AS(fredholm_det(Eigen::MatrixXd::Zero(2, 3)), ValidationError);
}

TEST_CASE("three kernel routes agree") {
    for (const ParamSchedule& s : {bern({1.0, 0.5, 2.0}), geo({0.4, 0.3}),
                                   ParamSchedule{{0.3}, {0.5, 1.0}, 1.0, 0.6}}) {
        Kernels kr(s);
        for (int ni = 1; ni <= 4; ++ni)
            for (int nj = 1; nj <= 4; ++nj)
                for (long x : {-3L, 0L, 2L})
                    for (long y : {-2L, 1L}) {
                        double a = kernel_biortho(ni, x, nj, y, kX0, kr);
                        double b = kernel_operator(ni, x, nj, y, kX0, kr);
                        double c = kernel_Kt(ni, x, nj, y, kX0, s);
                        double sc = std::max(1.0, std::abs(a));
                        CHECK(std::abs(a - b) < 1e-8 * sc);
                        CHECK(std::abs(a - c) < 1e-8 * sc);
                    }
    }
}

TEST_CASE("equal labels carry no Q term") {
    ParamSchedule s = bern({1.0});
    Kernels kr(s);
    double full = kernel_biortho(2, 1, 3, 0, kX0, kr);
    double sum = 0;
    for (int k = 1; k <= 3; ++k) sum += psi_operator(2, 2 - k, 1, kX0, kr) * phi(3, 3 - k, 0, kX0, kr);
    CHECK(full == doctest::Approx(sum - Q_pow(1, 1, 0)));
    double same = kernel_biortho(3, 1, 3, 0, kX0, kr);
    double sum3 = 0;
    for (int k = 1; k <= 3; ++k) sum3 += psi_operator(3, 3 - k, 1, kX0, kr) * phi(3, 3 - k, 0, kX0, kr);
    CHECK(same == doctest::Approx(sum3));
}

TEST_CASE("single particle against one-particle tails") {
    JointQuery q{{1}, {0}, {0}, bern({1.0, 1.0, 1.0})};
    CHECK(std::abs(joint_dist(q) - 0.875) < 1e-7);
    JointQuery g{{1}, {1}, {0}, geo({0.4, 0.4})};
    CHECK(std::abs(joint_dist(g) - oracle::negbin_upper(2, 0.4, 2)) < 1e-7);
    ParamSchedule c;
    c.gamma = 1.0;
    c.t3 = 1.5;
    JointQuery p{{1}, {2}, {0}, c};
    CHECK(std::abs(joint_dist(p) - oracle::poisson_upper(1.5, 3)) < 1e-7);
    JointQuery e{{1, 2}, {-10, -20}, {0, -3}, ParamSchedule{}};
    CHECK(joint_dist(e) == doctest::Approx(1.0));
}

TEST_CASE("window adaptivity is active") {
    JointQuery q{{1, 3}, {14, 8}, {0, -2, -4}, geo(std::vector<double>(16, 0.4))};
    JointResult r = joint_dist_ex(q);
    CHECK(r.W >= 32);
    CHECK(r.last_change < 1e-8);
    SKernels sk(q.s);
    double half = fredholm_det(build_section(q, r.W / 4, sk).matrix).det;
    CHECK(std::abs(half - r.raw) > 1e-8);
    double dbl = fredholm_det(build_section(q, 2 * r.W, sk).matrix).det;
    CHECK(std::abs(dbl - r.raw) < 1e-8);
    CHECK(build_section(q, 8, sk).index.size() == 18);
    CHECK_THROWS_AS(joint_dist_ex(q, 1e-8, 16, 16), NoConvergence);
}

TEST_CASE("probability bounds, monotonicity and marginals") {
    Config x0{0, -1, -3};
    ParamSchedule s = bern({1.0, 0.5, 2.0});
    double prev = 1.0;
    for (long a = -4; a <= 3; ++a) {
        double v = joint_dist(JointQuery{{1, 2}, {a, -2}, x0, s});
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
    double marg = joint_dist(JointQuery{{1}, {1}, x0, s});
    double joint = joint_dist(JointQuery{{1, 3}, {1, -40}, x0, s});
    CHECK(std::abs(marg - joint) < 1e-8);
    // label 1 is free: P(at least two of three jumps with p = 1/2, 1/3, 2/3)
    double p1 = 0.5, p2 = 1.0 / 3, p3 = 2.0 / 3;
    CHECK(std::abs(marg - (p1 * p2 + p1 * p3 + p2 * p3 - 2 * p1 * p2 * p3)) < 1e-7);
}

TEST_CASE("query validation and json") {
    Config x0{0, -1, -3};
    ParamSchedule s = bern({1.0});
    CHECK_THROWS_AS(validate_query(JointQuery{{2, 1}, {0, 0}, x0, s}), ValidationError);
    CHECK_THROWS_AS(validate_query(JointQuery{{1, 4}, {0, 0}, x0, s}), LabelOutOfRange);
    CHECK_THROWS_AS(validate_query(JointQuery{{1}, {0, 0}, x0, s}), ValidationError);
    CHECK_THROWS_AS(validate_query(JointQuery{{}, {}, x0, s}), ValidationError);
    JointQuery q{{1, 3}, {0, -2}, x0, ParamSchedule{{0.2}, {1.0}, 0.5, 1.0}};
    JointQuery back = query_from_json(query_to_json(q));
    CHECK(back.labels == q.labels);
    CHECK(back.thresholds == q.thresholds);
    CHECK(back.x0 == q.x0);
    CHECK(back.s.alphas == q.s.alphas);
    CHECK(back.s.t3 == q.s.t3);
    CHECK_THROWS_AS(query_from_json(nlohmann::json{{"labels", {1}}, {"x0", {0}}}), ValidationError);
}
