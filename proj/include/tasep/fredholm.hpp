#pragma once
#include <vector>

#include <Eigen/Dense>

#include "tasep/biortho.hpp"
#include "tasep/simulate.hpp"

namespace tasep {

// K_t(ni, x; nj, y) as -Q^{nj-ni} 1_{ni<nj} + sum_v S_{-t,-ni}(v, x) Sbar^epi_{-t,nj}(v, y)
double kernel_Kt(int ni, long x, int nj, long y, const Config& x0, const ParamSchedule& s,
                 double tol = 1e-12);
// v-sum run outward from center, each side stopped after 8 consecutive terms
// below 1e-15 of the running maximum
double kernel_Kt(int ni, long x, int nj, long y, const Config& x0, const SKernels& sk,
                 long center);
// -Q^{nj-ni} 1_{ni<nj} + sum_{k=1}^{nj} Psi^{ni}_{ni-k}(x) Phi^{nj}_{nj-k}(y)
double kernel_biortho(int ni, long x, int nj, long y, const Config& x0, const Kernels& kr);
// -Q^{nj-ni} 1_{ni<nj} + (R Q^{-ni} G_{0,nj} R^{-1})(x, y)
double kernel_operator(int ni, long x, int nj, long y, const Config& x0, const Kernels& kr);

// sum_y Qbar^{(m)}(z, y) R^{-1}(y, x) in Newton form
double qbar_rinv(int m, long z, long x, const Kernels& kr);

struct JointQuery {
    std::vector<int> labels;
    std::vector<long> thresholds;  // event X_t(labels[j]) > thresholds[j]
    Config x0;
    ParamSchedule s;
};

void validate_query(const JointQuery& q);
// JSON keys: labels, thresholds, x0 and the schedule keys at top level
JointQuery query_from_json(const nlohmann::json& j);
nlohmann::json query_to_json(const JointQuery& q);

struct SectionIndex {
    int label;
    long x;
};

// entries are 2^{x-y} K_t, which leaves det(I - K) unchanged
struct FiniteSection {
    long W = 0;
    std::vector<SectionIndex> index;
    Eigen::MatrixXd matrix;
};

FiniteSection build_section(const JointQuery& q, long W, const SKernels& sk);

struct FredholmResult {
    double det = 1.0;
    double rcond = 1.0;
    bool ill_conditioned = false;  // condition estimate above 1e12
};

FredholmResult fredholm_det(const Eigen::MatrixXd& m);

struct JointResult {
    double value = 0.0;
    double raw = 0.0;
    long W = 0;
    double last_change = 0.0;
    bool ill_conditioned = false;
};

JointResult joint_dist_ex(const JointQuery& q, double tol = 1e-8, long w_start = 16,
                          long w_max = 512);
double joint_dist(const JointQuery& q, double tol = 1e-8);

}  // namespace tasep
