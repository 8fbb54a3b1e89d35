#pragma once
#include "tasep/contour.hpp"
#include "tasep/model.hpp"

namespace tasep {

constexpr int kGreensMaxN = 8;

// P(X_t = x | X_0 = y) as det[F_{i-j}(x_{N+1-i} - y_{N+1-j})]
double greens_det(const Config& x, const Config& y, const Kernels& k, int max_n = kGreensMaxN);
double greens_det(const Config& x, const Config& y, const ParamSchedule& s,
                  int max_n = kGreensMaxN);

struct NormalizationReport {
    double sum = 0.0;
    double tail_bound = 0.0;  // upper bound on mass outside the enumerated box
    long configs = 0;
};

// sum of greens_det over every configuration with X(i) - y(i) in [0, t2 + pad*(t1>0)]
NormalizationReport normalization_check(const Config& y, const ParamSchedule& s, int support_pad,
                                        int max_n = kGreensMaxN);

struct ForwardReport {
    double residual = 0.0;
    double tail_bound = 0.0;
    double lhs = 0.0, rhs = 0.0;
};

// G_{t+1}(x) against the one-step geometric transition applied to G_t,
// assembled over subsets of blocked particles
ForwardReport forward_equation_check_geometric(const Config& x, const Config& y, double alpha_next,
                                               const ParamSchedule& s, int pad);

}  // namespace tasep
