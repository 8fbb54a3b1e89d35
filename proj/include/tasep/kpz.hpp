#pragma once
#include <string>
#include <vector>

#include "tasep/biortho.hpp"

namespace tasep {

enum class Model { bernoulli, geometric };

Model model_from_string(const std::string& s);
std::string to_string(Model m);

double airy_series(double zeta);
double airy_contour(double zeta);
// series for |zeta| <= 6, contour beyond; RangeGuard for |zeta| > 30
double airy(double zeta);

// S_{t,x}(v,u) through the Airy function
double S_limit(double t, double x, double v, double u);
// the same kernel by quadrature of exp(t w^3/3 + x w^2 + (v-u) w) along the two rays
double S_limit_contour(double t, double x, double v, double u);

// e^{s d^2}(u, v) = exp(-(u-v)^2/(4s)) / sqrt(4 pi s)
double heat_kernel(double s, double du);

// E_{B(0)=v}[S_{-t,-x-tau}(B(tau), u)] for the level-0 curve, B with diffusion
// coefficient 2; v >= 0 hits at once
double epi_limit(double t, double x, double v, double u);

struct FrameConstants {
    double ct, cn, cz, speed;
};
FrameConstants frame_constants(Model m, double q);

// integer indices for a macroscopic point, with the macroscopic values they
// realize exactly (te, xe, ue, ve) and their offsets from the request
struct ScalingFrame {
    Model model = Model::bernoulli;
    double q = 0.5, eps = 0.1;
    double T = 1, X = 0, U = 0, V = 0;
    long t = 0, n = 0, z = 0, y = 0;
    double te = 0, xe = 0, ue = 0, ve = 0;
};

ScalingFrame make_frame(Model m, double q, double eps, double T, double X, double U, double V);
ParamSchedule frame_schedule(Model m, double q, long t);
// X0(j) = -2j, j = 1..n
Config half_flat(long n);

// eps^{-1/2} S_{-t,-n}(y, z) or eps^{-1/2} Sbar_{-t,n}(y, z)
double scaled_S(const ScalingFrame& f, SVariant v);
double scaled_S_epi(const ScalingFrame& f);
// limit targets realized at the frame's effective point
double limit_S(const ScalingFrame& f, SVariant v);
double limit_S_epi(const ScalingFrame& f);

// eps^{1/2} [h_t(x) + speed eps^{-3/2} T] at x = round(2X/eps)
double scaled_height(Model m, double q, double eps, const Config& c, const Config& c0, double T,
                     double X);

// eps^{-1/2} Q^m(zi, zj) for m = round((xi-xj)/eps) and
// zi - zj = round(2(xi-xj)/eps + (ui-uj)/sqrt(eps)), against the heat kernel at
// the realized (s, du)
struct QLimitPoint {
    double scaled, limit, s_eff, du_eff;
};
QLimitPoint q_term_limit(double eps, double xi, double ui, double xj, double uj);

// eps^{-1/2} K_t at two macroscopic points with half-flat data against
// -heat 1_{xi>xj} + int S_{t,xi}(ui, v) epi(t, xj, v, uj) dv
struct KernelLimitPoint {
    double scaled, limit;
};
KernelLimitPoint kernel_limit(Model m, double q, double eps, double T, double xi, double ui,
                              double xj, double uj);

// leading t-order phase of the S integrand in x with w = (1-x)/2
double phase(Model m, double q, double that, double x);

struct SaddleReport {
    double f0, f1, f2, f3, expected_f3;
};
SaddleReport saddle_check(Model m, double q, double that);

// kappa with |integrand| <= exp(-kappa that) on the arc |x| >= 1/2 of |x - 1| = 1,
// from the leading phase
double far_arc_kappa(Model m, double q, double that);

struct ConvergenceRow {
    double eps;
    double err_S, err_Sbar, err_epi;
    double scaled_S, scaled_Sbar, scaled_epi;
    double limit_S, limit_Sbar, limit_epi;
    long t, n, z, y;
    double dt, dx, du, dv;  // realized minus requested macroscopic values
    double q_err = 0.0, k_err = 0.0;
};

struct ConvergenceReport {
    Model model;
    double q, T, X, U, V;
    std::vector<ConvergenceRow> rows;
    bool monotone_S() const;
    bool monotone_Sbar() const;
    bool monotone_epi() const;
};

struct KernelTuple {
    double xi = 0.25, ui = 0.0, xj = 0.0, uj = 0.0;
};

// eps_list must be decreasing; with_kernel adds the Q-term and assembled
// kernel comparisons at the given tuple
ConvergenceReport convergence_report(Model m, double q, double T, double X, double U, double V,
                                     const std::vector<double>& eps_list, bool with_kernel = false,
                                     KernelTuple kt = {});

}  // namespace tasep
