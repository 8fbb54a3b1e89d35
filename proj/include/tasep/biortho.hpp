#pragma once
#include <map>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tasep/contour.hpp"
#include "tasep/model.hpp"

namespace tasep {

using Rational = boost::multiprecision::cpp_rational;

// Q^m for any integer m (m = 0 is the identity, m < 0 the inverse powers)
double Q_pow(long m, long x, long y);
// 2^{x-y} Q^m(x,y): the binomial part alone
double Q_pow_scaled(long m, long x, long y);

// polynomial extension of Q^n in the second argument
double Q_bar(long n, long y1, long y2);
double Q_bar_contour(long n, long y1, long y2, double tol = 1e-12);

// Psi^n_k(x); k may be negative as long as n - k <= N
double psi(int n, int k, long x, const Config& x0, const ParamSchedule& s, double tol = 1e-12);
// the same function as (R Q^{-k} delta_{X0(n-k)})(x)
double psi_operator(int n, int k, long x, const Config& x0, const Kernels& kr);

// hhat(l, x) = 2^{-x} h^n_k(l, x) stored per level as coefficients in the
// basis binom(x, j)
struct BHESolution {
    int n = 0, k = 0;
    Config x0;
    std::vector<std::vector<Rational>> levels;

    Rational hhat(int l, long x) const;
    double h(int l, long z) const;
    int degree(int l) const { return static_cast<int>(levels.at(l).size()) - 1; }
};

BHESolution bhe_solve(int n, int k, const Config& x0);

Rational binom_rational(long x, int j);

// Phi^n_k(z) = sum_y h^n_k(0,y) R^{-1}(y,z), evaluated in Newton form
double phi(int n, int k, long z, const Config& x0, const Kernels& kr);
double phi_from(const BHESolution& b, long z, const Kernels& kr);
// literal damped sum; TruncationFailure when it has not settled in 512 terms
double phi_direct(int n, int k, long z, const Config& x0, const ParamSchedule& s);

// first D+1 Taylor coefficients at 0 of the chosen symbol by series products
std::vector<double> symbol_series(const ParamSchedule& s, bool inverse, int D);

struct HitEntry {
    int m;
    long z;
    double prob;
};

// law of (tau, RW_tau) for the strictly-left Geom walk started at z1 against
// the curve X0(m+1), m = 0..n-1
struct HittingDistribution {
    long z1 = 0;
    int n = 0;
    std::vector<HitEntry> entries;
    double survival = 0.0;
    double dead = 0.0;
    double hit_mass() const;
};

HittingDistribution hit_dp(long z1, const Config& x0, int n);

// P_{RW*_{l-1}=z}(tau^{l,n} = k) for the strictly-right walk
double dual_hit_prob(int n, int k, int l, long z, const Config& x0);
double hitting_vs_bhe_check(int n, int k, int l, long z, const Config& x0);

// E_{RW_0=z1}[Qbar^{(n-tau)}(RW_tau, z2) 1_{tau<n}]
double G0n(long z1, long z2, int n, const Config& x0);
// sum_k Q^{n-k}(z1, X0(n-k)) h^n_k(0, z2)
double G0n_series(long z1, long z2, int n, const Config& x0);

enum class SVariant { S, Sbar };

// S_{-t,-n}(z1,z2) or Sbar_{-t,n}(z1,z2)
double S_kernel(int n, long z1, long z2, const ParamSchedule& s, SVariant v, double tol = 1e-12);
// the contour coefficient without its power of two, d = z2 - z1:
// S = 2^{-d} S_coef, Sbar = 2^{d} S_coef. The integrand is handled in log
// form and multiplied by exp(log_scale) before summing, so scaled values far
// outside double range of the bare coefficient stay representable.
double S_coef(int n, long d, const ParamSchedule& s, SVariant v, double tol = 1e-12,
              double log_scale = 0.0);

double Sbar_epi(int n, long z1, long z2, const ParamSchedule& s, const Config& x0,
                double tol = 1e-12);

// constant relating (R Q^{-n})^* to S and Qbar R^{-1} to Sbar
double normalization_A(const ParamSchedule& s);

// Memoized S and Sbar coefficients keyed by (n, difference)
class SKernels {
public:
    explicit SKernels(ParamSchedule s, double tol = 1e-12) : s_(std::move(s)), tol_(tol) {}
    double coef(int n, long d, SVariant v) const;
    // S or Sbar at (z1, z2) with z2 - z1 = d
    double kernel(int n, long d, SVariant v) const;
    // Sbar^epi(n, z1, z2) from cached kernel values
    double sbar_epi(int n, long z1, long z2, const Config& x0) const;
    const ParamSchedule& schedule() const { return s_; }

private:
    ParamSchedule s_;
    double tol_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, long, int>, double> cache_, kcache_;
};

}  // namespace tasep
