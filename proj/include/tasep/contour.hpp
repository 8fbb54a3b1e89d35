#pragma once
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "tasep/model.hpp"

namespace tasep {

using cd = std::complex<double>;

struct ContourSpec {
    cd center{0.0, 0.0};
    double radius = 0.5;
    int nodes = 64;  // starting node count, power of two
    double tol = 1e-12;
    int max_nodes = 1 << 16;
};

struct ContourResult {
    cd value;
    int nodes = 0;
};

// (1/2 pi i) of the counterclockwise circle integral, trapezoid rule with
// node doubling until successive values agree to tol*max(1,|value|)
ContourResult contour_integral_ex(const std::function<cd(cd)>& g, const ContourSpec& spec);
cd contour_integral(const std::function<cd(cd)>& g, const ContourSpec& spec);

// the integrand is given by its logarithm; the peak of |g(w) w| over the
// starting nodes is divided out before summing, so tol is relative to that peak
cd contour_integral_log(const std::function<cd(cd)>& log_g, const ContourSpec& spec);

// radius in [r_lo, r_hi] minimizing the peak of |g(w) w| on the circle,
// by golden-section search in log r
double hadamard_radius(const std::function<cd(cd)>& log_g, double r_lo, double r_hi);

// real part after asserting the imaginary residue is negligible
double checked_real(cd v, const char* what);

cd ipow(cd z, long k);

enum class Symbol { f, f_inverse, frakF, frakFbar };

cd eval_f(cd w, const ParamSchedule& s);
cd eval_f_inverse(cd w, const ParamSchedule& s);
cd eval_frakF(cd w, const ParamSchedule& s, bool bar);
// frakF parameters with repeated values grouped
struct FrakFactors {
    std::vector<std::pair<double, long>> alphas, betas;
    double gt = 0.0;
};
FrakFactors frak_factors(const ParamSchedule& s);
cd log_frakF(cd w, const FrakFactors& f, bool bar);
cd log_frakF(cd w, const ParamSchedule& s, bool bar);
cd eval_symbol(cd w, const ParamSchedule& s, Symbol v);

// circle around 0 enclosing 0 and 1 but no pole 1/alpha_j
double radius_01(const ParamSchedule& s);
// circle around 0 for coefficient extraction of f (or 1/f): min(1, rho/2)
double radius_coef(const ParamSchedule& s, bool inverse, bool exclude_one = false);
// circle around 0 for the S and S-bar kernels: min(1/2, rho/2) over 1, 1/alpha, 1/p, (1-p)/p
double radius_S(const ParamSchedule& s);
// just inside the nearest singularity of frakF (1/alpha) or frakFbar (1/p), and of
// the (1-w) power when it is negative; capped at 10
double radius_S_bound(const ParamSchedule& s, bool bar, bool pole_at_one);

double schuetz_F(long n, long x, const ParamSchedule& s, double tol = 1e-12);
double schuetz_F_at(long n, long x, const ParamSchedule& s, double radius, double tol = 1e-12);

// 2^{-(x-y)} [w^{x-y}] f (or 1/f); zero for x < y
double R_kernel(long x, long y, const ParamSchedule& s, bool inverse, double tol = 1e-12);

// [(w-1)^j] 1/f(w)
double finv_taylor_at_one(int j, const ParamSchedule& s, double tol = 1e-12);

// Memoized kernel entries for one schedule. Every entry depends on a
// difference of positions only.
class Kernels {
public:
    explicit Kernels(ParamSchedule s, double tol = 1e-12);
    const ParamSchedule& schedule() const { return s_; }
    double tol() const { return tol_; }

    double F(long n, long x) const;
    double R(long d) const;     // R(x, x-d)
    double Rinv(long d) const;  // R^{-1}(x, x-d)
    double finv_taylor(int j) const;

private:
    ParamSchedule s_;
    double tol_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<long, long>, double> F_;
    mutable std::map<long, double> R_, Rinv_;
    mutable std::map<int, double> T_;
};

}  // namespace tasep
