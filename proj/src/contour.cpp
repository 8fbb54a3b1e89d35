#include "tasep/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace tasep {

namespace {

constexpr double kPoleGuard = 1e-13;

double rho_f(const ParamSchedule& s) {
    double rho = std::numeric_limits<double>::infinity();
    for (double a : s.alphas)
        if (a > 0) rho = std::min(rho, 1.0 / a);
    return rho;
}

double rho_finv(const ParamSchedule& s) {
    double rho = std::numeric_limits<double>::infinity();
    for (double b : s.betas)
        if (b > 0) rho = std::min(rho, 1.0 / b);
    return rho;
}

}  // namespace

ContourResult contour_integral_ex(const std::function<cd(cd)>& g, const ContourSpec& spec) {
    if (!(spec.radius > 0)) throw RadiusInfeasible("contour radius must be positive");
    int m = std::max(4, spec.nodes);
    auto sweep = [&](int count, double offset) {
        cd acc = 0;
        for (int k = 0; k < count; ++k) {
            double th = 2.0 * std::numbers::pi * (k + offset) / count;
            cd u = std::polar(spec.radius, th);
            acc += g(spec.center + u) * u;
        }
        return acc / static_cast<double>(count);
    };
    cd cur = sweep(m, 0.0);
    while (m < spec.max_nodes) {
        cd next = 0.5 * (cur + sweep(m, 0.5));
        m *= 2;
        double diff = std::abs(next - cur);
        cur = next;
        if (std::isfinite(diff) && diff < spec.tol * std::max(1.0, std::abs(cur))) return {cur, m};
    }
    throw NoConvergence("contour quadrature did not converge within " +
                        std::to_string(spec.max_nodes) + " nodes");
}

cd contour_integral(const std::function<cd(cd)>& g, const ContourSpec& spec) {
    return contour_integral_ex(g, spec).value;
}

namespace {

double peak_log(const std::function<cd(cd)>& log_g, cd center, double r, int nodes) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < nodes; ++k) {
        cd u = std::polar(r, 2.0 * std::numbers::pi * (k + 0.25) / nodes);
        double v = log_g(center + u).real();
        if (std::isfinite(v)) peak = std::max(peak, v);
    }
    return peak + std::log(r);
}

}  // namespace

cd contour_integral_log(const std::function<cd(cd)>& log_g, const ContourSpec& spec) {
    if (!(spec.radius > 0)) throw RadiusInfeasible("contour radius must be positive");
    double peak = peak_log(log_g, spec.center, spec.radius, std::max(64, spec.nodes));
    if (!std::isfinite(peak)) return 0.0;
    double shift = peak - std::log(spec.radius);
    auto g = [&](cd w) { return std::exp(log_g(w) - shift); };
    cd v = contour_integral(g, spec);
    return v * std::exp(shift);
}

double hadamard_radius(const std::function<cd(cd)>& log_g, double r_lo, double r_hi) {
    if (!(r_lo > 0 && r_hi >= r_lo)) throw RadiusInfeasible("empty radius bracket");
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(r_lo), b = std::log(r_hi);
    auto peak = [&](double lr) { return peak_log(log_g, 0.0, std::exp(lr), 64); };
    double c1 = b - g * (b - a), c2 = a + g * (b - a);
    double f1 = peak(c1), f2 = peak(c2);
    for (int it = 0; it < 60 && b - a > 1e-6; ++it) {
        if (f1 < f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - g * (b - a);
            f1 = peak(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + g * (b - a);
            f2 = peak(c2);
        }
    }
    return std::exp(0.5 * (a + b));
}

double checked_real(cd v, const char* what) {
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
        throw NoConvergence(std::string(what) + ": imaginary residue " + std::to_string(v.imag()));
    return v.real();
}

cd ipow(cd z, long k) {
    if (k < 0) return 1.0 / ipow(z, -k);
    cd r = 1.0;
    while (k) {
        if (k & 1) r *= z;
        z *= z;
        k >>= 1;
    }
    return r;
}

cd eval_f(cd w, const ParamSchedule& s) {
    cd v = 1.0;
    for (double a : s.alphas) {
        cd den = 1.0 - a * w;
        if (std::abs(den) < kPoleGuard) throw PoleHit("f evaluated at a pole 1/alpha");
        v *= (1.0 - a) / den;
    }
    for (double b : s.betas) v *= (1.0 + b * w) / (1.0 + b);
    return v * std::exp(s.gamma * s.t3 * (w - 1.0));
}

cd eval_f_inverse(cd w, const ParamSchedule& s) {
    cd v = 1.0;
    for (double a : s.alphas) v *= (1.0 - a * w) / (1.0 - a);
    for (double b : s.betas) {
        cd den = 1.0 + b * w;
        if (std::abs(den) < kPoleGuard) throw PoleHit("1/f evaluated at a pole -1/beta");
        v *= (1.0 + b) / den;
    }
    return v * std::exp(-s.gamma * s.t3 * (w - 1.0));
}

cd eval_frakF(cd w, const ParamSchedule& s, bool bar) {
    cd h = w - 0.5;
    cd v = 1.0;
    for (double a : s.alphas) {
        double c = 2.0 * a / (2.0 - a);
        if (bar) {
            v *= 1.0 + c * h;
        } else {
            cd den = 1.0 - c * h;
            if (std::abs(den) < kPoleGuard) throw PoleHit("frakF evaluated at a pole");
            v /= den;
        }
    }
    for (double b : s.betas) {
        double c = 2.0 * b / (2.0 + b);
        if (bar) {
            cd den = 1.0 - c * h;
            if (std::abs(den) < kPoleGuard) throw PoleHit("frakFbar evaluated at a pole");
            v /= den;
        } else {
            v *= 1.0 + c * h;
        }
    }
    return v * std::exp(s.gamma * s.t3 * h);
}

FrakFactors frak_factors(const ParamSchedule& s) {
    auto group = [](const std::vector<double>& v) {
        std::map<double, long> m;
        for (double x : v) ++m[x];
        return std::vector<std::pair<double, long>>(m.begin(), m.end());
    };
    return {group(s.alphas), group(s.betas), s.gamma * s.t3};
}

cd log_frakF(cd w, const FrakFactors& f, bool bar) {
    cd h = w - 0.5;
    cd v = f.gt * h;
    for (auto [a, k] : f.alphas) {
        double c = 2.0 * a / (2.0 - a);
        v += static_cast<double>(k) * (bar ? std::log(1.0 + c * h) : -std::log(1.0 - c * h));
    }
    for (auto [b, k] : f.betas) {
        double c = 2.0 * b / (2.0 + b);
        v += static_cast<double>(k) * (bar ? -std::log(1.0 - c * h) : std::log(1.0 + c * h));
    }
    return v;
}

cd log_frakF(cd w, const ParamSchedule& s, bool bar) { return log_frakF(w, frak_factors(s), bar); }

cd eval_symbol(cd w, const ParamSchedule& s, Symbol v) {
    switch (v) {
        case Symbol::f: return eval_f(w, s);
        case Symbol::f_inverse: return eval_f_inverse(w, s);
        case Symbol::frakF: return eval_frakF(w, s, false);
        case Symbol::frakFbar: return eval_frakF(w, s, true);
    }
    return 0.0;
}

double radius_01(const ParamSchedule& s) {
    double rho = rho_f(s);
    if (!std::isfinite(rho)) return 2.0;
    if (rho <= 1.0 + 1e-9) throw RadiusInfeasible("no circle separates 1 from 1/alpha");
    return 1.0 + 0.5 * (rho - 1.0);
}

double radius_coef(const ParamSchedule& s, bool inverse, bool exclude_one) {
    double rho = inverse ? rho_finv(s) : rho_f(s);
    if (exclude_one) rho = std::min(rho, 1.0);
    return std::min(1.0, 0.5 * rho);
}

double radius_S(const ParamSchedule& s) {
    double rho = std::min(1.0, rho_f(s));
    for (double p : s.ps()) {
        if (p <= 0) continue;
        rho = std::min(rho, 1.0 / p);
        rho = std::min(rho, (1.0 - p) / p);
    }
    return std::min(0.5, 0.5 * rho);
}

double radius_S_bound(const ParamSchedule& s, bool bar, bool pole_at_one) {
    double rho = 10.0 / 0.999;
    if (pole_at_one) rho = 1.0;
    if (bar) {
        for (double p : s.ps())
            if (p > 0) rho = std::min(rho, 1.0 / p);
    } else {
        rho = std::min(rho, rho_f(s));
    }
    return 0.999 * rho;
}

double schuetz_F_at(long n, long x, const ParamSchedule& s, double radius, double tol) {
    long e = x - n + 1;
    auto g = [&](cd w) { return ipow(1.0 - w, -n) * ipow(w, -e) * eval_f(w, s); };
    cd v = contour_integral(g, {0.0, radius, 64, tol});
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * checked_real(v, "schuetz_F");
}

double schuetz_F(long n, long x, const ParamSchedule& s, double tol) {
    double r01 = radius_01(s);
    long e = x - n + 1;
    if (e > 0) return schuetz_F_at(n, x, s, r01, tol);
    if (n <= 0) return 0.0;
    // only the pole at 1 remains: sum C(-e, j) [(w-1)^{n-1-j}] f without cancellation
    double r1 = std::min(1.0, r01 - 1.0);
    double acc = 0.0, binom = 1.0;
    for (long j = 0; j <= std::min(n - 1, -e); ++j) {
        long k = n - 1 - j;
        auto g = [&](cd w) { return eval_f(w, s) * ipow(w - 1.0, -(k + 1)); };
        acc += binom * checked_real(contour_integral(g, {1.0, r1, 64, tol * std::pow(r1, -k)}),
                                    "schuetz_F");
        binom *= static_cast<double>(-e - j) / static_cast<double>(j + 1);
    }
    return acc;
}

double R_kernel(long x, long y, const ParamSchedule& s, bool inverse, double tol) {
    long d = x - y;
    if (d < 0) return 0.0;
    double r = radius_coef(s, inverse);
    auto g = [&](cd w) {
        return (inverse ? eval_f_inverse(w, s) : eval_f(w, s)) * ipow(w, -(d + 1));
    };
    double c = checked_real(contour_integral(g, {0.0, r, 64, tol}), "R_kernel");
    return std::ldexp(c, static_cast<int>(-d));
}

double finv_taylor_at_one(int j, const ParamSchedule& s, double tol) {
    double rho = rho_finv(s);
    double r = std::isfinite(rho) ? std::min(1.0, 0.5 * (1.0 + rho)) : 1.0;
    auto g = [&](cd w) { return eval_f_inverse(w, s) * ipow(w - 1.0, -(j + 1)); };
    return checked_real(contour_integral(g, {1.0, r, 64, tol}), "finv_taylor");
}

Kernels::Kernels(ParamSchedule s, double tol) : s_(validate_schedule(s)), tol_(tol) {}

double Kernels::F(long n, long x) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = F_.find({n, x});
        if (it != F_.end()) return it->second;
    }
    double v = schuetz_F(n, x, s_, tol_);
    std::lock_guard<std::mutex> lk(mu_);
    F_[{n, x}] = v;
    return v;
}

double Kernels::R(long d) const {
    if (d < 0) return 0.0;
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = R_.find(d);
        if (it != R_.end()) return it->second;
    }
    double v = R_kernel(d, 0, s_, false, tol_);
    std::lock_guard<std::mutex> lk(mu_);
    R_[d] = v;
    return v;
}

double Kernels::Rinv(long d) const {
    if (d < 0) return 0.0;
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = Rinv_.find(d);
        if (it != Rinv_.end()) return it->second;
    }
    double v = R_kernel(d, 0, s_, true, tol_);
    std::lock_guard<std::mutex> lk(mu_);
    Rinv_[d] = v;
    return v;
}

double Kernels::finv_taylor(int j) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = T_.find(j);
        if (it != T_.end()) return it->second;
    }
    double v = finv_taylor_at_one(j, s_, tol_);
    std::lock_guard<std::mutex> lk(mu_);
    T_[j] = v;
    return v;
}

}  // namespace tasep
