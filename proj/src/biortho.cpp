#include "tasep/biortho.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <numbers>

namespace tasep {

namespace {

double binom_double(long n, long k) {
    if (k < 0 || n < k) return 0.0;
    return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n),
                                                     static_cast<unsigned>(k));
}

// binom(d, k) for any integer d
double gen_binom(long d, long k) {
    if (k < 0) return 0.0;
    double r = 1.0;
    for (long i = 0; i < k; ++i) r *= static_cast<double>(d - i) / static_cast<double>(i + 1);
    return r;
}

void check_label(int n, const Config& x0) {
    if (n < 1 || n > static_cast<int>(x0.size()))
        throw LabelOutOfRange("label " + std::to_string(n) + " outside 1.." +
                              std::to_string(x0.size()));
}

Rational pow2(long e) {
    using boost::multiprecision::cpp_int;
    cpp_int p = boost::multiprecision::pow(cpp_int(2), static_cast<unsigned>(e < 0 ? -e : e));
    return e >= 0 ? Rational(p) : Rational(cpp_int(1), p);
}

}  // namespace

double Q_pow_scaled(long m, long x, long y) {
    if (m == 0) return x == y ? 1.0 : 0.0;
    if (m > 0) return x - y >= m ? binom_double(x - y - 1, m - 1) : 0.0;
    long mm = -m, d = y - x;
    if (d < 0 || d > mm) return 0.0;
    double sign = ((d + mm) % 2 == 0) ? 1.0 : -1.0;
    return sign * binom_double(mm, d);
}

double Q_pow(long m, long x, long y) {
    return std::ldexp(Q_pow_scaled(m, x, y), static_cast<int>(y - x));
}

double Q_bar(long n, long y1, long y2) {
    if (n < 1) throw OutOfRange("Q_bar needs n >= 1");
    return std::ldexp(gen_binom(y1 - y2 - 1, n - 1), static_cast<int>(y2 - y1));
}

double Q_bar_contour(long n, long y1, long y2, double tol) {
    long d = y1 - y2;
    auto g = [&](cd w) { return ipow(1.0 + w, d - 1) * ipow(w, -n); };
    double c = checked_real(contour_integral(g, {0.0, 0.5, 64, tol}), "Q_bar_contour");
    return std::ldexp(c, static_cast<int>(-d));
}

double psi(int n, int k, long x, const Config& x0, const ParamSchedule& s, double tol) {
    check_label(n, x0);
    if (k >= n || n - k > static_cast<int>(x0.size()))
        throw OutOfRange("psi needs k < n and n - k <= N");
    long X = x0[n - k - 1];
    long e = x + k + 1 - X;
    if (k >= 0 && e <= 0) return 0.0;
    double r = radius_coef(s, false, k < 0);
    auto g = [&](cd w) { return ipow(1.0 - w, k) * ipow(w, -e) * eval_f(w, s); };
    double c = checked_real(contour_integral(g, {0.0, r, 64, tol}), "psi");
    return std::ldexp(c, static_cast<int>(X - x));
}

double psi_operator(int n, int k, long x, const Config& x0, const Kernels& kr) {
    check_label(n, x0);
    if (k >= n || n - k > static_cast<int>(x0.size()))
        throw OutOfRange("psi needs k < n and n - k <= N");
    long X = x0[n - k - 1];
    double acc = 0.0;
    long hi = k >= 0 ? X : x;
    for (long u = X - k; u <= hi; ++u) acc += kr.R(x - u) * Q_pow(-k, u, X);
    return acc;
}

Rational binom_rational(long x, int j) {
    using boost::multiprecision::cpp_int;
    if (j < 0) return 0;
    cpp_int num = 1, den = 1;
    for (int i = 0; i < j; ++i) {
        num *= cpp_int(x - i);
        den *= cpp_int(i + 1);
    }
    return Rational(num, den);
}

Rational BHESolution::hhat(int l, long x) const {
    const auto& c = levels.at(static_cast<std::size_t>(l));
    Rational acc = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != 0) acc += c[j] * binom_rational(x, static_cast<int>(j));
    return acc;
}

double BHESolution::h(int l, long z) const {
    return std::ldexp(static_cast<double>(hhat(l, z)), static_cast<int>(z));
}

BHESolution bhe_solve(int n, int k, const Config& x0) {
    check_label(n, x0);
    if (k < 0 || k > n - 1) throw OutOfRange("bhe_solve needs 0 <= k <= n-1");
    BHESolution b;
    b.n = n;
    b.k = k;
    b.x0 = x0;
    b.levels.assign(k + 1, {});
    b.levels[k] = {pow2(-x0[n - k - 1])};
    for (int l = k; l >= 1; --l) {
        const auto& a = b.levels[l];
        long bnd = x0[n - l];  // X0(n-l+1)
        // hhat(l-1, x) = A(bnd) - A(x), A(x) = sum_j a_j binom(x+1, j+1)
        std::vector<Rational> next(a.size() + 1, Rational(0));
        Rational Ab = 0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            Ab += a[j] * binom_rational(bnd + 1, static_cast<int>(j) + 1);
            next[j + 1] -= a[j];
            next[j] -= a[j];
        }
        next[0] += Ab;
        b.levels[l - 1] = std::move(next);
    }
    return b;
}

double phi_from(const BHESolution& b, long z, const Kernels& kr) {
    int deg = b.degree(0);
    std::vector<Rational> v;
    for (int i = 0; i <= deg; ++i) v.push_back(b.hhat(0, z + i));
    double acc = 0.0;
    for (int j = 0; j <= deg; ++j) {
        acc += static_cast<double>(v[0]) * kr.finv_taylor(j);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
        v.pop_back();
    }
    return std::ldexp(acc, static_cast<int>(z));
}

double phi(int n, int k, long z, const Config& x0, const Kernels& kr) {
    return phi_from(bhe_solve(n, k, x0), z, kr);
}

std::vector<double> symbol_series(const ParamSchedule& s, bool inverse, int D) {
    std::vector<double> c(D + 1, 0.0);
    c[0] = 1.0;
    for (double a : s.alphas) {
        if (inverse) {
            for (int d = D; d >= 1; --d) c[d] = (c[d] - a * c[d - 1]) / (1.0 - a);
            c[0] /= 1.0 - a;
        } else {
            for (int d = 1; d <= D; ++d) c[d] = a * c[d - 1] + (1.0 - a) * c[d];
            c[0] *= 1.0 - a;
        }
    }
    for (double b : s.betas) {
        if (inverse) {
            c[0] *= 1.0 + b;
            for (int d = 1; d <= D; ++d) c[d] = -b * c[d - 1] + (1.0 + b) * c[d];
        } else {
            for (int d = D; d >= 1; --d) c[d] = (c[d] + b * c[d - 1]) / (1.0 + b);
            c[0] /= 1.0 + b;
        }
    }
    double g = s.gamma * s.t3 * (inverse ? -1.0 : 1.0);
    if (g != 0.0) {
        std::vector<double> e(D + 1);
        e[0] = std::exp(-g);
        for (int d = 1; d <= D; ++d) e[d] = e[d - 1] * g / d;
        std::vector<double> out(D + 1, 0.0);
        for (int d = 0; d <= D; ++d)
            for (int i = 0; i <= d; ++i) out[d] += c[i] * e[d - i];
        c = std::move(out);
    }
    return c;
}

double phi_direct(int n, int k, long z, const Config& x0, const ParamSchedule& s) {
    constexpr int kMaxTerms = 512;
    BHESolution b = bhe_solve(n, k, x0);
    std::vector<double> c = symbol_series(s, true, kMaxTerms);
    double acc = 0.0;
    int quiet = 0;
    for (int d = 0; d <= kMaxTerms; ++d) {
        double term = static_cast<double>(b.hhat(0, z + d)) * c[d];
        acc += term;
        if (d > k && std::abs(term) <= 1e-16 * std::max(std::abs(acc), 1e-300)) {
            if (++quiet >= 8) return std::ldexp(acc, static_cast<int>(z));
        } else {
            quiet = 0;
        }
    }
    throw TruncationFailure("phi_direct: series did not settle within 512 terms");
}

double HittingDistribution::hit_mass() const {
    double acc = 0.0;
    for (const auto& e : entries) acc += e.prob;
    return acc;
}

HittingDistribution hit_dp(long z1, const Config& x0, int n) {
    check_label(n, x0);
    HittingDistribution hd;
    hd.z1 = z1;
    hd.n = n;
    if (z1 > x0[0]) {
        hd.entries.push_back({0, z1, 1.0});
        return hd;
    }
    const long floor_ = x0[n - 1];
    if (z1 <= floor_) {
        hd.dead = 1.0;
        return hd;
    }
    // live[z - floor_ - 1] for floor_ < z <= top
    long top = z1;
    std::vector<double> live(static_cast<std::size_t>(z1 - floor_), 0.0);
    live.back() = 1.0;
    for (int m = 1; m < n; ++m) {
        const long curve = x0[m];  // X0(m+1)
        long new_top = std::min(top - 1, curve);
        std::vector<double> next(new_top > floor_ ? static_cast<std::size_t>(new_top - floor_) : 0,
                                 0.0);
        double S = 0.0;  // mass landing at z from live states above z
        for (long z = top - 1; z > floor_; --z) {
            S = 0.5 * (S + live[static_cast<std::size_t>(z + 1 - floor_ - 1)]);
            if (z > curve) {
                if (S > 0) hd.entries.push_back({m, z, S});
            } else {
                next[static_cast<std::size_t>(z - floor_ - 1)] = S;
            }
        }
        // everything reaching floor_ or below is dead; S(floor_) doubled sums that tail
        S = 0.5 * (S + live[0]);
        hd.dead += 2.0 * S;
        live = std::move(next);
        top = new_top;
        if (live.empty()) break;
    }
    for (double p : live) hd.survival += p;
    return hd;
}

double dual_hit_prob(int n, int k, int l, long z, const Config& x0) {
    check_label(n, x0);
    if (!(0 <= l && l <= k && k <= n - 1)) throw OutOfRange("need 0 <= l <= k <= n-1");
    if (z > x0[n - l - 1]) throw OutOfRange("start must satisfy z <= X0(n-l)");
    // alive[y - z] for positions z..curve at the current time
    std::vector<double> alive{1.0};
    for (int m = l; m <= k; ++m) {
        const long curve = x0[n - m - 1];  // X0(n-m)
        double hit = 0.0;
        for (std::size_t i = 0; i < alive.size(); ++i) {
            long y = z + static_cast<long>(i);
            if (alive[i] != 0.0) hit += std::ldexp(alive[i], static_cast<int>(y - curve));
        }
        if (m == k) return hit;
        std::vector<double> next(static_cast<std::size_t>(curve - z + 1), 0.0);
        double P = 0.0;
        for (long y = z + 1; y <= curve; ++y) {
            std::size_t i = static_cast<std::size_t>(y - 1 - z);
            P = 0.5 * (P + (i < alive.size() ? alive[i] : 0.0));
            next[static_cast<std::size_t>(y - z)] = P;
        }
        alive = std::move(next);
    }
    return 0.0;
}

double hitting_vs_bhe_check(int n, int k, int l, long z, const Config& x0) {
    BHESolution b = bhe_solve(n, k, x0);
    return std::abs(b.h(l, z) - dual_hit_prob(n, k, l, z, x0));
}

double G0n(long z1, long z2, int n, const Config& x0) {
    HittingDistribution hd = hit_dp(z1, x0, n);
    double acc = 0.0;
    for (const auto& e : hd.entries) acc += e.prob * Q_bar(n - e.m, e.z, z2);
    return acc;
}

double G0n_series(long z1, long z2, int n, const Config& x0) {
    check_label(n, x0);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        double q = Q_pow(n - k, z1, x0[n - k - 1]);
        if (q == 0.0) continue;
        acc += q * bhe_solve(n, k, x0).h(0, z2);
    }
    return acc;
}

double S_coef(int n, long d, const ParamSchedule& s, SVariant v, double tol, double log_scale) {
    const bool bar = v == SVariant::Sbar;
    long pw, e;  // integrand (1-w)^pw w^{-e} frakF
    if (!bar) {
        pw = n;
        e = n + d + 1;
    } else {
        pw = d + n - 1;
        e = n;
    }
    if (e <= 0) return 0.0;
    const FrakFactors ff = frak_factors(s);
    auto lg = [&](cd w) {
        return static_cast<double>(pw) * std::log(1.0 - w) - static_cast<double>(e) * std::log(w) +
               log_frakF(w, ff, bar) + log_scale;
    };
    double r = hadamard_radius(lg, 1e-3, radius_S_bound(s, bar, pw < 0));
    return checked_real(contour_integral_log(lg, {0.0, r, 64, tol}), bar ? "Sbar_kernel" : "S_kernel");
}

double S_kernel(int n, long z1, long z2, const ParamSchedule& s, SVariant v, double tol) {
    long d = z2 - z1;
    double shift = static_cast<double>(v == SVariant::S ? -d : d) * std::numbers::ln2;
    return S_coef(n, d, s, v, tol, shift);
}

double Sbar_epi(int n, long z1, long z2, const ParamSchedule& s, const Config& x0, double tol) {
    HittingDistribution hd = hit_dp(z1, x0, n);
    double acc = 0.0;
    for (const auto& e : hd.entries)
        acc += e.prob * S_kernel(n - e.m, e.z, z2, s, SVariant::Sbar, tol);
    return acc;
}

double normalization_A(const ParamSchedule& s) {
    double a = std::exp(-0.5 * s.gamma * s.t3);
    for (double al : s.alphas) a *= 2.0 * (1.0 - al) / (2.0 - al);
    for (double b : s.betas) a *= (2.0 + b) / (2.0 * (1.0 + b));
    return a;
}

double SKernels::kernel(int n, long d, SVariant v) const {
    auto key = std::make_tuple(n, d, v == SVariant::S ? 0 : 1);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = kcache_.find(key);
        if (it != kcache_.end()) return it->second;
    }
    double c = S_kernel(n, 0, d, s_, v, tol_);
    std::lock_guard<std::mutex> lk(mu_);
    kcache_[key] = c;
    return c;
}

double SKernels::sbar_epi(int n, long z1, long z2, const Config& x0) const {
    HittingDistribution hd = hit_dp(z1, x0, n);
    double acc = 0.0;
    for (const auto& e : hd.entries) acc += e.prob * kernel(n - e.m, z2 - e.z, SVariant::Sbar);
    return acc;
}

double SKernels::coef(int n, long d, SVariant v) const {
    auto key = std::make_tuple(n, d, v == SVariant::S ? 0 : 1);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    double c = S_coef(n, d, s_, v, tol_);
    std::lock_guard<std::mutex> lk(mu_);
    cache_[key] = c;
    return c;
}

}  // namespace tasep
