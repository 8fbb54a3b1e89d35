#include "tasep/kpz.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "tasep/fredholm.hpp"
#include "tasep/simulate.hpp"

namespace tasep {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr double kPi = std::numbers::pi;
const cd kRay = std::polar(1.0, kPi / 3.0);

double quad(const std::function<double(double)>& f, double a, double b) {
    return GK::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

Model model_from_string(const std::string& s) {
    if (s == "bernoulli") return Model::bernoulli;
    if (s == "geometric") return Model::geometric;
    throw ValidationError("model must be bernoulli or geometric, got '" + s + "'");
}

std::string to_string(Model m) { return m == Model::bernoulli ? "bernoulli" : "geometric"; }

double airy_series(double zeta) {
    const long double x = zeta, x3 = x * x * x;
    const long double c1 = 0.355028053887817239260063186004183177L;
    const long double c2 = 0.258819403792806798405183560189203963L;
    long double f = 1, g = x, tf = 1, tg = x;
    for (int k = 0; k < 400; ++k) {
        tf *= x3 / ((3.0L * k + 2) * (3.0L * k + 3));
        tg *= x3 / ((3.0L * k + 3) * (3.0L * k + 4));
        f += tf;
        g += tg;
        if (k > 2 && std::abs(tf) + std::abs(tg) < 1e-24L * (std::abs(f) + std::abs(g))) break;
    }
    return static_cast<double>(c1 * f - c2 * g);
}

double airy_contour(double zeta) {
    auto g = [zeta](cd w) { return std::exp(w * w * w / 3.0 - zeta * w); };
    constexpr double L = 7.0;
    double acc;
    if (zeta >= 0) {
        cd w0 = std::sqrt(zeta);
        acc = quad([&](double s) { return (g(w0 + s * kRay) * kRay).imag(); }, 0.0, L);
    } else {
        cd ia(0.0, std::sqrt(-zeta));
        acc = quad([&](double s) { return g(ia - s).imag(); }, 0.0, L) +
              quad([&](double s) { return (g(ia + s * kRay) * kRay).imag(); }, 0.0, L);
    }
    return acc / kPi;
}

double airy(double zeta) {
    if (!(std::abs(zeta) <= 30.0)) throw RangeGuard("airy argument outside [-30, 30]");
    return std::abs(zeta) <= 6.0 ? airy_series(zeta) : airy_contour(zeta);
}

double S_limit(double t, double x, double v, double u) {
    if (!(t > 0)) throw OutOfRange("S_limit needs t > 0");
    const double a = std::cbrt(t);
    const double zeta = -(v - u) / a + x * x / (a * a * a * a);
    const double lead = 2.0 * x * x * x / (3.0 * t * t) - (v - u) * x / t;
    if (zeta > 30.0) {
        double log_ai = -2.0 / 3.0 * std::pow(zeta, 1.5) - std::log(2.0 * std::sqrt(kPi)) -
                        0.25 * std::log(zeta);
        if (lead + log_ai < -700.0) return 0.0;
        return std::exp(lead) * airy_contour(zeta) / a;
    }
    return std::exp(lead) * airy(zeta) / a;
}

double S_limit_contour(double t, double x, double v, double u) {
    if (!(t > 0)) throw OutOfRange("S_limit needs t > 0");
    const double a = std::cbrt(t);
    const double zeta = -(v - u) / a + x * x / (a * a * a * a);
    const cd c = -x / t + std::sqrt(std::max(zeta, 0.0)) / a;
    auto g = [&](cd w) { return std::exp(t * w * w * w / 3.0 + x * w * w + (v - u) * w); };
    double L = 7.0 / a + 2.0 * std::abs(x) / t;
    return quad([&](double s) { return (g(c + s * kRay) * kRay).imag(); }, 0.0, L) / kPi;
}

double heat_kernel(double s, double du) {
    if (!(s > 0)) throw OutOfRange("heat kernel needs s > 0");
    return std::exp(-du * du / (4.0 * s)) / std::sqrt(4.0 * kPi * s);
}

double epi_limit(double t, double x, double v, double u) {
    if (v >= 0) return S_limit(t, -x, u, v);
    // first passage from v to 0 is v^2 / (2 Z^2) with Z standard normal
    auto f = [&](double z) {
        if (z <= 0) return 0.0;
        double s = v * v / (2.0 * z * z);
        return 2.0 * std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi) * S_limit(t, -(x + s), u, 0.0);
    };
    return GK::integrate(f, 0.0, 40.0, 15, 1e-10);
}

FrameConstants frame_constants(Model m, double q) {
    if (!(q > 0 && q < 1)) throw OutOfRange("model parameter must lie in (0,1)");
    double ct = (2 - q) * (2 - q) * (2 - q) / (4 * q * (1 - q));
    if (m == Model::bernoulli) return {ct, (2 - q) / 4, q * (2 - q) / (4 * (1 - q)), (2 - q) / 2};
    return {ct, (2 - q) / (4 * (1 - q)), -q * (2 - q) / (4 * (1 - q)), (2 - q) / (2 * (1 - q))};
}

ScalingFrame make_frame(Model m, double q, double eps, double T, double X, double U, double V) {
    if (!(eps > 0 && eps < 1)) throw OutOfRange("eps must lie in (0,1)");
    if (!(T > 0)) throw OutOfRange("macroscopic time must be positive");
    const FrameConstants c = frame_constants(m, q);
    const double E = std::pow(eps, -1.5), re = std::sqrt(eps);
    ScalingFrame f{m, q, eps, T, X, U, V};
    f.t = std::lround(std::nearbyint(c.ct * E * T));
    if (f.t < 1) throw OutOfRange("frame has no time steps");
    f.te = f.t / (c.ct * E);
    f.n = std::lround(std::nearbyint(c.cn * E * f.te - X / eps + 1));
    if (f.n < 1) throw OutOfRange("frame label below 1");
    f.xe = (c.cn * E * f.te + 1 - f.n) * eps;
    f.z = std::lround(std::nearbyint(c.cz * E * f.te + 2 * f.xe / eps + U / re - 2));
    f.ue = (f.z - c.cz * E * f.te - 2 * f.xe / eps + 2) * re;
    f.y = std::lround(std::nearbyint(V / re));
    f.ve = f.y * re;
    return f;
}

ParamSchedule frame_schedule(Model m, double q, long t) {
    ParamSchedule s;
    if (m == Model::bernoulli)
        s.betas.assign(static_cast<std::size_t>(t), q / (1 - q));
    else
        s.alphas.assign(static_cast<std::size_t>(t), q);
    return s;
}

Config half_flat(long n) {
    Config c;
    for (long j = 1; j <= n; ++j) c.push_back(-2 * j);
    return c;
}

double scaled_S(const ScalingFrame& f, SVariant v) {
    ParamSchedule s = frame_schedule(f.model, f.q, f.t);
    return S_kernel(static_cast<int>(f.n), f.y, f.z, s, v) / std::sqrt(f.eps);
}

namespace {

void prefill_epi(const SKernels& sk, int n, long z1, long z2, const Config& x0) {
    auto entries = hit_dp(z1, x0, n).entries;
    int nt = worker_count();
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < entries.size(); i += nt)
                sk.kernel(n - entries[i].m, z2 - entries[i].z, SVariant::Sbar);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

double scaled_S_epi(const ScalingFrame& f) {
    SKernels sk(frame_schedule(f.model, f.q, f.t));
    Config x0 = half_flat(f.n);
    prefill_epi(sk, static_cast<int>(f.n), f.y, f.z, x0);
    return sk.sbar_epi(static_cast<int>(f.n), f.y, f.z, x0) / std::sqrt(f.eps);
}

double limit_S(const ScalingFrame& f, SVariant v) {
    return v == SVariant::S ? S_limit(f.te, f.xe, f.ue, f.ve) : S_limit(f.te, -f.xe, f.ue, f.ve);
}

double limit_S_epi(const ScalingFrame& f) { return epi_limit(f.te, f.xe, f.ve, f.ue); }

double scaled_height(Model m, double q, double eps, const Config& c, const Config& c0, double T,
                     double X) {
    const FrameConstants fc = frame_constants(m, q);
    long x = std::lround(std::nearbyint(2 * X / eps));
    HeightField h = height_from_config(c, c0, x, x);
    return std::sqrt(eps) * (static_cast<double>(h.at(x)) + fc.speed * std::pow(eps, -1.5) * T);
}

QLimitPoint q_term_limit(double eps, double xi, double ui, double xj, double uj) {
    if (!(xi > xj)) throw OutOfRange("Q-term limit needs xi > xj");
    long m = std::lround(std::nearbyint((xi - xj) / eps));
    if (m < 1) throw OutOfRange("Q-term power below 1 at this eps");
    long d = std::lround(std::nearbyint(2 * (xi - xj) / eps + (ui - uj) / std::sqrt(eps)));
    QLimitPoint p;
    p.scaled = Q_pow(m, d, 0) / std::sqrt(eps);
    p.s_eff = m * eps;
    p.du_eff = (d - 2 * m) * std::sqrt(eps);
    p.limit = heat_kernel(p.s_eff, p.du_eff);
    return p;
}

KernelLimitPoint kernel_limit(Model m, double q, double eps, double T, double xi, double ui,
                              double xj, double uj) {
    ScalingFrame fi = make_frame(m, q, eps, T, xi, ui, 0.0);
    ScalingFrame fj = make_frame(m, q, eps, T, xj, uj, 0.0);
    SKernels sk(frame_schedule(m, q, fi.t));
    Config x0 = half_flat(std::max(fi.n, fj.n));
    KernelLimitPoint out;
    out.scaled = kernel_Kt(static_cast<int>(fi.n), fi.z, static_cast<int>(fj.n), fj.z, x0, sk, 0) /
                 std::sqrt(eps);
    double lim = 0.0;
    if (fi.n < fj.n) lim -= heat_kernel(fi.xe - fj.xe, fi.ue - fj.ue);
    auto integrand = [&](double v) {
        return S_limit(fi.te, fi.xe, fi.ue, v) * epi_limit(fi.te, fj.xe, v, fj.ue);
    };
    lim += GK::integrate(integrand, -16.0, 0.0, 10, 1e-9) + GK::integrate(integrand, 0.0, 16.0, 10, 1e-9);
    out.limit = lim;
    return out;
}

namespace {

template <class T>
T phase_t(Model m, double q, double that, T x) {
    const FrameConstants c = frame_constants(m, q);
    const double r = q / (2 - q);
    T tail = m == Model::bernoulli ? c.ct * std::log(T(1) - r * x) : -c.ct * std::log(T(1) + r * x);
    return that * (c.cn * std::log(T(1) + x) - (c.cn + c.cz) * std::log(T(1) - x) + tail);
}

}  // namespace

double phase(Model m, double q, double that, double x) {
    const FrameConstants c = frame_constants(m, q);
    const double r = q / (2 - q);
    double tail = m == Model::bernoulli ? c.ct * std::log1p(-r * x) : -c.ct * std::log1p(r * x);
    return that * (c.cn * std::log1p(x) - (c.cn + c.cz) * std::log1p(-x) + tail);
}

SaddleReport saddle_check(Model m, double q, double that) {
    const double h = 2e-4;
    auto f = [&](double x) { return phase(m, q, that, x); };
    SaddleReport r;
    r.f0 = f(0.0);
    r.f1 = (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h);
    r.f2 = (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
    r.f3 = (-f(3 * h) + 8 * f(2 * h) - 13 * f(h) + 13 * f(-h) - 8 * f(-2 * h) + f(-3 * h)) /
           (8 * h * h * h);
    r.expected_f3 = 2 * that;
    return r;
}

double far_arc_kappa(Model m, double q, double that) {
    double worst = -std::numeric_limits<double>::infinity();
    constexpr int kSamples = 4000;
    for (int k = 1; k < kSamples; ++k) {
        cd x = 1.0 - std::polar(1.0, 2 * kPi * k / kSamples);
        if (std::abs(x) < 0.5 || std::abs(1.0 - x) < 1e-12) continue;
        worst = std::max(worst, phase_t<cd>(m, q, that, x).real());
    }
    return -worst / that;
}

namespace {

bool weakly_decreasing(const std::vector<ConvergenceRow>& rows, double ConvergenceRow::*col) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].*col > rows[i - 1].*col) return false;
    return true;
}

}  // namespace

bool ConvergenceReport::monotone_S() const { return weakly_decreasing(rows, &ConvergenceRow::err_S); }
bool ConvergenceReport::monotone_Sbar() const {
    return weakly_decreasing(rows, &ConvergenceRow::err_Sbar);
}
bool ConvergenceReport::monotone_epi() const {
    return weakly_decreasing(rows, &ConvergenceRow::err_epi);
}

ConvergenceReport convergence_report(Model m, double q, double T, double X, double U, double V,
                                     const std::vector<double>& eps_list, bool with_kernel,
                                     KernelTuple kt) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw ValidationError("eps list must be decreasing");
    ConvergenceReport rep{m, q, T, X, U, V, {}};
    for (double eps : eps_list) {
        ScalingFrame f = make_frame(m, q, eps, T, X, U, V);
        ConvergenceRow r{};
        r.eps = eps;
        r.t = f.t;
        r.n = f.n;
        r.z = f.z;
        r.y = f.y;
        r.dt = f.te - T;
        r.dx = f.xe - X;
        r.du = f.ue - U;
        r.dv = f.ve - V;
        r.scaled_S = scaled_S(f, SVariant::S);
        r.scaled_Sbar = scaled_S(f, SVariant::Sbar);
        r.scaled_epi = scaled_S_epi(f);
        r.limit_S = limit_S(f, SVariant::S);
        r.limit_Sbar = limit_S(f, SVariant::Sbar);
        r.limit_epi = limit_S_epi(f);
        r.err_S = std::abs(r.scaled_S - r.limit_S);
        r.err_Sbar = std::abs(r.scaled_Sbar - r.limit_Sbar);
        r.err_epi = std::abs(r.scaled_epi - r.limit_epi);
        if (with_kernel) {
            QLimitPoint qp = q_term_limit(eps, kt.xi, kt.ui, kt.xj, kt.uj);
            r.q_err = std::abs(qp.scaled - qp.limit);
            KernelLimitPoint kp = kernel_limit(m, q, eps, T, kt.xi, kt.ui, kt.xj, kt.uj);
            r.k_err = std::abs(kp.scaled - kp.limit);
        }
        rep.rows.push_back(r);
    }
    return rep;
}

}  // namespace tasep
