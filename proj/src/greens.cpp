#include "tasep/greens.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace tasep {

double greens_det(const Config& x, const Config& y, const Kernels& k, int max_n) {
    check_ordered(x, "x");
    check_ordered(y, "y");
    if (x.size() != y.size()) throw OutOfRange("x and y must have equal particle counts");
    const int n = static_cast<int>(x.size());
    if (n > max_n) throw SizeGuard("greens_det limited to N <= " + std::to_string(max_n));
    if (n == 0) return 1.0;
    Eigen::MatrixXd m(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) m(i - 1, j - 1) = k.F(i - j, x[n - i] - y[n - j]);
    double det = n == 1 ? m(0, 0) : m.partialPivLu().determinant();
    if (det < -1e-9 || det > 1.0 + 1e-9)
        throw NoConvergence("greens_det outside [0,1]: " + std::to_string(det));
    return det;
}

double greens_det(const Config& x, const Config& y, const ParamSchedule& s, int max_n) {
    Kernels k(s);
    return greens_det(x, y, k, max_n);
}

namespace {

// P(sum of t independent Geom(alpha) > pad), computed from the upper tail
double negbin_tail(int t, double alpha, int pad) {
    if (t == 0 || alpha <= 0) return 0.0;
    double logp = t * std::log1p(-alpha);
    double acc = 0.0;
    double term = 0.0;
    for (long kk = pad + 1;; ++kk) {
        term = std::exp(logp + std::lgamma(kk + t) - std::lgamma(kk + 1.0) - std::lgamma(t) +
                        kk * std::log(alpha));
        acc += term;
        if (term < 1e-18 * acc || kk > pad + 100000) break;
    }
    return acc;
}

}  // namespace

NormalizationReport normalization_check(const Config& y, const ParamSchedule& s, int support_pad,
                                        int max_n) {
    check_ordered(y, "y");
    if (!s.discrete_only()) throw ValidationError("normalization_check needs t3 = 0 or gamma = 0");
    const int n = static_cast<int>(y.size());
    if (n > max_n) throw SizeGuard("normalization_check limited to N <= " + std::to_string(max_n));
    Kernels k(s);
    long reach = s.t2() + (s.t1() > 0 ? support_pad : 0);
    NormalizationReport rep;
    double amax = 0.0;
    for (double a : s.alphas) amax = std::max(amax, a);
    if (s.t1() > 0) rep.tail_bound = n * negbin_tail(s.t1(), amax, support_pad);

    Config x(y);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            rep.sum += greens_det(x, y, k, max_n);
            ++rep.configs;
            return;
        }
        long hi = y[i] + reach;
        if (i > 0) hi = std::min(hi, x[i - 1] - 1);
        for (long v = y[i]; v <= hi; ++v) {
            x[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return rep;
}

ForwardReport forward_equation_check_geometric(const Config& x, const Config& y, double alpha_next,
                                               const ParamSchedule& s, int pad) {
    check_ordered(x, "x");
    check_ordered(y, "y");
    const int n = static_cast<int>(x.size());
    if (n > 3) throw SizeGuard("forward equation check limited to N <= 3");
    if (static_cast<int>(y.size()) != n) throw OutOfRange("x and y must have equal sizes");
    if (!(alpha_next >= 0 && alpha_next < 1)) throw OutOfRange("alpha_next must lie in [0,1)");
    ParamSchedule next = s;
    next.alphas.push_back(alpha_next);
    Kernels kt(s), kt1(next);
    const double a = alpha_next;

    ForwardReport rep;
    rep.lhs = greens_det(x, y, kt1);
    // bit j of mu set: particle j+2 made the maximal (blocked) jump, so that
    // particle j+1 sat at x[j+1]+1 before the step
    for (int mu = 0; mu < (1 << (n - 1)); ++mu) {
        int free_count = 1;
        std::vector<long> lo(n), hi(n);
        double fixed_weight = 1.0;
        bool empty = false;
        for (int j = 0; j < n - 1; ++j) {
            long kj = x[j] - x[j + 1];
            if (mu >> j & 1) {
                lo[j] = hi[j] = kj - 1;
                fixed_weight *= std::pow(a, static_cast<double>(kj - 1));
            } else {
                ++free_count;
                lo[j] = 0;
                hi[j] = kj - 2;
                if (hi[j] < 0) empty = true;
            }
        }
        if (empty) continue;
        lo[n - 1] = 0;
        hi[n - 1] = pad;
        double prefactor = std::pow(1.0 - a, free_count) * fixed_weight;
        Config prev(n);
        std::function<void(int, double)> rec = [&](int i, double w) {
            if (i == n) {
                rep.rhs += prefactor * w * greens_det(prev, y, kt);
                return;
            }
            for (long ai = lo[i]; ai <= hi[i]; ++ai) {
                prev[i] = x[i] - ai;
                bool blocked = (mu >> i & 1) != 0;
                rec(i + 1, blocked ? w : w * std::pow(a, static_cast<double>(ai)));
            }
        };
        rec(0, 1.0);
    }
    rep.tail_bound = std::ldexp(std::pow(a, pad + 1.0) / (1.0 - a), n - 1);
    rep.residual = std::abs(rep.lhs - rep.rhs);
    return rep;
}

}  // namespace tasep
