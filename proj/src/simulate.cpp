#include "tasep/simulate.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>

namespace tasep {

namespace {

constexpr long kLongInf = std::numeric_limits<long>::max() / 4;

// continuous phases get step ids far from the discrete ones
constexpr std::uint64_t kContinuousTag = 0x8000000000000000ULL;

}  // namespace

Config step_bernoulli(const Config& c, double p, const RngStream& r, long step) {
    Config out(c);
    for (std::size_t i = 0; i < c.size(); ++i) {
        long ahead = i == 0 ? kLongInf : out[i - 1];
        if (ahead - c[i] <= 1) continue;
        Stream g(r.seed, r.stream, static_cast<std::uint64_t>(step), i + 1);
        if (g.uniform() < p) out[i] = c[i] + 1;
    }
    return out;
}

Config step_geometric(const Config& c, double alpha, const RngStream& r, long step) {
    Config out(c);
    if (alpha <= 0.0) return out;
    double la = std::log(alpha);
    for (std::size_t i = 0; i < c.size(); ++i) {
        long gap = i == 0 ? kLongInf : c[i - 1] - c[i];
        if (gap <= 1) continue;
        Stream g(r.seed, r.stream, static_cast<std::uint64_t>(step), i + 1);
        double a = std::floor(std::log1p(-g.uniform()) / la);
        long jump = a >= static_cast<double>(gap - 1) ? gap - 1 : static_cast<long>(a);
        out[i] = c[i] + jump;
    }
    return out;
}

Config evolve_continuous(const Config& c, double gamma, double duration, const RngStream& r,
                         long phase) {
    Config out(c);
    if (gamma <= 0.0 || duration <= 0.0) return out;
    // jump times of the previous label, in increasing order
    std::vector<double> prev_jumps, jumps;
    for (std::size_t i = 0; i < c.size(); ++i) {
        Stream g(r.seed, r.stream, kContinuousTag | static_cast<std::uint64_t>(phase), i + 1);
        jumps.clear();
        long pos = c[i];
        std::size_t ahead_moves = 0;
        for (double t = g.exponential(gamma); t < duration; t += g.exponential(gamma)) {
            if (i == 0) {
                ++pos;
                jumps.push_back(t);
                continue;
            }
            while (ahead_moves < prev_jumps.size() && prev_jumps[ahead_moves] <= t) ++ahead_moves;
            long ahead = c[i - 1] + static_cast<long>(ahead_moves);
            if (ahead - pos > 1) {
                ++pos;
                jumps.push_back(t);
            }
        }
        out[i] = pos;
        std::swap(prev_jumps, jumps);
    }
    return out;
}

Config run_mixed(const Config& x0, const ParamSchedule& s, const RngStream& r,
                 std::vector<Config>* trajectory) {
    Config c(x0);
    long step = 0;
    if (trajectory) trajectory->push_back(c);
    for (double a : s.alphas) {
        c = step_geometric(c, a, r, step++);
        if (trajectory) trajectory->push_back(c);
    }
    for (double b : s.betas) {
        c = step_bernoulli(c, b / (1.0 + b), r, step++);
        if (trajectory) trajectory->push_back(c);
    }
    if (s.gamma > 0.0 && s.t3 > 0.0) {
        c = evolve_continuous(c, s.gamma, s.t3, r);
        if (trajectory) trajectory->push_back(c);
    }
    return c;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TASEP_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

McEstimate mc_joint_prob(const Config& x0, const ParamSchedule& s,
                         const std::vector<LabelQuery>& queries, long samples,
                         std::uint64_t seed, int threads) {
    check_ordered(x0, "x0");
    if (samples < 1) throw OutOfRange("samples must be >= 1");
    int nmax = 0;
    for (const auto& q : queries) {
        if (q.label < 1 || q.label > static_cast<int>(x0.size()))
            throw LabelOutOfRange("label " + std::to_string(q.label) + " outside 1.." +
                                  std::to_string(x0.size()));
        nmax = std::max(nmax, q.label);
    }
    // labels behind the largest queried one never influence it
    Config head(x0.begin(), x0.begin() + nmax);

    int nt = static_cast<int>(std::max<long>(1, std::min<long>(worker_count(threads), samples)));
    std::vector<long> hits(nt, 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&, w] {
            long lo = samples * w / nt, hi = samples * (w + 1) / nt, count = 0;
            for (long k = lo; k < hi; ++k) {
                Config c = run_mixed(head, s, RngStream{seed, static_cast<std::uint64_t>(k)});
                bool ok = true;
                for (const auto& q : queries)
                    if (!(c[q.label - 1] > q.threshold)) {
                        ok = false;
                        break;
                    }
                count += ok;
            }
            hits[w] = count;
        });
    }
    for (auto& t : pool) t.join();
    long total = 0;
    for (long h : hits) total += h;
    McEstimate e;
    e.samples = samples;
    e.value = static_cast<double>(total) / static_cast<double>(samples);
    e.stderr_ = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(samples));
    return e;
}

}  // namespace tasep
