#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "tasep/model.hpp"
#include "tasep/rng.hpp"

namespace tasep {

// Draws for label j at step k come from Stream(seed, stream, k, j), so the
// first n labels evolve identically whatever happens behind them.
Config step_bernoulli(const Config& c, double p, const RngStream& r, long step = 0);
Config step_geometric(const Config& c, double alpha, const RngStream& r, long step = 0);
Config evolve_continuous(const Config& c, double gamma, double duration, const RngStream& r,
                         long phase = 0);

// geometric steps, then Bernoulli steps, then continuous time; optional
// record of the configuration after every stage
Config run_mixed(const Config& x0, const ParamSchedule& s, const RngStream& r,
                 std::vector<Config>* trajectory = nullptr);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long samples = 0;
};

struct LabelQuery {
    int label;       // n_j, 1-based
    long threshold;  // event X_t(n_j) > threshold
};

// threads <= 0 reads TASEP_THREADS, falling back to hardware concurrency
McEstimate mc_joint_prob(const Config& x0, const ParamSchedule& s,
                         const std::vector<LabelQuery>& queries, long samples,
                         std::uint64_t seed, int threads = 0);

int worker_count(int requested = 0);

}  // namespace tasep
