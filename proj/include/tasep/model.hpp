#pragma once
#include <string>
#include <vector>

#include "json.hpp"

#include "tasep/errors.hpp"

namespace tasep {

// Mixed dynamics: t1 geometric steps, then t2 Bernoulli steps, then rate-gamma
// continuous evolution for time t3.
struct ParamSchedule {
    std::vector<double> alphas;
    std::vector<double> betas;
    double gamma = 0.0;
    double t3 = 0.0;

    int t1() const { return static_cast<int>(alphas.size()); }
    int t2() const { return static_cast<int>(betas.size()); }
    double total_time() const { return t1() + t2() + t3; }
    bool discrete_only() const { return gamma * t3 == 0.0; }
    std::vector<double> ps() const;  // beta/(1+beta)
};

ParamSchedule validate_schedule(const ParamSchedule& s);

// positions[j-1] = X(j); strictly decreasing
using Config = std::vector<long>;

void check_ordered(const Config& c, const char* what = "configuration");

// min{k : X(k) <= u}, or N+1 when no particle sits at or left of u
long particle_inverse(const Config& c, long u);

struct HeightField {
    long z_lo = 0, z_hi = -1;
    std::vector<long> values;
    long at(long z) const;
};

HeightField height_from_config(const Config& c, const Config& c0, long z_lo, long z_hi);

// JSON keys: alphas, betas, gamma, t3, x0
ParamSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const ParamSchedule& s);
Config x0_from_json(const nlohmann::json& j);

}  // namespace tasep
