#include "tasep/model.hpp"

#include <cmath>
#include <sstream>

namespace tasep {

std::vector<double> ParamSchedule::ps() const {
    std::vector<double> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back(b / (1.0 + b));
    return out;
}

ParamSchedule validate_schedule(const ParamSchedule& s) {
    for (std::size_t j = 0; j < s.alphas.size(); ++j) {
        double a = s.alphas[j];
        if (!(a >= 0.0 && a < 1.0))
            throw OutOfRange("alphas[" + std::to_string(j) + "] must lie in [0,1)");
    }
    for (std::size_t j = 0; j < s.betas.size(); ++j) {
        double b = s.betas[j];
        if (!(b >= 0.0) || !std::isfinite(b))
            throw OutOfRange("betas[" + std::to_string(j) + "] must be >= 0");
    }
    if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma)) throw OutOfRange("gamma must be >= 0");
    if (!(s.t3 >= 0.0) || !std::isfinite(s.t3)) throw OutOfRange("t3 must be >= 0");
    return s;
}

void check_ordered(const Config& c, const char* what) {
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i] >= c[i - 1])
            throw OutOfRange(std::string(what) + " must be strictly decreasing");
}

long particle_inverse(const Config& c, long u) {
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] <= u) return static_cast<long>(k) + 1;
    return static_cast<long>(c.size()) + 1;
}

long HeightField::at(long z) const {
    if (z < z_lo || z > z_hi) throw WindowUnderflow("height requested outside window");
    return values[static_cast<std::size_t>(z - z_lo)];
}

HeightField height_from_config(const Config& c, const Config& c0, long z_lo, long z_hi) {
    check_ordered(c);
    check_ordered(c0, "initial configuration");
    if (z_hi < z_lo) throw OutOfRange("empty window");
    if (c.empty() || c0.empty()) throw WindowUnderflow("no particles");
    if (c0.back() > -1) throw WindowUnderflow("initial data does not reach site -1");
    if (z_lo - 1 < c.back())
        throw WindowUnderflow("window extends past the last materialized particle");
    long ref = particle_inverse(c0, -1);
    HeightField h;
    h.z_lo = z_lo;
    h.z_hi = z_hi;
    for (long z = z_lo; z <= z_hi; ++z)
        h.values.push_back(-2 * (particle_inverse(c, z - 1) - ref) - z);
    return h;
}

ParamSchedule schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    ParamSchedule s;
    auto reals = [&](const char* key) {
        std::vector<double> v;
        if (!j.contains(key)) return v;
        const auto& a = j.at(key);
        if (!a.is_array()) throw ValidationError(std::string("config/") + key + ": expected array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number())
                throw ValidationError(std::string("config/") + key + "/" + std::to_string(i) +
                                      ": expected number");
            v.push_back(a[i].get<double>());
        }
        return v;
    };
    auto real = [&](const char* key) {
        if (!j.contains(key)) return 0.0;
        if (!j.at(key).is_number())
            throw ValidationError(std::string("config/") + key + ": expected number");
        return j.at(key).get<double>();
    };
    s.alphas = reals("alphas");
    s.betas = reals("betas");
    s.gamma = real("gamma");
    s.t3 = real("t3");
    return validate_schedule(s);
}

nlohmann::json schedule_to_json(const ParamSchedule& s) {
    return {{"alphas", s.alphas}, {"betas", s.betas}, {"gamma", s.gamma}, {"t3", s.t3}};
}

Config x0_from_json(const nlohmann::json& j) {
    if (!j.contains("x0")) throw ValidationError("config/x0: missing");
    const auto& a = j.at("x0");
    if (!a.is_array() || a.empty()) throw ValidationError("config/x0: expected non-empty array");
    Config c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number_integer())
            throw ValidationError("config/x0/" + std::to_string(i) + ": expected integer");
        c.push_back(a[i].get<long>());
    }
    check_ordered(c, "x0");
    return c;
}

}  // namespace tasep
