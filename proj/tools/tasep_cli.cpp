#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tasep/fredholm.hpp"
#include "tasep/greens.hpp"
#include "tasep/kpz.hpp"
#include "tasep/simulate.hpp"
#include "tasep/version.hpp"

using nlohmann::json;
using namespace tasep;

namespace {

struct RunConfig {
    std::string command;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 42;
    long samples = 0;
    double tol = 0.0;  // 0 keeps each operation's default
    std::string eps = "0.1,0.05,0.025,0.0125";
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string joined(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
    return os.str();
}

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("config/") + key + ": missing");
    return j.at(key);
}

std::vector<long> int_list(const json& a, const std::string& path) {
    if (!a.is_array()) throw ValidationError(path + ": expected array");
    std::vector<long> v;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number_integer())
            throw ValidationError(path + "/" + std::to_string(i) + ": expected integer");
        v.push_back(a[i].get<long>());
    }
    return v;
}

class Csv {
public:
    explicit Csv(const std::string& path) : out_(path) {
        if (!out_) throw ValidationError("cannot write '" + path + "'");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void run_simulate(const RunConfig& rc, const json& cfg) {
    ParamSchedule s = schedule_from_json(cfg);
    Config x0 = x0_from_json(cfg);
    std::vector<Config> traj;
    run_mixed(x0, s, RngStream{rc.seed, 0}, &traj);
    Csv csv(rc.out_path);
    csv.row({"step", "label", "position"});
    for (std::size_t k = 0; k < traj.size(); ++k)
        for (std::size_t j = 0; j < traj[k].size(); ++j)
            csv.row({std::to_string(k), std::to_string(j + 1), std::to_string(traj[k][j])});
}

void run_green(const RunConfig& rc, const json& cfg) {
    ParamSchedule s = schedule_from_json(cfg);
    Config y = x0_from_json(cfg);
    const json& targets = require(cfg, "targets");
    if (!targets.is_array()) throw ValidationError("config/targets: expected array");
    Kernels kr(s, rc.tol > 0 ? rc.tol : 1e-12);
    Csv csv(rc.out_path);
    std::vector<std::string> head;
    for (std::size_t j = 0; j < y.size(); ++j) head.push_back("x" + std::to_string(j + 1));
    head.push_back("probability");
    csv.row(head);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        Config x = int_list(targets[i], "config/targets/" + std::to_string(i));
        if (x.size() != y.size())
            throw ValidationError("config/targets/" + std::to_string(i) + ": wrong particle count");
        check_ordered(x, "target");
        std::vector<std::string> cells;
        for (long v : x) cells.push_back(std::to_string(v));
        cells.push_back(num(greens_det(x, y, kr)));
        csv.row(cells);
    }
}

void run_dist(const RunConfig& rc, const json& cfg) {
    std::vector<JointQuery> queries;
    if (cfg.contains("queries")) {
        const json& qs = cfg.at("queries");
        if (!qs.is_array()) throw ValidationError("config/queries: expected array");
        for (std::size_t i = 0; i < qs.size(); ++i) {
            json merged = qs[i];
            for (const char* key : {"alphas", "betas", "gamma", "t3", "x0"})
                if (!merged.contains(key) && cfg.contains(key)) merged[key] = cfg.at(key);
            queries.push_back(query_from_json(merged));
        }
    } else {
        queries.push_back(query_from_json(cfg));
    }
    Csv csv(rc.out_path);
    csv.row({"labels", "thresholds", "fredholm", "mc", "abs_diff", "stderr", "window"});
    for (const auto& q : queries) {
        JointResult jr = joint_dist_ex(q, rc.tol > 0 ? rc.tol : 1e-8);
        if (jr.ill_conditioned) std::cerr << "warning: section matrix condition above 1e12\n";
        std::string mc = "", diff = "", se = "";
        if (rc.samples > 0) {
            std::vector<LabelQuery> lq;
            for (std::size_t j = 0; j < q.labels.size(); ++j) lq.push_back({q.labels[j], q.thresholds[j]});
            McEstimate est = mc_joint_prob(q.x0, q.s, lq, rc.samples, rc.seed);
            mc = num(est.value);
            diff = num(std::abs(est.value - jr.value));
            se = num(est.stderr_);
        }
        csv.row({joined(q.labels), joined(q.thresholds), num(jr.value), mc, diff, se,
                 std::to_string(jr.W)});
    }
}

void run_kernel(const RunConfig& rc, const json& cfg) {
    ParamSchedule s = schedule_from_json(cfg);
    Config x0 = x0_from_json(cfg);
    const double tol = rc.tol > 0 ? rc.tol : 1e-12;
    const json& fn = require(cfg, "function");
    if (!fn.is_string()) throw ValidationError("config/function: expected string");
    const std::string f = fn.get<std::string>();
    const json& pts = require(cfg, "points");
    if (!pts.is_array()) throw ValidationError("config/points: expected array");
    Kernels kr(s, tol);

    struct Spec {
        std::vector<std::string> cols;
        std::function<double(const std::vector<long>&)> eval;
    };
    std::map<std::string, Spec> table{
        {"psi", {{"n", "k", "x"}, [&](const auto& p) {
                     return psi(int(p[0]), int(p[1]), p[2], x0, s, tol);
                 }}},
        {"phi", {{"n", "k", "z"}, [&](const auto& p) {
                     return phi(int(p[0]), int(p[1]), p[2], x0, kr);
                 }}},
        {"h", {{"n", "k", "l", "z"}, [&](const auto& p) {
                   return bhe_solve(int(p[0]), int(p[1]), x0).h(int(p[2]), p[3]);
               }}},
        {"S", {{"n", "z1", "z2"}, [&](const auto& p) {
                   return S_kernel(int(p[0]), p[1], p[2], s, SVariant::S, tol);
               }}},
        {"Sbar", {{"n", "z1", "z2"}, [&](const auto& p) {
                      return S_kernel(int(p[0]), p[1], p[2], s, SVariant::Sbar, tol);
                  }}},
        {"Sbar_epi", {{"n", "z1", "z2"}, [&](const auto& p) {
                          return Sbar_epi(int(p[0]), p[1], p[2], s, x0, tol);
                      }}},
        {"K", {{"ni", "x", "nj", "y"}, [&](const auto& p) {
                   return kernel_Kt(int(p[0]), p[1], int(p[2]), p[3], x0, s, tol);
               }}},
    };
    auto it = table.find(f);
    if (it == table.end())
        throw ValidationError("config/function: unknown function '" + f +
                              "' (psi, phi, h, S, Sbar, Sbar_epi, K)");
    const Spec& spec = it->second;
    Csv csv(rc.out_path);
    std::vector<std::string> head = spec.cols;
    head.push_back("value");
    csv.row(head);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::string path = "config/points/" + std::to_string(i);
        std::vector<long> p = int_list(pts[i], path);
        if (p.size() != spec.cols.size())
            throw ValidationError(path + ": expected " + std::to_string(spec.cols.size()) + " integers");
        std::vector<std::string> cells;
        for (long v : p) cells.push_back(std::to_string(v));
        cells.push_back(num(spec.eval(p)));
        csv.row(cells);
    }
}

std::vector<double> parse_eps(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("--eps: cannot parse '" + tok + "'");
        }
    }
    if (out.empty()) throw ValidationError("--eps: empty list");
    return out;
}

double real_field(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ValidationError(std::string("config/") + key + ": expected number");
    return j.at(key).get<double>();
}

void run_limit(const RunConfig& rc, const json& cfg) {
    const json& mj = require(cfg, "model");
    if (!mj.is_string()) throw ValidationError("config/model: expected string");
    Model m = model_from_string(mj.get<std::string>());
    double q = real_field(cfg, "q", 0.5);
    double T = real_field(cfg, "t", 1.0), X = real_field(cfg, "x", 0.0);
    double U = real_field(cfg, "u", 0.0), V = real_field(cfg, "v", 0.0);
    bool with_kernel = cfg.contains("kernel");
    KernelTuple kt;
    if (with_kernel) {
        const json& k = cfg.at("kernel");
        if (!k.is_object()) throw ValidationError("config/kernel: expected object");
        kt = {real_field(k, "xi", kt.xi), real_field(k, "ui", kt.ui), real_field(k, "xj", kt.xj),
              real_field(k, "uj", kt.uj)};
    }
    ConvergenceReport rep = convergence_report(m, q, T, X, U, V, parse_eps(rc.eps), with_kernel, kt);
    Csv csv(rc.out_path);
    csv.row({"eps", "t", "n", "z", "y", "dt", "dx", "du", "dv", "scaled_S", "limit_S", "err_S",
             "scaled_Sbar", "limit_Sbar", "err_Sbar", "scaled_epi", "limit_epi", "err_epi", "err_Q",
             "err_K"});
    for (const auto& r : rep.rows)
        csv.row({num(r.eps), std::to_string(r.t), std::to_string(r.n), std::to_string(r.z),
                 std::to_string(r.y), num(r.dt), num(r.dx), num(r.du), num(r.dv), num(r.scaled_S),
                 num(r.limit_S), num(r.err_S), num(r.scaled_Sbar), num(r.limit_Sbar),
                 num(r.err_Sbar), num(r.scaled_epi), num(r.limit_epi), num(r.err_epi),
                 with_kernel ? num(r.q_err) : "", with_kernel ? num(r.k_err) : ""});
}

void write_sidecar(const RunConfig& rc, const json& cfg) {
    json side = {{"command", rc.command},   {"config", cfg},     {"config_path", rc.config_path},
                 {"seed", rc.seed},         {"samples", rc.samples}, {"tol", rc.tol},
                 {"version", kVersion}};
    if (rc.command == "limit") side["eps"] = rc.eps;
    std::ofstream out(rc.out_path + ".json");
    if (!out) throw ValidationError("cannot write sidecar '" + rc.out_path + ".json'");
    out << side.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed discrete/continuous TASEP: simulation, transition probabilities, "
                 "Fredholm joint distributions and KPZ-limit checks"};
    app.require_subcommand(1);
    RunConfig rc;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", rc.config_path, "JSON input")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", rc.out_path, "CSV output; a JSON sidecar goes to OUT.json")->required();
        sub->add_option("--seed", rc.seed, "random seed");
        sub->add_option("--samples", rc.samples, "Monte Carlo samples")->check(CLI::NonNegativeNumber);
        sub->add_option("--tol", rc.tol, "tolerance override")->check(CLI::NonNegativeNumber);
    };
    for (const char* name : {"simulate", "green", "dist", "kernel", "limit"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        if (std::string(name) == "limit") sub->add_option("--eps", rc.eps, "comma-separated decreasing eps list");
    }
    app.get_subcommand("simulate")->description("one trajectory as step,label,position rows");
    app.get_subcommand("green")->description("transition probabilities to listed target configurations");
    app.get_subcommand("dist")->description("joint distribution by Fredholm determinant, optional Monte Carlo");
    app.get_subcommand("kernel")->description("evaluate psi, phi, h, S, Sbar, Sbar_epi or K at points");
    app.get_subcommand("limit")->description("KPZ convergence table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }
    rc.command = app.get_subcommands().front()->get_name();

    try {
        json cfg = read_config(rc.config_path);
        if (rc.command == "simulate") run_simulate(rc, cfg);
        else if (rc.command == "green") run_green(rc, cfg);
        else if (rc.command == "dist") run_dist(rc, cfg);
        else if (rc.command == "kernel") run_kernel(rc, cfg);
        else run_limit(rc, cfg);
        write_sidecar(rc, cfg);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
