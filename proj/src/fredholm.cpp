#include "tasep/fredholm.hpp"

#include <algorithm>
#include <cmath>

namespace tasep {

namespace {

void check_pair(int ni, int nj, const Config& x0) {
    int N = static_cast<int>(x0.size());
    if (ni < 1 || ni > N || nj < 1 || nj > N)
        throw LabelOutOfRange("kernel labels must lie in 1.." + std::to_string(N));
}

double q_term(int ni, long x, int nj, long y) {
    return ni < nj ? -Q_pow(nj - ni, x, y) : 0.0;
}

// (R Q^{-n})(x1, x)
double rq_inv(long x1, long x, int n, const Kernels& kr) {
    double acc = 0.0;
    for (long u = x - n; u <= x1; ++u) acc += kr.R(x1 - u) * Q_pow(-n, u, x);
    return acc;
}

}  // namespace

double kernel_Kt(int ni, long x, int nj, long y, const Config& x0, const SKernels& sk,
                 long center) {
    check_pair(ni, nj, x0);
    const long lo = x0[nj - 1] + 1, hi = x + ni;
    double acc = 0.0;
    if (lo <= hi) {
        constexpr int kQuiet = 8, kMaxSide = 512;
        center = std::clamp(center, lo, hi);
        double runmax = 0.0;
        auto term = [&](long v) {
            double a = sk.kernel(ni, x - v, SVariant::S);
            double t = a == 0.0 ? 0.0 : a * sk.sbar_epi(nj, v, y, x0);
            runmax = std::max(runmax, std::abs(t));
            return t;
        };
        acc += term(center);
        for (int dir : {1, -1}) {
            int quiet = 0, count = 0;
            for (long v = center + dir; v >= lo && v <= hi; v += dir) {
                double t = term(v);
                acc += t;
                if (runmax > 0 && std::abs(t) < 1e-15 * runmax) {
                    if (++quiet >= kQuiet) break;
                } else {
                    quiet = 0;
                }
                if (++count >= kMaxSide)
                    throw TruncationFailure("kernel_Kt: v-sum tail not decaying within 512 terms");
            }
        }
    }
    return q_term(ni, x, nj, y) + acc;
}

double kernel_Kt(int ni, long x, int nj, long y, const Config& x0, const ParamSchedule& s,
                 double tol) {
    check_pair(ni, nj, x0);
    SKernels sk(s, tol);
    return kernel_Kt(ni, x, nj, y, x0, sk, (x0[nj - 1] + 1 + x + ni) / 2);
}

double kernel_biortho(int ni, long x, int nj, long y, const Config& x0, const Kernels& kr) {
    check_pair(ni, nj, x0);
    double acc = 0.0;
    for (int k = 1; k <= nj; ++k)
        acc += psi_operator(ni, ni - k, x, x0, kr) * phi(nj, nj - k, y, x0, kr);
    return q_term(ni, x, nj, y) + acc;
}

double qbar_rinv(int m, long z, long x, const Kernels& kr) {
    if (m < 1) throw OutOfRange("qbar_rinv needs m >= 1");
    // Qbar(z, y) 2^{-y} is a polynomial in y of degree m-1
    std::vector<double> v;
    for (int i = 0; i < m; ++i) v.push_back(std::ldexp(Q_bar(m, z, x + i), static_cast<int>(-x - i)));
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        acc += v[0] * kr.finv_taylor(j);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
        v.pop_back();
    }
    return std::ldexp(acc, static_cast<int>(x));
}

double kernel_operator(int ni, long x, int nj, long y, const Config& x0, const Kernels& kr) {
    check_pair(ni, nj, x0);
    double acc = 0.0;
    for (long u = x0[nj - 1] + 1; u <= x + ni; ++u) {
        double a = rq_inv(x, u, ni, kr);
        if (a == 0.0) continue;
        for (const auto& e : hit_dp(u, x0, nj).entries)
            acc += a * e.prob * qbar_rinv(nj - e.m, e.z, y, kr);
    }
    return q_term(ni, x, nj, y) + acc;
}

void validate_query(const JointQuery& q) {
    check_ordered(q.x0, "x0");
    validate_schedule(q.s);
    if (q.labels.empty()) throw ValidationError("query needs at least one label");
    if (q.labels.size() != q.thresholds.size())
        throw ValidationError("labels and thresholds differ in length");
    for (std::size_t j = 0; j < q.labels.size(); ++j) {
        if (q.labels[j] < 1 || q.labels[j] > static_cast<int>(q.x0.size()))
            throw LabelOutOfRange("labels/" + std::to_string(j) + " outside 1..N");
        if (j > 0 && q.labels[j] <= q.labels[j - 1])
            throw ValidationError("labels must be strictly increasing");
    }
}

JointQuery query_from_json(const nlohmann::json& j) {
    JointQuery q;
    q.s = schedule_from_json(j);
    q.x0 = x0_from_json(j);
    for (const char* key : {"labels", "thresholds"}) {
        if (!j.contains(key) || !j.at(key).is_array())
            throw ValidationError(std::string("config/") + key + ": expected array");
        const auto& a = j.at(key);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number_integer())
                throw ValidationError(std::string("config/") + key + "/" + std::to_string(i) +
                                      ": expected integer");
            if (key[0] == 'l')
                q.labels.push_back(a[i].get<int>());
            else
                q.thresholds.push_back(a[i].get<long>());
        }
    }
    validate_query(q);
    return q;
}

nlohmann::json query_to_json(const JointQuery& q) {
    nlohmann::json j = schedule_to_json(q.s);
    j["x0"] = q.x0;
    j["labels"] = q.labels;
    j["thresholds"] = q.thresholds;
    return j;
}

FiniteSection build_section(const JointQuery& q, long W, const SKernels& sk) {
    validate_query(q);
    const std::size_t M = q.labels.size();
    FiniteSection sec;
    sec.W = W;
    for (std::size_t j = 0; j < M; ++j)
        for (long x = q.thresholds[j] - W; x <= q.thresholds[j]; ++x)
            sec.index.push_back({q.labels[j], x});
    const long dim = static_cast<long>(sec.index.size());
    sec.matrix = Eigen::MatrixXd::Zero(dim, dim);

    // largest v any row can reach
    long v_hi = q.thresholds[0] + q.labels[0];
    for (std::size_t j = 0; j < M; ++j) v_hi = std::max(v_hi, q.thresholds[j] + q.labels[j]);

    // epi[j][v - v_lo][y] = sum over hits of P 2^{v-z} Sbar coefficient
    std::vector<std::vector<std::vector<double>>> epi(M);
    std::vector<long> v_lo(M);
    for (std::size_t j = 0; j < M; ++j) {
        int nj = q.labels[j];
        v_lo[j] = q.x0[nj - 1] + 1;
        for (long v = v_lo[j]; v <= v_hi; ++v) {
            std::vector<double> row(static_cast<std::size_t>(W + 1), 0.0);
            for (const auto& e : hit_dp(v, q.x0, nj).entries) {
                double w = std::ldexp(e.prob, static_cast<int>(v - e.z));
                for (long c = 0; c <= W; ++c) {
                    long y = q.thresholds[j] - W + c;
                    row[static_cast<std::size_t>(c)] += w * sk.coef(nj - e.m, y - e.z, SVariant::Sbar);
                }
            }
            epi[j].push_back(std::move(row));
        }
    }

    for (long r = 0; r < dim; ++r) {
        const auto [ni, x] = sec.index[static_cast<std::size_t>(r)];
        for (std::size_t j = 0; j < M; ++j) {
            int nj = q.labels[j];
            long col0 = static_cast<long>(j) * (W + 1);
            for (long v = v_lo[j]; v <= x + ni; ++v) {
                double a = sk.coef(ni, x - v, SVariant::S);
                if (a == 0.0) continue;
                const auto& row = epi[j][static_cast<std::size_t>(v - v_lo[j])];
                for (long c = 0; c <= W; ++c) sec.matrix(r, col0 + c) += a * row[static_cast<std::size_t>(c)];
            }
            if (ni < nj)
                for (long c = 0; c <= W; ++c) {
                    long y = q.thresholds[j] - W + c;
                    sec.matrix(r, col0 + c) -= Q_pow_scaled(nj - ni, x, y);
                }
        }
    }
    return sec;
}

FredholmResult fredholm_det(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ValidationError("fredholm_det needs a square matrix");
    if (!m.allFinite()) throw ValidationError("fredholm_det: non-finite entry");
    FredholmResult res;
    if (m.rows() == 0) return res;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.rows(), m.cols()) - m;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    res.det = lu.determinant();
    res.rcond = lu.rcond();
    res.ill_conditioned = !(res.rcond * 1e12 >= 1.0);
    return res;
}

JointResult joint_dist_ex(const JointQuery& q, double tol, long w_start, long w_max) {
    validate_query(q);
    SKernels sk(q.s);
    JointResult out;
    double prev = 0.0;
    bool have_prev = false;
    for (long W = w_start; W <= w_max; W *= 2) {
        FredholmResult fr = fredholm_det(build_section(q, W, sk).matrix);
        out.ill_conditioned = fr.ill_conditioned;
        if (have_prev) {
            out.last_change = std::abs(fr.det - prev);
            if (out.last_change < tol) {
                out.raw = fr.det;
                out.W = W;
                if (fr.det < -tol || fr.det > 1.0 + tol)
                    throw NumericalError("joint_dist: determinant " + std::to_string(fr.det) +
                                         " outside [0,1]");
                out.value = std::clamp(fr.det, 0.0, 1.0);
                return out;
            }
        }
        prev = fr.det;
        have_prev = true;
    }
    throw NoConvergence("joint_dist: window width exceeded " + std::to_string(w_max));
}

double joint_dist(const JointQuery& q, double tol) { return joint_dist_ex(q, tol).value; }

}  // namespace tasep
