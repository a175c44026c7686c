#include "lresnet/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace lresnet {

Cloud cost_matrix(const Cloud& X, const Cloud& Y) {
    if (X.cols() != Y.cols()) throw std::invalid_argument("cost_matrix: dimension mismatch");
    Cloud C(X.rows(), Y.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < Y.rows(); ++j) C(i, j) = (X.row(i) - Y.row(j)).squaredNorm();
    return C;
}

namespace {

void check_inputs(const Cloud& X, const Cloud& Y, const SinkhornParams& p) {
    if (!(p.lambda > 0.0)) throw std::invalid_argument("sinkhorn: lambda must be positive");
    if (X.rows() == 0 || Y.rows() == 0) throw std::invalid_argument("sinkhorn: empty sample");
    if (X.cols() != Y.cols()) throw std::invalid_argument("sinkhorn: dimension mismatch");
}

// exp(-600) is already below any tolerance; the floor keeps exp out of subnormals.
constexpr double kExpFloor = -600.0;

// out_i = -eta log sum_j w_j exp((pot_j - C_ij) / eta), w uniform.
// Returns the l1 violation sum_i |w_i' exp((cur_i - out_i)/eta) - w_i'| of the plan before the update.
double softmin_rows(const Cloud& C, const Vec& pot, double eta, const Vec& cur, Vec& out,
                    Eigen::ArrayXd& buf) {
    const Eigen::Index n = C.rows();
    const double log_w = -std::log(static_cast<double>(C.cols()));
    const double a = 1.0 / static_cast<double>(n);
    const double inv = 1.0 / eta;
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        buf = (pot.array() - C.row(i).transpose().array()) * inv;
        const double mx = buf.maxCoeff();
        const double s = (buf - mx).max(kExpFloor).exp().sum();
        out(i) = -eta * (mx + std::log(s) + log_w);
        err += a * std::abs(std::expm1((cur(i) - out(i)) * inv));
    }
    return err;
}

double plan_dot_cost(const Cloud& C, const Vec& f, const Vec& g, double eta) {
    const double w = 1.0 / (static_cast<double>(C.rows()) * static_cast<double>(C.cols()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
        const Eigen::ArrayXd c = C.row(i).transpose().array();
        acc += (((f(i) + g.array() - c) / eta).max(kExpFloor).exp() * c).sum();
    }
    return w * acc;
}

std::vector<double> schedule(double c_max, double eta, bool anneal) {
    std::vector<double> out;
    if (anneal)
        for (double e = std::max(c_max, eta); e > eta; e *= 0.5) out.push_back(e);
    out.push_back(eta);
    return out;
}

constexpr std::size_t kStageIters = 10;
constexpr double kStageTol = 1e-3;
constexpr std::size_t kStallWindow = 10;
constexpr double kStallRatio = 0.5;

}  // namespace

SinkhornResult sinkhorn_cost(const Cloud& X, const Cloud& Y, const SinkhornParams& p) {
    check_inputs(X, Y, p);
    const double eta = 2.0 * p.lambda;
    const Cloud C = cost_matrix(X, Y);
    const Cloud Ct = C.transpose();
    const Eigen::Index n = C.rows(), m = C.cols();
    Vec f = Vec::Zero(n), g = Vec::Zero(m), fn(n), gn(m);
    Eigen::ArrayXd buf_r(m), buf_c(n);
    SinkhornResult res;
    res.marginal_error = std::numeric_limits<double>::infinity();
    const auto stages = schedule(C.maxCoeff(), eta, p.anneal);
    // Averaged simultaneous updates first (they keep symmetric problems symmetric);
    // at the final eta switch to alternating relaxed updates once they stall.
    bool alternate = false;
    std::vector<double> history;
    for (std::size_t s = 0; s < stages.size() && res.iterations < p.max_iters; ++s) {
        const bool last = s + 1 == stages.size();
        const double e = stages[s];
        for (std::size_t it = 0; res.iterations < p.max_iters && (last || it < kStageIters); ++it) {
            // Row marginal error of the plan (f, g) at the current eta.
            const double err = softmin_rows(C, g, e, f, fn, buf_r);
            if (last) {
                res.marginal_error = err;
                if (err <= p.tol) {
                    res.converged = true;
                    break;
                }
                history.push_back(err);
                const std::size_t k = history.size();
                if (!alternate && k > kStallWindow * 2 && err > kStallRatio * history[k - 1 - kStallWindow])
                    alternate = true;
            } else if (err <= kStageTol) {
                break;
            }
            if (alternate) {
                f += p.relax * (fn - f);
                softmin_rows(Ct, f, e, g, gn, buf_c);
                g += p.relax * (gn - g);
            } else {
                softmin_rows(Ct, f, e, g, gn, buf_c);
                f = 0.5 * (f + fn);
                g = 0.5 * (g + gn);
            }
            ++res.iterations;
        }
    }
    res.f = f;
    res.g = g;
    res.cost = f.mean() + g.mean();
    res.transport_cost = plan_dot_cost(C, f, g, eta);
    return res;
}

SinkhornResult sinkhorn_self(const Cloud& X, const SinkhornParams& p) {
    check_inputs(X, X, p);
    const double eta = 2.0 * p.lambda;
    const Cloud C = cost_matrix(X, X);
    const Eigen::Index n = C.rows();
    Vec f = Vec::Zero(n), fn(n);
    Eigen::ArrayXd buf(n);
    SinkhornResult res;
    res.marginal_error = std::numeric_limits<double>::infinity();
    const auto stages = schedule(C.maxCoeff(), eta, p.anneal);
    for (std::size_t s = 0; s < stages.size() && res.iterations < p.max_iters; ++s) {
        const bool last = s + 1 == stages.size();
        const double e = stages[s];
        for (std::size_t it = 0; res.iterations < p.max_iters && (last || it < kStageIters); ++it) {
            const double err = softmin_rows(C, f, e, f, fn, buf);
            if (last && err <= p.tol) {
                res.marginal_error = err;
                res.converged = true;
                break;
            }
            res.marginal_error = err;
            if (!last && err <= kStageTol) break;
            f = 0.5 * (f + fn);
            ++res.iterations;
        }
    }
    res.f = f;
    res.g = f;
    res.cost = 2.0 * f.mean();
    res.transport_cost = plan_dot_cost(C, f, f, eta);
    return res;
}

Vec sinkhorn_plan_rows(const Cloud& C, const Vec& f, const Vec& g, double lambda) {
    const double eta = 2.0 * lambda;
    const double w = 1.0 / (static_cast<double>(C.rows()) * static_cast<double>(C.cols()));
    Vec r(C.rows());
    for (Eigen::Index i = 0; i < C.rows(); ++i)
        r(i) = w * ((f(i) + g.array() - C.row(i).transpose().array()) / eta).max(kExpFloor).exp().sum();
    return r;
}

Vec sinkhorn_plan_cols(const Cloud& C, const Vec& f, const Vec& g, double lambda) {
    const Cloud Ct = C.transpose();
    return sinkhorn_plan_rows(Ct, g, f, lambda);
}

DivergenceResult sinkhorn_divergence(const Cloud& X, const Cloud& Y, const SinkhornResult& t_yy,
                                     const SinkhornParams& p) {
    const SinkhornResult xy = sinkhorn_cost(X, Y, p);
    const SinkhornResult xx = sinkhorn_self(X, p);
    DivergenceResult d;
    d.t_xy = xy.cost;
    d.t_xx = xx.cost;
    d.t_yy = t_yy.cost;
    d.value = d.t_xy - 0.5 * (d.t_xx + d.t_yy);
    d.converged = xy.converged && xx.converged && t_yy.converged;
    d.iterations = xy.iterations + xx.iterations;
    return d;
}

DivergenceResult sinkhorn_divergence(const Cloud& X, const Cloud& Y, const SinkhornParams& p) {
    const SinkhornResult yy = sinkhorn_self(Y, p);
    DivergenceResult d = sinkhorn_divergence(X, Y, yy, p);
    d.iterations += yy.iterations;
    return d;
}

std::vector<int> solve_assignment(const Cloud& C) {
    const int n = static_cast<int>(C.rows());
    if (C.cols() != C.rows()) throw std::invalid_argument("solve_assignment: cost matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual source.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = C(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of_row(n);
    for (int j = 1; j <= n; ++j) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

double exact_w2_empirical(const Cloud& X, const Cloud& Y) {
    if (X.rows() != Y.rows()) throw std::invalid_argument("exact_w2_empirical: sample sizes differ");
    if (X.cols() != Y.cols()) throw std::invalid_argument("exact_w2_empirical: dimension mismatch");
    if (X.rows() == 0) throw std::invalid_argument("exact_w2_empirical: empty sample");
    if (static_cast<std::size_t>(X.rows()) > kAssignmentMax)
        throw std::invalid_argument("exact_w2_empirical: n exceeds 1024");
    const Cloud C = cost_matrix(X, Y);
    const auto a = solve_assignment(C);
    double total = 0.0;
    for (Eigen::Index i = 0; i < C.rows(); ++i) total += C(i, a[i]);
    return std::sqrt(total / static_cast<double>(C.rows()));
}

namespace {

Mat spd_sqrt(const Mat& S, const char* what) {
    if (S.rows() != S.cols()) throw std::invalid_argument(std::string(what) + ": not square");
    if (!S.isApprox(S.transpose(), 1e-12)) throw std::invalid_argument(std::string(what) + ": not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    if (es.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument(std::string(what) + ": not positive definite");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double gaussian_w2(const Vec& mean1, const Mat& cov1, const Vec& mean2, const Mat& cov2) {
    if (mean1.size() != mean2.size() || cov1.rows() != mean1.size() || cov2.rows() != mean2.size())
        throw std::invalid_argument("gaussian_w2: dimension mismatch");
    spd_sqrt(cov1, "gaussian_w2 cov1");
    const Mat r2 = spd_sqrt(cov2, "gaussian_w2 cov2");
    Mat mid = r2 * cov1 * r2;
    mid = 0.5 * (mid + mid.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(mid);
    const double cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double w2sq = (mean1 - mean2).squaredNorm() + cov1.trace() + cov2.trace() - 2.0 * cross;
    return std::sqrt(std::max(0.0, w2sq));
}

void write_divergence_csv(const std::vector<DivergenceRow>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "t,s_lambda_mean,s_lambda_std,n_runs\n";
    for (const auto& r : rows) os << r.t << ',' << r.mean << ',' << r.stddev << ',' << r.n_runs << '\n';
}

}  // namespace lresnet
