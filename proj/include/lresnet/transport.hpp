#pragma once

#include "lresnet/fcnn.hpp"

#include <string>
#include <vector>

namespace lresnet {

/// Row-major C_ij = ||x_i - y_j||^2 by direct differences (C_ii = 0 when X = Y).
Cloud cost_matrix(const Cloud& X, const Cloud& Y);

struct SinkhornParams {
    double lambda = 1e-2;
    std::size_t max_iters = 10000;
    double tol = 1e-9;  // l1 marginal violation
    bool anneal = true; // eta-scaling warm start
    double relax = 1.0; // over-relaxation weight in [1, 2) for the alternating phase
};

struct SinkhornResult {
    /// T_lambda = min <gamma, C> + 2 lambda KL(gamma | a x b), returned as the dual value <f,a> + <g,b>.
    double cost = 0.0;
    /// <gamma, C> of the recovered plan.
    double transport_cost = 0.0;
    Vec f, g;
    std::size_t iterations = 0;
    bool converged = false;
    double marginal_error = 0.0;
};

/// Log-domain Sinkhorn between uniform empirical measures, eta = 2 lambda.
SinkhornResult sinkhorn_cost(const Cloud& X, const Cloud& Y, const SinkhornParams& p = {});
/// T_lambda(X, X) with symmetric averaged updates (f = g).
SinkhornResult sinkhorn_self(const Cloud& X, const SinkhornParams& p = {});

/// Row marginal sums of the plan a_i b_j exp((f_i + g_j - C_ij) / eta).
Vec sinkhorn_plan_rows(const Cloud& C, const Vec& f, const Vec& g, double lambda);
Vec sinkhorn_plan_cols(const Cloud& C, const Vec& f, const Vec& g, double lambda);

struct DivergenceResult {
    double value = 0.0;
    double t_xy = 0.0, t_xx = 0.0, t_yy = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// S = T(X,Y) - (T(X,X) + T(Y,Y)) / 2.
DivergenceResult sinkhorn_divergence(const Cloud& X, const Cloud& Y, const SinkhornParams& p = {});
/// Same with T(Y,Y) supplied (fixed evaluation cloud).
DivergenceResult sinkhorn_divergence(const Cloud& X, const Cloud& Y, const SinkhornResult& t_yy,
                                     const SinkhornParams& p = {});

inline constexpr std::size_t kAssignmentMax = 1024;

/// Optimal assignment for a square cost matrix (shortest augmenting path).
/// Returns col_of_row.
std::vector<int> solve_assignment(const Cloud& C);

/// sqrt(mean of the optimal assignment cost) between equal-size clouds.
double exact_w2_empirical(const Cloud& X, const Cloud& Y);

/// Bures-Wasserstein distance between Gaussians.
double gaussian_w2(const Vec& mean1, const Mat& cov1, const Vec& mean2, const Mat& cov2);

struct DivergenceRow {
    double t = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n_runs = 0;
};

/// Columns t,s_lambda_mean,s_lambda_std,n_runs.
void write_divergence_csv(const std::vector<DivergenceRow>& rows, const std::string& path);

}  // namespace lresnet
