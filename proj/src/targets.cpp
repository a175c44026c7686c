#include "lresnet/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lresnet {

namespace {

Mat checked_cholesky(const Mat& S, const char* what) {
    if (S.rows() != S.cols() || S.rows() == 0) throw std::invalid_argument(std::string(what) + ": not square");
    if (!S.isApprox(S.transpose(), 1e-12)) throw std::invalid_argument(std::string(what) + ": not symmetric");
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + ": not positive definite");
    return llt.matrixL();
}

std::pair<double, double> eig_range(const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace

Cloud PotentialTarget::grad_batch(const Cloud& X) const {
    Cloud G(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) G.row(i) = grad(X.row(i).transpose()).transpose();
    return G;
}

GaussianTarget::GaussianTarget(Vec mean, Mat precision) : mean_(std::move(mean)), precision_(std::move(precision)) {
    if (precision_.rows() != mean_.size()) throw std::invalid_argument("gaussian_target: dimension mismatch");
    checked_cholesky(precision_, "gaussian_target precision");
    const Mat cov = precision_.inverse();
    chol_cov_ = Eigen::LLT<Mat>(0.5 * (cov + cov.transpose())).matrixL();
    std::tie(m_, M_) = eig_range(precision_);
    x_star_ = mean_;
    analytic_ = GaussianLaw{mean_, cov};
}

double GaussianTarget::value(const Vec& x) const {
    const Vec z = x - mean_;
    return 0.5 * z.dot(precision_ * z);
}

Vec GaussianTarget::grad(const Vec& x) const { return precision_ * (x - mean_); }

Cloud GaussianTarget::grad_batch(const Cloud& X) const {
    Cloud Z = X.rowwise() - mean_.transpose();
    return Z * precision_.transpose();
}

Cloud GaussianTarget::sample(std::size_t n, const CounterRng& rng) const {
    const Eigen::Index d = dim();
    Cloud S(n, d);
    Vec z(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal(0, i, j);
        S.row(i) = (mean_ + chol_cov_ * z).transpose();
    }
    return S;
}

GmmTarget::GmmTarget(Vec weights, std::vector<Vec> means, std::vector<Mat> covs)
    : weights_(std::move(weights)), means_(std::move(means)) {
    const std::size_t K = weights_.size();
    if (K == 0 || means_.size() != K || covs.size() != K)
        throw std::invalid_argument("gmm_target: weights, means, covs must have equal nonzero length");
    if ((weights_.array() <= 0.0).any()) throw std::invalid_argument("gmm_target: weights must be positive");
    if (std::abs(weights_.sum() - 1.0) > 1e-12) throw std::invalid_argument("gmm_target: weights must sum to 1");
    const Eigen::Index d = means_.front().size();
    log_norm_.resize(K);
    M_ = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (means_[k].size() != d || covs[k].rows() != d) throw std::invalid_argument("gmm_target: dimension mismatch");
        const Mat L = checked_cholesky(covs[k], "gmm_target covariance");
        chols_.push_back(L);
        const Mat P = covs[k].inverse();
        precisions_.push_back(0.5 * (P + P.transpose()));
        const double logdet = 2.0 * L.diagonal().array().log().sum();
        log_norm_(k) = std::log(weights_(k)) - 0.5 * (d * std::log(2.0 * std::numbers::pi) + logdet);
        M_ = std::max(M_, eig_range(precisions_.back()).second);
    }
    // Responsibility covariance term; exact bound when all covariances coincide.
    double spread = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l)
            spread = std::max(spread, (precisions_[k] * means_[k] - precisions_[l] * means_[l]).squaredNorm());
    M_ += 0.25 * spread;
    m_ = 0.0;

    // Minimizer of V: gradient descent from every component mean, keep the lowest.
    double best = std::numeric_limits<double>::infinity();
    const double step = 1.0 / M_;
    for (std::size_t k = 0; k < K; ++k) {
        Vec x = means_[k];
        for (int it = 0; it < 200000; ++it) {
            const Vec g = grad(x);
            if (g.norm() < 1e-12) break;
            x -= step * g;
        }
        const double v = value(x);
        if (v < best) {
            best = v;
            x_star_ = x;
        }
    }
}

void GmmTarget::log_components(const Vec& x, Vec& logp) const {
    logp.resize(weights_.size());
    for (Eigen::Index k = 0; k < weights_.size(); ++k) {
        const Vec z = x - means_[k];
        logp(k) = log_norm_(k) - 0.5 * z.dot(precisions_[k] * z);
    }
}

double GmmTarget::value(const Vec& x) const {
    Vec lp;
    log_components(x, lp);
    const double mx = lp.maxCoeff();
    return -(mx + std::log((lp.array() - mx).exp().sum()));
}

double GmmTarget::density(const Vec& x) const { return std::exp(-value(x)); }

Vec GmmTarget::grad(const Vec& x) const {
    Vec lp;
    log_components(x, lp);
    const double mx = lp.maxCoeff();
    const Eigen::ArrayXd r = (lp.array() - mx).exp();
    const double total = r.sum();
    Vec g = Vec::Zero(x.size());
    for (Eigen::Index k = 0; k < lp.size(); ++k) g += (r(k) / total) * (precisions_[k] * (x - means_[k]));
    return g;
}

Cloud GmmTarget::sample(std::size_t n, const CounterRng& rng) const {
    const Eigen::Index d = dim();
    Cloud S(n, d);
    Vec z(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(1, i, 0);
        std::size_t k = 0;
        double acc = weights_(0);
        while (u > acc && k + 1 < static_cast<std::size_t>(weights_.size())) acc += weights_(++k);
        for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal(0, i, j);
        S.row(i) = (means_[k] + chols_[k] * z).transpose();
    }
    return S;
}

std::unique_ptr<PotentialTarget> gaussian_target(const Vec& mean, const Mat& precision) {
    return std::make_unique<GaussianTarget>(mean, precision);
}

std::unique_ptr<PotentialTarget> gmm_target(const Vec& weights, const std::vector<Vec>& means,
                                            const std::vector<Mat>& covs) {
    return std::make_unique<GmmTarget>(weights, means, covs);
}

Vec alternating_mean(std::size_t d) {
    Vec m(d);
    for (std::size_t i = 1; i <= d; ++i) m(i - 1) = 2.0 * ((i % 2 == 1) ? 1.0 : -1.0) * static_cast<double>(i - 1);
    return m;
}

double ReferenceDistribution::sigma0_sq() const {
    switch (kind) {
        case Kind::StandardNormal: return 1.0;
        case Kind::Gaussian: return eig_range(cov).second;
        case Kind::PointMass: return 0.0;
    }
    return 0.0;
}

Cloud ReferenceDistribution::sample(std::size_t n, std::size_t d, const CounterRng& rng) const {
    Cloud S(n, d);
    if (kind == Kind::PointMass) {
        if (static_cast<std::size_t>(mean.size()) != d) throw std::invalid_argument("reference: point dimension mismatch");
        S.rowwise() = mean.transpose();
        return S;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) S(i, j) = rng.normal(0, i, j);
    if (kind == Kind::Gaussian) {
        if (static_cast<std::size_t>(mean.size()) != d || static_cast<std::size_t>(cov.rows()) != d)
            throw std::invalid_argument("reference: gaussian dimension mismatch");
        const Mat L = checked_cholesky(cov, "reference covariance");
        S = (S * L.transpose()).rowwise() + mean.transpose();
    }
    return S;
}

AssumptionReport verify_assumption(const PotentialTarget& target, std::size_t sample_count, double radius,
                                   std::uint64_t seed) {
    const std::size_t d = target.dim();
    const CounterRng rng(seed, kAssumption);
    auto draw = [&](std::uint32_t a, std::uint32_t i) {
        Vec v(d);
        for (std::size_t j = 0; j < d; ++j) v(j) = rng.normal(a, i, j);
        const double rad = radius * std::pow(rng.uniform(a + 2, i, 0), 1.0 / d);
        return Vec(target.minimizer() + rad * v / v.norm());
    };
    AssumptionReport rep;
    rep.m_hat = std::numeric_limits<double>::infinity();
    rep.M_hat = 0.0;
    const double m = target.m();
    const double M = target.M();
    const bool lin = m > 0.0 && M < std::sqrt(2.0) * m;
    rep.linear_bound = lin ? std::sqrt(M * M - m * m) : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < sample_count; ++i) {
        const Vec x = draw(0, i);
        const Vec y = draw(1, i);
        const Vec dx = x - y;
        const double n2 = dx.squaredNorm();
        if (n2 == 0.0) continue;
        const Vec dg = target.grad(x) - target.grad(y);
        rep.m_hat = std::min(rep.m_hat, dg.dot(dx) / n2);
        rep.M_hat = std::max(rep.M_hat, dg.norm() / std::sqrt(n2));
        const Vec z = x - target.minimizer();
        if (z.norm() > 0.0)
            rep.linear_ratio = std::max(rep.linear_ratio, (-target.grad(x) + m * z).norm() / z.norm());
    }
    const double tol = target.quadratic() ? 1e-6 : 1e-2;
    rep.pass = rep.m_hat >= m * (1.0 - tol) && rep.M_hat <= M * (1.0 + tol);
    rep.linear_ok = lin && rep.linear_ratio <= rep.linear_bound * (1.0 + tol);
    return rep;
}

}  // namespace lresnet
