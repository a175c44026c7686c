#pragma once

#include "lresnet/fcnn.hpp"
#include "lresnet/rng.hpp"

#include <memory>
#include <optional>
#include <string>

namespace lresnet {

struct GaussianLaw {
    Vec mean;
    Mat cov;
};

/// Potential V = -log density (up to a constant) with gradient and
/// the constants m (strong convexity, 0 if none) and M (gradient Lipschitz).
class PotentialTarget {
public:
    virtual ~PotentialTarget() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    virtual Vec grad(const Vec& x) const = 0;
    /// Row-wise gradients.
    virtual Cloud grad_batch(const Cloud& X) const;
    /// Exact draws from the target law, rows = samples.
    virtual Cloud sample(std::size_t n, const CounterRng& rng) const = 0;
    virtual std::string kind() const = 0;
    virtual bool quadratic() const { return false; }

    double m() const { return m_; }
    double M() const { return M_; }
    const Vec& minimizer() const { return x_star_; }
    /// Exact mean/covariance of the target law when available.
    const std::optional<GaussianLaw>& analytic() const { return analytic_; }

protected:
    double m_ = 0.0;
    double M_ = 0.0;
    Vec x_star_;
    std::optional<GaussianLaw> analytic_;
};

class GaussianTarget final : public PotentialTarget {
public:
    GaussianTarget(Vec mean, Mat precision);

    std::size_t dim() const override { return mean_.size(); }
    double value(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Cloud grad_batch(const Cloud& X) const override;
    Cloud sample(std::size_t n, const CounterRng& rng) const override;
    std::string kind() const override { return "gaussian"; }
    bool quadratic() const override { return true; }

    const Vec& mean() const { return mean_; }
    const Mat& precision() const { return precision_; }

private:
    Vec mean_;
    Mat precision_;
    Mat chol_cov_;  // lower factor of the covariance
};

/// Gaussian mixture; m = 0 (not strongly convex), M = max_k lambda_max(P_k).
class GmmTarget final : public PotentialTarget {
public:
    GmmTarget(Vec weights, std::vector<Vec> means, std::vector<Mat> covs);

    std::size_t dim() const override { return means_.front().size(); }
    double value(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Cloud sample(std::size_t n, const CounterRng& rng) const override;
    std::string kind() const override { return "gmm"; }

    /// Normalized density.
    double density(const Vec& x) const;

private:
    void log_components(const Vec& x, Vec& logp) const;

    Vec weights_;
    std::vector<Vec> means_;
    std::vector<Mat> precisions_;
    std::vector<Mat> chols_;
    Vec log_norm_;  // log w_k - log normalizer of component k
};

std::unique_ptr<PotentialTarget> gaussian_target(const Vec& mean, const Mat& precision);
std::unique_ptr<PotentialTarget> gmm_target(const Vec& weights, const std::vector<Vec>& means,
                                            const std::vector<Mat>& covs);

/// Mean of the d=10 experiment: 2 (-1)^(i-1) (i-1), i = 1..d.
Vec alternating_mean(std::size_t d);

struct ReferenceDistribution {
    enum class Kind { StandardNormal, Gaussian, PointMass };
    Kind kind = Kind::StandardNormal;
    Vec mean;  // Gaussian mean or point-mass location
    Mat cov;   // Gaussian covariance

    /// Sub-Gaussian variance proxy: 1 for standard normal, lambda_max(cov), 0 for a point.
    double sigma0_sq() const;
    Cloud sample(std::size_t n, std::size_t d, const CounterRng& rng) const;
};

struct AssumptionReport {
    double m_hat = 0.0;
    double M_hat = 0.0;
    bool pass = false;
    double linear_ratio = 0.0;    // max ||-grad V(x) + m (x - x*)|| / ||x - x*||
    double linear_bound = 0.0;    // sqrt(M^2 - m^2), NaN if M >= sqrt(2) m
    bool linear_ok = false;
};

/// Pairwise difference quotients over uniform pairs in the ball of given radius
/// around the minimizer. tol = 1e-6 for quadratics, 1e-2 otherwise.
AssumptionReport verify_assumption(const PotentialTarget& target, std::size_t sample_count, double radius,
                                   std::uint64_t seed = 7);

}  // namespace lresnet
