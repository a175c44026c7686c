#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lresnet {

enum class Regime { First, Second, Boundary };

std::string regime_name(Regime r);

/// First regime: h < 2/(m+M); second: h > 2/(m+M); boundary: equality.
Regime regime_of(double h, double m, double M);

/// c = max(|1 - m h|, |1 - M h|); requires 0 < h < 2/M.
double contraction_c(double h, double m, double M);

struct BoundReport {
    Regime regime = Regime::First;
    double term_contraction = 0.0;
    double term_discretization = 0.0;
    double term_approximation = 0.0;
    double total = 0.0;
};

/// One branch of the W2 bound evaluated at (h, m, M) regardless of the regime
/// h falls into (Boundary evaluates the first-regime formula).
BoundReport w2_bound_branch(Regime branch, double h, double m, double M, std::size_t d, std::size_t K,
                            double w2_init, double eps);

/// Exact LMC: (1-mh)^K W0 + (7 sqrt2 / 6)(M/m) sqrt(hd), or the second-regime variant.
BoundReport w2_bound_lmc(double h, double m, double M, std::size_t d, std::size_t K, double w2_init);

/// Adds (1-(1-mh)^K)/m eps, resp. (1-(Mh-1)^K)/(2-Mh) h eps.
BoundReport w2_bound_perturbed(double h, double m, double M, std::size_t d, std::size_t K, double w2_init,
                               double eps);

enum class ProxyKind { ExactLmc, LinearGrowth, BoundedDrift };

struct ProxySequence {
    ProxyKind kind = ProxyKind::ExactLmc;
    /// sigma_k^2 for ExactLmc and LinearGrowth; sigma_k for BoundedDrift.
    std::vector<double> values;
    double h = 0.0, m = 0.0, M = 0.0, sigma0_sq = 0.0, G = 0.0, delta = 0.0, d = 0.0;
    std::vector<double> sup_norms;

    /// sigma_k^2 for every kind.
    double squared(std::size_t k) const;
};

/// sigma_k^2 = 2h (1 - c^k)/(1 - c) + sigma0^2 c^k, k = 0..K.
ProxySequence proxy_lmc(std::size_t K, double h, double m, double M, double sigma0_sq);
/// 2h / (1 - c).
double proxy_lmc_limit(double h, double m, double M);

/// sigma_k^2 = (2h/(1-(c+hG)) + h^2 delta^2)[1 - (c+hG)^k] + sigma0^2 (c+hG)^k.
ProxySequence proxy_linear_growth(std::size_t K, double h, double m, double M, double sigma0_sq, double G,
                                  double delta);
/// 2h/(1-(c+hG)) + h^2 delta^2 + sigma0^2.
double proxy_linear_growth_bound(double h, double m, double M, double sigma0_sq, double G, double delta);

/// sigma_prev + sqrt(d) h sup_norm + sqrt(2h).
double proxy_bounded_drift(double sigma_prev, double h, std::size_t d, double sup_norm);
/// Iterates proxy_bounded_drift from sigma0 over the given per-step sup-norms.
ProxySequence proxy_bounded_drift_sequence(double sigma0, double h, std::size_t d,
                                           const std::vector<double>& sup_norms);

struct TailCheck {
    double lhs = 0.0;  // (b r^2 + c) exp(-r^2 / a)
    double rhs = 0.0;  // eps^2 / 2
    bool holds() const { return lhs < rhs; }
};

/// r = sqrt(2) d sigma [ln(16 (g^2 (1+d) + M^2 d^2 sigma^2 (8d+10)) / eps^4)]^(1/2).
double radius_domain(double eps, double sigma, std::size_t d, double M, double grad_norm_at_center);
/// a = 2 d^2 sigma^2, b = (4+4d) M^2, c = 2 g^2 (2+2d) + 8 d^2 sigma^2 M^2.
TailCheck radius_domain_tail(double r, double eps, double sigma, std::size_t d, double M,
                             double grad_norm_at_center);

/// r = [2 d^2 sigma^2 ln((4(81 eps^2/d + 4 G^2 d^2 sigma^2) + 64 G^2 d^2 sigma^2) / eps^4)]^(1/2), G^2 = M^2 - m^2.
double radius_lipschitz(double eps, double sigma, std::size_t d, double m, double M);
/// (81 eps^2/d + 2 G^2 (2 d^2 sigma^2 + r^2)) exp(-r^2 / (2 d^2 sigma^2)) against eps^2/2.
TailCheck radius_lipschitz_tail(double r, double eps, double sigma, std::size_t d, double m, double M);
/// sqrt2 d sigma [ln(324 + 80 G^2 sigma^2)]^(1/2) + sqrt2 d sigma [ln(d^2 / eps^4)]^(1/2).
double radius_lipschitz_envelope(double eps, double sigma, std::size_t d, double m, double M);
/// sigma = 2/(m - G) + 81 h^2 / 2 + sigma0^2 used with radius_lipschitz.
double lipschitz_sigma(double h, double m, double M, double sigma0_sq);

/// delta = eps (1 + (2 pi d sqrt(2/m) + 4 d^2/m)[4 + 64/(m (m+M)^2) + m sigma0^2])^(-1/2), capped at m/2.
double delta_linear(double eps, std::size_t d, double m, double M, double sigma0_sq);
/// delta^2 (1 + 2 pi d sqrt(2/m) [B]^(1/2) + (4 d^2/m)[B]), B = 4 + 16 h^2/m + m sigma0^2.
double delta_linear_chain(double delta, std::size_t d, double m, double h, double sigma0_sq);

/// l(z) = Gamma(a+1) (2/z)^a I_a(z), a = (d-2)/2, by its power series; cosh(z) for d = 1.
double lyapunov_ell(double z, std::size_t d);
/// The same series without the d = 1 closed form.
double lyapunov_series(double z, std::size_t d);
/// E[exp(z v_1)] for v uniform on the unit sphere of R^d.
double lyapunov_mc(double z, std::size_t d, std::size_t samples, std::uint64_t seed);

/// |E[L(x + Z)] - e^{lambda^2 sigma^2 / 2} L(x)| / rhs with Z ~ N(0, sigma^2 I), L(y) = l(lambda ||y||).
double gaussian_smoothing_identity_check(const std::vector<double>& x, double lambda, double sigma_sq,
                                         std::size_t samples, std::uint64_t seed);

/// d^2 sigma^2.
double norm_proxy(double sigma_sq, std::size_t d);

/// (c(d) r M)^(d/2) 2^(d/4) eps^(-d/2).
double cover_count_ball(std::size_t d, double r, double M, double eps, double c_d = 1.0);

}  // namespace lresnet
