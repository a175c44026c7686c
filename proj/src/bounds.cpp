#include "lresnet/bounds.hpp"

#include "lresnet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lresnet {

namespace {

constexpr double kDisc = 7.0 * std::numbers::sqrt2 / 6.0;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_step(double h, double m, double M) {
    require(m > 0.0, "precondition violated: m > 0");
    require(M >= m, "precondition violated: M >= m");
    require(h > 0.0 && h < 2.0 / M, "precondition violated: 0 < h < 2/M");
}

}  // namespace

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::First: return "first";
        case Regime::Second: return "second";
        case Regime::Boundary: return "boundary";
    }
    return "unknown";
}

Regime regime_of(double h, double m, double M) {
    const double edge = 2.0 / (m + M);
    if (h == edge) return Regime::Boundary;
    return h < edge ? Regime::First : Regime::Second;
}

double contraction_c(double h, double m, double M) {
    check_step(h, m, M);
    return std::max(std::abs(1.0 - m * h), std::abs(1.0 - M * h));
}

BoundReport w2_bound_branch(Regime branch, double h, double m, double M, std::size_t d, std::size_t K,
                            double w2_init, double eps) {
    check_step(h, m, M);
    require(w2_init >= 0.0, "precondition violated: w2_init >= 0");
    require(eps >= 0.0, "precondition violated: eps >= 0");
    BoundReport rep;
    rep.regime = regime_of(h, m, M);
    const double Kd = static_cast<double>(K);
    const double root = std::sqrt(h * static_cast<double>(d));
    if (branch == Regime::Second) {
        const double q = std::pow(M * h - 1.0, Kd);
        rep.term_contraction = q * w2_init;
        rep.term_discretization = kDisc * (M * h / (2.0 - M * h)) * root;
        rep.term_approximation = (1.0 - q) / (2.0 - M * h) * h * eps;
    } else {
        const double q = std::pow(1.0 - m * h, Kd);
        rep.term_contraction = q * w2_init;
        rep.term_discretization = kDisc * (M / m) * root;
        rep.term_approximation = (1.0 - q) / m * eps;
    }
    rep.total = rep.term_contraction + rep.term_discretization + rep.term_approximation;
    return rep;
}

BoundReport w2_bound_perturbed(double h, double m, double M, std::size_t d, std::size_t K, double w2_init,
                               double eps) {
    check_step(h, m, M);
    const Regime r = regime_of(h, m, M);
    return w2_bound_branch(r == Regime::Second ? Regime::Second : Regime::First, h, m, M, d, K, w2_init, eps);
}

BoundReport w2_bound_lmc(double h, double m, double M, std::size_t d, std::size_t K, double w2_init) {
    return w2_bound_perturbed(h, m, M, d, K, w2_init, 0.0);
}

double ProxySequence::squared(std::size_t k) const {
    const double v = values.at(k);
    return kind == ProxyKind::BoundedDrift ? v * v : v;
}

ProxySequence proxy_lmc(std::size_t K, double h, double m, double M, double sigma0_sq) {
    require(sigma0_sq >= 0.0, "precondition violated: sigma0_sq >= 0");
    const double c = contraction_c(h, m, M);
    ProxySequence seq;
    seq.kind = ProxyKind::ExactLmc;
    seq.h = h;
    seq.m = m;
    seq.M = M;
    seq.sigma0_sq = sigma0_sq;
    seq.values.reserve(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const double ck = std::pow(c, static_cast<double>(k));
        seq.values.push_back(2.0 * h * (1.0 - ck) / (1.0 - c) + sigma0_sq * ck);
    }
    return seq;
}

double proxy_lmc_limit(double h, double m, double M) { return 2.0 * h / (1.0 - contraction_c(h, m, M)); }

ProxySequence proxy_linear_growth(std::size_t K, double h, double m, double M, double sigma0_sq, double G,
                                  double delta) {
    require(G >= 0.0 && G < m, "precondition violated: 0 <= G < m");
    require(delta >= 0.0, "precondition violated: delta >= 0");
    require(h < 2.0 / (m + M), "precondition violated: h < 2/(m+M)");
    const double c = contraction_c(h, m, M);
    const double q = c + h * G;
    const double stat = 2.0 * h / (1.0 - q) + h * h * delta * delta;
    ProxySequence seq;
    seq.kind = ProxyKind::LinearGrowth;
    seq.h = h;
    seq.m = m;
    seq.M = M;
    seq.sigma0_sq = sigma0_sq;
    seq.G = G;
    seq.delta = delta;
    for (std::size_t k = 0; k <= K; ++k) {
        const double qk = std::pow(q, static_cast<double>(k));
        seq.values.push_back(stat * (1.0 - qk) + sigma0_sq * qk);
    }
    return seq;
}

double proxy_linear_growth_bound(double h, double m, double M, double sigma0_sq, double G, double delta) {
    const double q = contraction_c(h, m, M) + h * G;
    return 2.0 * h / (1.0 - q) + h * h * delta * delta + sigma0_sq;
}

double proxy_bounded_drift(double sigma_prev, double h, std::size_t d, double sup_norm) {
    return sigma_prev + std::sqrt(static_cast<double>(d)) * h * sup_norm + std::sqrt(2.0 * h);
}

ProxySequence proxy_bounded_drift_sequence(double sigma0, double h, std::size_t d,
                                           const std::vector<double>& sup_norms) {
    ProxySequence seq;
    seq.kind = ProxyKind::BoundedDrift;
    seq.h = h;
    seq.d = static_cast<double>(d);
    seq.sigma0_sq = sigma0 * sigma0;
    seq.sup_norms = sup_norms;
    seq.values.push_back(sigma0);
    for (double s : sup_norms) seq.values.push_back(proxy_bounded_drift(seq.values.back(), h, d, s));
    return seq;
}

double radius_domain(double eps, double sigma, std::size_t d, double M, double g) {
    require(eps > 0.0 && eps < 1.0, "precondition violated: 0 < eps < 1");
    require(sigma > 0.0 && M > 0.0 && d > 0 && g >= 0.0, "precondition violated: positive inputs");
    const double dd = static_cast<double>(d);
    const double inner = 16.0 * (g * g * (1.0 + dd) + M * M * dd * dd * sigma * sigma * (8.0 * dd + 10.0));
    return std::numbers::sqrt2 * dd * sigma * std::sqrt(std::log(inner / std::pow(eps, 4)));
}

TailCheck radius_domain_tail(double r, double eps, double sigma, std::size_t d, double M, double g) {
    const double dd = static_cast<double>(d);
    const double a = 2.0 * dd * dd * sigma * sigma;
    const double b = (4.0 + 4.0 * dd) * M * M;
    const double c = 2.0 * g * g * (2.0 + 2.0 * dd) + 8.0 * dd * dd * sigma * sigma * M * M;
    return {(b * r * r + c) * std::exp(-r * r / a), 0.5 * eps * eps};
}

double radius_lipschitz(double eps, double sigma, std::size_t d, double m, double M) {
    require(eps > 0.0 && eps < 1.0, "precondition violated: 0 < eps < 1");
    require(m > 0.0 && m <= M, "precondition violated: 0 < m <= M");
    require(M < std::numbers::sqrt2 * m, "precondition violated: M < sqrt(2) m");
    require(sigma > 0.0 && d > 0, "precondition violated: positive inputs");
    const double dd = static_cast<double>(d);
    const double G2 = M * M - m * m;
    const double s2 = dd * dd * sigma * sigma;
    const double x = (4.0 * (81.0 * eps * eps / dd + 4.0 * G2 * s2) + 64.0 * G2 * s2) / std::pow(eps, 4);
    return std::sqrt(2.0 * s2 * std::log(x));
}

TailCheck radius_lipschitz_tail(double r, double eps, double sigma, std::size_t d, double m, double M) {
    const double dd = static_cast<double>(d);
    const double G2 = M * M - m * m;
    const double s2 = dd * dd * sigma * sigma;
    return {(81.0 * eps * eps / dd + 2.0 * G2 * (2.0 * s2 + r * r)) * std::exp(-r * r / (2.0 * s2)),
            0.5 * eps * eps};
}

double radius_lipschitz_envelope(double eps, double sigma, std::size_t d, double m, double M) {
    const double dd = static_cast<double>(d);
    const double G2 = M * M - m * m;
    const double pre = std::numbers::sqrt2 * dd * sigma;
    return pre * std::sqrt(std::log(324.0 + 80.0 * G2 * sigma * sigma)) +
           pre * std::sqrt(std::log(dd * dd / std::pow(eps, 4)));
}

double lipschitz_sigma(double h, double m, double M, double sigma0_sq) {
    const double G = std::sqrt(M * M - m * m);
    require(G < m, "precondition violated: M < sqrt(2) m");
    return 2.0 / (m - G) + 81.0 * h * h / 2.0 + sigma0_sq;
}

double delta_linear(double eps, std::size_t d, double m, double M, double sigma0_sq) {
    require(eps > 0.0, "precondition violated: eps > 0");
    require(m > 0.0 && M >= m, "precondition violated: 0 < m <= M");
    const double dd = static_cast<double>(d);
    const double lead = 2.0 * std::numbers::pi * dd * std::sqrt(2.0 / m) + 4.0 * dd * dd / m;
    const double bracket = 4.0 + 64.0 / (m * (m + M) * (m + M)) + m * sigma0_sq;
    return std::min(eps / std::sqrt(1.0 + lead * bracket), 0.5 * m);
}

double delta_linear_chain(double delta, std::size_t d, double m, double h, double sigma0_sq) {
    const double dd = static_cast<double>(d);
    const double B = 4.0 + 16.0 * h * h / m + m * sigma0_sq;
    return delta * delta *
           (1.0 + 2.0 * std::numbers::pi * dd * std::sqrt(2.0 / m) * std::sqrt(B) + 4.0 * dd * dd / m * B);
}

double lyapunov_series(double z, std::size_t d) {
    require(z >= 0.0, "precondition violated: z >= 0");
    require(d > 0, "precondition violated: d >= 1");
    const double alpha = (static_cast<double>(d) - 2.0) / 2.0;
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
        term *= q / (k * (k + alpha));
        sum += term;
        if (term < 1e-14 * sum && k > q) break;
    }
    return sum;
}

double lyapunov_ell(double z, std::size_t d) {
    if (d == 1) {
        require(z >= 0.0, "precondition violated: z >= 0");
        return std::cosh(z);
    }
    return lyapunov_series(z, d);
}

double lyapunov_mc(double z, std::size_t d, std::size_t samples, std::uint64_t seed) {
    const CounterRng rng(seed, kUser);
    double acc = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double n2 = 0.0, v1 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double g = rng.normal(0, i, j);
            if (j == 0) v1 = g;
            n2 += g * g;
        }
        acc += std::exp(z * v1 / std::sqrt(n2));
    }
    return acc / static_cast<double>(samples);
}

double gaussian_smoothing_identity_check(const std::vector<double>& x, double lambda, double sigma_sq,
                                         std::size_t samples, std::uint64_t seed) {
    const std::size_t d = x.size();
    require(d > 0, "precondition violated: nonempty x");
    double xn = 0.0;
    for (double v : x) xn += v * v;
    const double rhs = std::exp(0.5 * lambda * lambda * sigma_sq) * lyapunov_ell(lambda * std::sqrt(xn), d);
    const CounterRng rng(seed, kUser + 1);
    const double s = std::sqrt(sigma_sq);
    double acc = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double n2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double y = x[j] + s * rng.normal(0, i, j);
            n2 += y * y;
        }
        acc += lyapunov_ell(lambda * std::sqrt(n2), d);
    }
    const double lhs = acc / static_cast<double>(samples);
    return std::abs(lhs - rhs) / rhs;
}

double norm_proxy(double sigma_sq, std::size_t d) {
    const double dd = static_cast<double>(d);
    return dd * dd * sigma_sq;
}

double cover_count_ball(std::size_t d, double r, double M, double eps, double c_d) {
    require(r > 0.0 && M > 0.0 && eps > 0.0 && c_d > 0.0 && d > 0, "precondition violated: positive inputs");
    const double dd = static_cast<double>(d);
    return std::pow(c_d * r * M, dd / 2.0) * std::pow(2.0, dd / 4.0) * std::pow(eps, -dd / 2.0);
}

}  // namespace lresnet
