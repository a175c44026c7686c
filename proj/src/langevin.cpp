#include "lresnet/langevin.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace lresnet {

double chi(double s, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("chi: h must be positive");
    if (s < 0.0) throw std::invalid_argument("chi: s must be nonnegative");
    // s = k h computed in floating point may divide to k - 1 + 0.999...; snap to the grid point.
    const double q = std::round(s / h);
    if (std::abs(s - q * h) <= 1e-12 * std::max(s, h)) return q * h;
    return std::floor(s / h) * h;
}

NoiseStream::NoiseStream(std::uint64_t seed, double h, bool enabled)
    : rng_(seed, kChainNoise), h_(h), scale_(std::sqrt(2.0 * h)), enabled_(enabled) {
    if (!(h > 0.0)) throw std::invalid_argument("NoiseStream: h must be positive");
}

void NoiseStream::increment(std::size_t k, Cloud& out) const {
    if (!enabled_) {
        out.setZero();
        return;
    }
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = scale_ * rng_.normal(k, i, j);
}

DriftMap drift_from_net(const Fcnn& net) {
    return [net](const Cloud& Y) { return realize_batch(net, Y); };
}

DriftMap drift_from_target(const PotentialTarget& target) {
    return [&target](const Cloud& Y) { return Cloud(-target.grad_batch(Y)); };
}

Cloud initial_cloud(const ReferenceDistribution& ref, const ChainConfig& cfg) {
    return ref.sample(cfg.n, cfg.d, CounterRng(cfg.seed, kInitialCloud));
}

namespace {

void validate(const ChainConfig& cfg, const Cloud& init) {
    if (!(cfg.h > 0.0)) throw std::invalid_argument("chain: h must be positive");
    if (static_cast<std::size_t>(init.rows()) != cfg.n || static_cast<std::size_t>(init.cols()) != cfg.d)
        throw std::invalid_argument("chain: initial cloud shape does not match config");
}

void guard(const Cloud& Y, std::size_t k) {
    const double mx = Y.cwiseAbs().maxCoeff();
    if (!(mx <= kBlowUp)) throw NumericAbort("chain state left the finite range", k);
}

bool keep(const ChainConfig& cfg, std::size_t k) {
    if (k == 0 || k == cfg.K) return true;
    return cfg.record_every > 0 && k % cfg.record_every == 0;
}

template <class Step>
Trajectory run_chain(const ChainConfig& cfg, const Cloud& init, Step&& step) {
    validate(cfg, init);
    const NoiseStream noise(cfg.seed, cfg.h, cfg.noise);
    Trajectory traj;
    traj.config = cfg;
    traj.steps.push_back(0);
    traj.states.push_back(init);
    Cloud Y = init;
    Cloud xi(cfg.n, cfg.d);
    for (std::size_t k = 1; k <= cfg.K; ++k) {
        noise.increment(k, xi);
        step(k, Y, xi);
        guard(Y, k);
        if (keep(cfg, k)) {
            traj.steps.push_back(k);
            traj.states.push_back(Y);
        }
    }
    return traj;
}

}  // namespace

Trajectory lmc_chain(const PotentialTarget& target, const ChainConfig& cfg, const Cloud& init) {
    if (target.dim() != cfg.d) throw std::invalid_argument("lmc_chain: target dimension mismatch");
    if (target.M() > 0.0 && cfg.h >= 2.0 / target.M())
        throw std::invalid_argument("lmc_chain: step size must satisfy h < 2/M");
    return run_chain(cfg, init, [&](std::size_t, Cloud& Y, const Cloud& xi) {
        Y = Y - cfg.h * target.grad_batch(Y) + xi;
    });
}

Trajectory driven_chain(const std::vector<DriftMap>& drifts, const ChainConfig& cfg, const Cloud& init) {
    if (drifts.size() != cfg.K) throw std::invalid_argument("driven_chain: need exactly K drift maps");
    return run_chain(cfg, init, [&](std::size_t k, Cloud& Y, const Cloud& xi) {
        const Cloud phi = drifts[k - 1](Y);
        if (phi.rows() != Y.rows() || phi.cols() != Y.cols())
            throw std::invalid_argument("driven_chain: drift output shape mismatch");
        Y = Y + cfg.h * phi + xi;
    });
}

Cloud resnet_realize(const std::vector<Fcnn>& stack, const Cloud& y0, const NoiseStream& noise) {
    Cloud x = y0;
    Cloud xi(y0.rows(), y0.cols());
    for (std::size_t i = 1; i <= stack.size(); ++i) {
        const Fcnn& psi = stack[i - 1];
        if (psi.input_dim() != static_cast<std::size_t>(y0.cols()) || psi.output_dim() != psi.input_dim())
            throw std::invalid_argument("resnet_realize: block must map R^d to R^d");
        noise.increment(i, xi);
        x = x + realize_batch(psi, x) + xi;
        guard(x, i);
    }
    return x;
}

std::vector<double> couple_w2_bound_check(const Trajectory& a, const Trajectory& b) {
    if (a.steps != b.steps || a.config.n != b.config.n || a.config.d != b.config.d ||
        a.config.seed != b.config.seed || a.config.h != b.config.h)
        throw std::invalid_argument("couple_w2_bound_check: chains are not coupled");
    std::vector<double> out;
    for (std::size_t s = 0; s < a.states.size(); ++s)
        out.push_back((a.states[s] - b.states[s]).rowwise().norm().mean());
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "step,particle";
    for (std::size_t j = 0; j < traj.config.d; ++j) os << ",coord" << j;
    os << '\n';
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const Cloud& Y = traj.states[s];
        for (Eigen::Index i = 0; i < Y.rows(); ++i) {
            os << traj.steps[s] << ',' << i;
            for (Eigen::Index j = 0; j < Y.cols(); ++j) os << ',' << Y(i, j);
            os << '\n';
        }
    }
}

}  // namespace lresnet
