#pragma once

#include "lresnet/fcnn.hpp"
#include "lresnet/rng.hpp"
#include "lresnet/targets.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lresnet {

/// Thrown when a chain leaves the finite range (|coordinate| > 1e12 or NaN).
class NumericAbort : public std::runtime_error {
public:
    NumericAbort(const std::string& what, std::size_t step) : std::runtime_error(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

inline constexpr double kBlowUp = 1e12;

struct ChainConfig {
    double h = 0.02;
    std::size_t K = 200;
    std::size_t d = 1;
    std::size_t n = 1;
    std::uint64_t seed = 1;
    std::size_t record_every = 1;  // 0 keeps only Y_0 and Y_K
    bool noise = true;             // false: xi_k = 0 (test mode)
};

/// Largest multiple of h not exceeding s.
double chi(double s, double h);

/// xi_k = sqrt(2h) * N(0, I). Entry (k, i, j) is a fixed function of the seed,
/// drawn in the order step k, particle i, coordinate j.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, double h, bool enabled = true);

    /// Writes xi_k for an n x d cloud (k >= 1).
    void increment(std::size_t k, Cloud& out) const;
    double h() const { return h_; }

private:
    CounterRng rng_;
    double h_;
    double scale_;
    bool enabled_;
};

struct Trajectory {
    std::vector<std::size_t> steps;
    std::vector<Cloud> states;
    ChainConfig config;

    const Cloud& final_state() const { return states.back(); }
};

using DriftMap = std::function<Cloud(const Cloud&)>;

DriftMap drift_from_net(const Fcnn& net);
/// x -> -grad V(x).
DriftMap drift_from_target(const PotentialTarget& target);

/// Y_0 from the reference law with the chain seed (tag kInitialCloud).
Cloud initial_cloud(const ReferenceDistribution& ref, const ChainConfig& cfg);

/// X_k = X_{k-1} - h grad V(X_{k-1}) + xi_k.
Trajectory lmc_chain(const PotentialTarget& target, const ChainConfig& cfg, const Cloud& init);

/// Y_k = Y_{k-1} + h phi_k(Y_{k-1}) + xi_k, |drifts| = K.
Trajectory driven_chain(const std::vector<DriftMap>& drifts, const ChainConfig& cfg, const Cloud& init);

/// x_i = x_{i-1} + psi_i(x_{i-1}) + xi_i; returns x_K.
Cloud resnet_realize(const std::vector<Fcnn>& stack, const Cloud& y0, const NoiseStream& noise);

/// Mean over particles of ||Y^A_k - Y^B_k||_2 at each recorded step.
std::vector<double> couple_w2_bound_check(const Trajectory& a, const Trajectory& b);

/// Writes step,particle,coord0..coord{d-1}.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace lresnet
