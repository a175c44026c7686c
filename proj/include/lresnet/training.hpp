#pragma once

#include "lresnet/fcnn.hpp"
#include "lresnet/langevin.hpp"
#include "lresnet/targets.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lresnet {

struct TrainSpec {
    std::size_t hidden_layers = 2;
    std::size_t width = 32;
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    double learning_rate = 5e-4;
    std::size_t dataset_size = 10000;
    double horizon = 4.0;
    std::size_t steps = 200;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    /// Start phi_k from phi_{k-1} instead of a fresh initialization.
    bool warm_start = false;

    double h() const { return horizon / static_cast<double>(steps); }
    void validate() const;
};

/// Layer widths d, width x hidden_layers, d.
std::vector<std::size_t> mlp_shape(std::size_t d, const TrainSpec& spec);

/// Xavier-uniform weights U(-sqrt(6/(fan_in+fan_out)), +...), zero biases.
std::vector<Layer> init_weights(const std::vector<std::size_t>& shape, std::uint64_t seed);

/// Mean over rows of ||net(x) - y||^2.
double mse_loss(const std::vector<Layer>& layers, const Cloud& X, const Cloud& Y);

/// Loss and its gradient with respect to every weight and bias.
double loss_and_grad(const std::vector<Layer>& layers, const Cloud& X, const Cloud& Y, std::vector<Layer>& grad);

class Adam {
public:
    Adam(const std::vector<Layer>& like, double lr, double beta1, double beta2, double eps);
    void step(std::vector<Layer>& params, const std::vector<Layer>& grad);
    std::size_t t() const { return t_; }

private:
    std::vector<Layer> m_, v_;
    double lr_, b1_, b2_, eps_;
    std::size_t t_ = 0;
};

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

/// Central differences on `count` randomly chosen parameters (weights and biases).
/// rel = |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheck gradient_check(const std::vector<Layer>& layers, const Cloud& X, const Cloud& Y, std::size_t count,
                         double step, std::uint64_t seed);

/// Per-epoch losses: entry 0 is the loss before training, entry e the mean minibatch loss of epoch e.
using LossCurve = std::vector<double>;

/// Regresses an MLP onto drift(samples). Throws NumericAbort(epoch) on a non-finite loss.
Fcnn train_drift_net(const Cloud& samples, const DriftMap& drift, const TrainSpec& spec, std::uint64_t seed,
                     LossCurve* losses = nullptr, const Fcnn* init = nullptr);

struct TrainedStack {
    std::vector<Fcnn> nets;  // psi_k, already scaled by h
    std::vector<LossCurve> losses;
    TrainSpec spec;
    std::uint64_t seed = 0;

    /// Final-epoch loss of every step.
    std::vector<double> final_losses() const;
};

/// For k = 1..K: train phi_k on the cloud pushed through the trained prefix,
/// psi_k = scale_last_layer(phi_k, h), advance the cloud with phi_k.
TrainedStack train_pipeline(const PotentialTarget& target, const ReferenceDistribution& ref, const TrainSpec& spec,
                            std::uint64_t seed);

/// step_XXXX.json per net, manifest.json, losses.csv (step,epoch,loss).
void save_stack(const TrainedStack& stack, const std::string& dir);
TrainedStack load_stack(const std::string& dir);

/// Unscaled drift maps phi_k = psi_k / h for driven_chain.
std::vector<DriftMap> stack_drifts(const TrainedStack& stack);

}  // namespace lresnet
