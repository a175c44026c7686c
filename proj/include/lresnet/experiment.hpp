#pragma once

#include "lresnet/langevin.hpp"
#include "lresnet/targets.hpp"
#include "lresnet/training.hpp"
#include "lresnet/transport.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lresnet {

using json = nlohmann::json;

/// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Defaults of every section. Sections: seed, target, reference, chain, train,
/// sinkhorn, experiment, bounds, construct.
json default_config();

/// default_config() merged with the file (if non-empty) and the key=value overrides.
/// Keys are dotted paths; values parse as JSON when possible, else as strings.
json load_config(const std::string& path, const std::vector<std::string>& overrides);
void apply_override(json& cfg, const std::string& assignment);

/// FNV-1a 64 of the canonical (sorted, compact) dump, as 16 hex digits.
std::string config_hash(const json& cfg);

/// Target from {"kind":"gaussian","mean","cov"} or {"kind":"gmm","weights","means","covs"}.
std::unique_ptr<PotentialTarget> target_from_json(const json& spec);
ReferenceDistribution reference_from_json(const json& spec, std::size_t d);
TrainSpec train_spec_from_json(const json& spec);
SinkhornParams sinkhorn_from_json(const json& spec);

/// Built-in targets: "gaussian" (d = 10, alternating mean, identity covariance)
/// and "gmm" (d = 2, two components).
json preset_target(const std::string& kind);
/// config.target, or the preset of config.experiment.kind when null.
json resolved_target(const json& cfg);

struct CurvePoint {
    std::size_t step = 0;
    double t = 0.0;
    double model = 0.0;
    double baseline = 0.0;
    bool converged = true;
};

struct RepetitionResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::vector<CurvePoint> curve;
    std::vector<double> final_losses;
    double seconds_train = 0.0;
    double seconds_eval = 0.0;
};

struct ExperimentResult {
    std::vector<RepetitionResult> runs;
    std::vector<DivergenceRow> model;
    std::vector<DivergenceRow> baseline;
};

/// One repetition: train the pipeline, roll model and exact-drift baseline from a
/// shared initial cloud under shared noise, evaluate S_lambda against a fixed target cloud.
RepetitionResult run_repetition(const json& cfg, std::size_t index);

/// All repetitions on experiment.threads workers (ordered by index). When out_dir is
/// non-empty, each repetition's raw curve is written as soon as it finishes.
ExperimentResult run_experiment(const json& cfg, const std::string& out_dir = "");

/// Mean and sample standard deviation per time point.
std::vector<DivergenceRow> aggregate(const std::vector<RepetitionResult>& runs, bool model);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Subcommands. Each writes its artifacts into out_dir and returns a JSON summary.
json cmd_sample(const json& cfg, const std::string& out_dir);
json cmd_experiment(const json& cfg, const std::string& out_dir);
json cmd_bounds(const json& cfg, const std::string& out_dir);
json cmd_construct(const json& cfg, const std::string& out_dir);
json cmd_train(const json& cfg, const std::string& out_dir);

}  // namespace lresnet
