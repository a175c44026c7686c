#include "lresnet/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lresnet {

json default_config() {
    const TrainSpec t;
    const SinkhornParams s;
    return {
        {"schema", "lresnet.config/1"},
        {"seed", 1},
        {"target", nullptr},
        {"reference", {{"kind", "standard_normal"}}},
        {"chain",
         {{"h", 0.02}, {"K", 200}, {"n", 1000}, {"record_every", 1}, {"noise", true}, {"drift", "exact"},
          {"stack_dir", ""}}},
        {"train",
         {{"hidden_layers", t.hidden_layers},
          {"width", t.width},
          {"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"learning_rate", t.learning_rate},
          {"dataset_size", t.dataset_size},
          {"horizon", t.horizon},
          {"steps", t.steps},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"adam_eps", t.adam_eps},
          {"warm_start", t.warm_start}}},
        {"sinkhorn",
         {{"lambda", s.lambda}, {"tol", s.tol}, {"max_iters", s.max_iters}, {"relax", 1.8}, {"anneal", s.anneal}}},
        {"experiment", {{"kind", "gaussian"}, {"repetitions", 5}, {"n_eval", 2000}, {"eval_every", 10}, {"threads", 0}}},
        {"bounds",
         {{"h", 0.1}, {"m", 1.0}, {"M", 1.0}, {"d", 10}, {"K", 100}, {"w2_init", 1.0}, {"eps", 0.0}, {"sweep", nullptr}}},
        {"construct",
         {{"kind", "identity"},
          {"d", 3},
          {"r", 1.0},
          {"delta", 0.2},
          {"c", 1.0},
          {"M", 2.0},
          {"m", 1.0},
          {"eps", 0.01},
          {"grid", 201},
          {"probes", 10000},
          {"seed", 11}}},
    };
}

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("empty path component in override: " + key);
        if (!node->is_object()) *node = json::object();
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json cfg = default_config();
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot read config file " + path);
        json user;
        try {
            user = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        if (!user.is_object()) throw ConfigError("config must be a JSON object");
        cfg.merge_patch(user);
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    return cfg;
}

std::string config_hash(const json& cfg) {
    const std::string text = cfg.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

Vec vec_of(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a nonempty array");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

Mat mat_of(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a nonempty matrix");
    const std::size_t r = j.size(), c = j.at(0).size();
    Mat A(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (j.at(i).size() != c) throw ConfigError(std::string(what) + " rows differ in length");
        for (std::size_t k = 0; k < c; ++k) A(i, k) = j.at(i).at(k).get<double>();
    }
    return A;
}

json json_of(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json json_of(const Mat& A) {
    json a = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) a.push_back(json_of(Vec(A.row(i).transpose())));
    return a;
}

}  // namespace

std::unique_ptr<PotentialTarget> target_from_json(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind")) throw ConfigError("target needs a kind");
    const std::string kind = spec.at("kind");
    try {
        if (kind == "gaussian") {
            const Vec mean = vec_of(spec.at("mean"), "target.mean");
            Mat prec;
            if (spec.contains("precision")) {
                prec = mat_of(spec.at("precision"), "target.precision");
            } else {
                const Mat cov = mat_of(spec.at("cov"), "target.cov");
                if (cov.rows() != mean.size() || cov.cols() != mean.size())
                    throw ConfigError("target.cov must be d x d");
                Eigen::LLT<Mat> llt(cov);
                if (llt.info() != Eigen::Success) throw ConfigError("target.cov is not positive definite");
                prec = llt.solve(Mat::Identity(mean.size(), mean.size()));
                prec = 0.5 * (prec + prec.transpose());
            }
            return gaussian_target(mean, prec);
        }
        if (kind == "gmm") {
            const Vec w = vec_of(spec.at("weights"), "target.weights");
            std::vector<Vec> means;
            std::vector<Mat> covs;
            for (const auto& m : spec.at("means")) means.push_back(vec_of(m, "target.means[k]"));
            for (const auto& c : spec.at("covs")) covs.push_back(mat_of(c, "target.covs[k]"));
            return gmm_target(w, means, covs);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("target: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown target kind: " + kind);
}

ReferenceDistribution reference_from_json(const json& spec, std::size_t d) {
    ReferenceDistribution ref;
    const std::string kind = spec.value("kind", "standard_normal");
    try {
        if (kind == "standard_normal") {
            ref.kind = ReferenceDistribution::Kind::StandardNormal;
        } else if (kind == "gaussian") {
            ref.kind = ReferenceDistribution::Kind::Gaussian;
            ref.mean = vec_of(spec.at("mean"), "reference.mean");
            ref.cov = mat_of(spec.at("cov"), "reference.cov");
        } else if (kind == "point_mass") {
            ref.kind = ReferenceDistribution::Kind::PointMass;
            ref.mean = spec.contains("mean") ? vec_of(spec.at("mean"), "reference.mean") : Vec(Vec::Zero(d));
        } else {
            throw ConfigError("unknown reference kind: " + kind);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("reference: ") + e.what());
    }
    if (ref.kind != ReferenceDistribution::Kind::StandardNormal && static_cast<std::size_t>(ref.mean.size()) != d)
        throw ConfigError("reference dimension does not match the target");
    return ref;
}

TrainSpec train_spec_from_json(const json& j) {
    TrainSpec t;
    try {
        t.hidden_layers = j.value("hidden_layers", t.hidden_layers);
        t.width = j.value("width", t.width);
        t.epochs = j.value("epochs", t.epochs);
        t.batch_size = j.value("batch_size", t.batch_size);
        t.learning_rate = j.value("learning_rate", t.learning_rate);
        t.dataset_size = j.value("dataset_size", t.dataset_size);
        t.horizon = j.value("horizon", t.horizon);
        t.steps = j.value("steps", t.steps);
        t.beta1 = j.value("beta1", t.beta1);
        t.beta2 = j.value("beta2", t.beta2);
        t.adam_eps = j.value("adam_eps", t.adam_eps);
        t.warm_start = j.value("warm_start", t.warm_start);
        t.validate();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("train: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return t;
}

SinkhornParams sinkhorn_from_json(const json& j) {
    SinkhornParams p;
    try {
        p.lambda = j.value("lambda", p.lambda);
        p.tol = j.value("tol", p.tol);
        p.max_iters = j.value("max_iters", p.max_iters);
        p.relax = j.value("relax", p.relax);
        p.anneal = j.value("anneal", p.anneal);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sinkhorn: ") + e.what());
    }
    if (!(p.lambda > 0.0)) throw ConfigError("sinkhorn.lambda must be positive");
    if (!(p.tol > 0.0) || p.max_iters == 0) throw ConfigError("sinkhorn.tol and max_iters must be positive");
    if (!(p.relax >= 1.0 && p.relax < 2.0)) throw ConfigError("sinkhorn.relax must lie in [1, 2)");
    return p;
}

json preset_target(const std::string& kind) {
    if (kind == "gaussian") {
        const std::size_t d = 10;
        return {{"kind", "gaussian"}, {"mean", json_of(alternating_mean(d))}, {"cov", json_of(Mat(Mat::Identity(d, d)))}};
    }
    if (kind == "gmm") {
        const Mat cov = 0.5 * Mat::Identity(2, 2);
        return {{"kind", "gmm"},
                {"weights", {0.5, 0.5}},
                {"means", {{-1.5, 0.0}, {1.5, 0.0}}},
                {"covs", {json_of(cov), json_of(cov)}}};
    }
    throw ConfigError("unknown experiment kind: " + kind + " (expected gaussian or gmm)");
}

json resolved_target(const json& cfg) {
    if (cfg.contains("target") && !cfg.at("target").is_null()) return cfg.at("target");
    const std::string kind = cfg.at("experiment").value("kind", "gaussian");
    return preset_target(kind);
}

}  // namespace lresnet
