#include "lresnet/training.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace lresnet {

using json = nlohmann::json;

void TrainSpec::validate() const {
    if (hidden_layers == 0 || width == 0 || batch_size == 0 || dataset_size == 0 || steps == 0)
        throw std::invalid_argument("train spec: sizes must be positive");
    if (!(learning_rate > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("train spec: lr and T must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_eps > 0.0))
        throw std::invalid_argument("train spec: invalid Adam parameters");
}

std::vector<std::size_t> mlp_shape(std::size_t d, const TrainSpec& spec) {
    std::vector<std::size_t> s{d};
    for (std::size_t i = 0; i < spec.hidden_layers; ++i) s.push_back(spec.width);
    s.push_back(d);
    return s;
}

std::vector<Layer> init_weights(const std::vector<std::size_t>& shape, std::uint64_t seed) {
    if (shape.size() < 2) throw std::invalid_argument("init_weights: need at least input and output width");
    const CounterRng rng(seed, kWeightInit);
    std::vector<Layer> out;
    for (std::size_t l = 0; l + 1 < shape.size(); ++l) {
        const std::size_t fin = shape[l], fout = shape[l + 1];
        if (fin == 0 || fout == 0) throw std::invalid_argument("init_weights: zero width");
        const double a = std::sqrt(6.0 / static_cast<double>(fin + fout));
        Layer L{Mat(fout, fin), Vec::Zero(fout)};
        for (std::size_t i = 0; i < fout; ++i)
            for (std::size_t j = 0; j < fin; ++j) L.A(i, j) = a * (2.0 * rng.uniform(l, i, j) - 1.0);
        out.push_back(std::move(L));
    }
    return out;
}

namespace {

// Pre-activations Z_l and activations H_l (H_0 = X).
struct Tape {
    std::vector<Cloud> H;
    std::vector<Cloud> Z;
};

Cloud forward(const std::vector<Layer>& layers, const Cloud& X, Tape* tape) {
    Cloud cur = X;
    if (tape) {
        tape->H.assign(1, X);
        tape->Z.clear();
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Cloud z = cur * layers[l].A.transpose();
        z.rowwise() += layers[l].b.transpose();
        if (tape) tape->Z.push_back(z);
        if (l + 1 < layers.size()) {
            cur = z.cwiseMax(0.0);
            if (tape) tape->H.push_back(cur);
        } else {
            cur = std::move(z);
        }
    }
    return cur;
}

void zero_like(const std::vector<Layer>& like, std::vector<Layer>& out) {
    out.resize(like.size());
    for (std::size_t l = 0; l < like.size(); ++l) {
        out[l].A = Mat::Zero(like[l].A.rows(), like[l].A.cols());
        out[l].b = Vec::Zero(like[l].b.size());
    }
}

}  // namespace

double mse_loss(const std::vector<Layer>& layers, const Cloud& X, const Cloud& Y) {
    const Cloud out = forward(layers, X, nullptr);
    return (out - Y).rowwise().squaredNorm().mean();
}

double loss_and_grad(const std::vector<Layer>& layers, const Cloud& X, const Cloud& Y, std::vector<Layer>& grad) {
    Tape tape;
    const Cloud out = forward(layers, X, &tape);
    const Cloud diff = out - Y;
    const double B = static_cast<double>(X.rows());
    const double loss = diff.rowwise().squaredNorm().sum() / B;
    zero_like(layers, grad);
    Cloud delta = (2.0 / B) * diff;
    for (std::size_t l = layers.size(); l-- > 0;) {
        grad[l].A = delta.transpose() * tape.H[l];
        grad[l].b = delta.colwise().sum().transpose();
        if (l == 0) break;
        Cloud back = delta * layers[l].A;
        delta = (tape.Z[l - 1].array() > 0.0).select(back, 0.0);
    }
    return loss;
}

Adam::Adam(const std::vector<Layer>& like, double lr, double beta1, double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    zero_like(like, m_);
    zero_like(like, v_);
}

void Adam::step(std::vector<Layer>& params, const std::vector<Layer>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
        m = b1_ * m + (1.0 - b1_) * g;
        v = b2_ * v + (1.0 - b2_) * g.cwiseProduct(g);
        p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    };
    for (std::size_t l = 0; l < params.size(); ++l) {
        update(params[l].A, m_[l].A, v_[l].A, grad[l].A);
        update(params[l].b, m_[l].b, v_[l].b, grad[l].b);
    }
}

GradCheck gradient_check(const std::vector<Layer>& layers, const Cloud& X, const Cloud& Y, std::size_t count,
                         double step, std::uint64_t seed) {
    std::vector<Layer> grad;
    loss_and_grad(layers, X, Y, grad);
    std::size_t total = 0;
    for (const auto& L : layers) total += L.A.size() + L.b.size();
    const CounterRng rng(seed, kUser + 2);
    GradCheck out;
    std::vector<Layer> probe = layers;
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t idx = static_cast<std::size_t>(rng.uniform(0, c, 0) * static_cast<double>(total));
        idx = std::min(idx, total - 1);
        double* p = nullptr;
        double analytic = 0.0;
        for (std::size_t l = 0; l < layers.size() && !p; ++l) {
            const std::size_t na = layers[l].A.size(), nb = layers[l].b.size();
            if (idx < na) {
                p = probe[l].A.data() + idx;
                analytic = grad[l].A.data()[idx];
            } else if (idx < na + nb) {
                p = probe[l].b.data() + (idx - na);
                analytic = grad[l].b.data()[idx - na];
            } else {
                idx -= na + nb;
            }
        }
        const double keep = *p;
        *p = keep + step;
        const double up = mse_loss(probe, X, Y);
        *p = keep - step;
        const double dn = mse_loss(probe, X, Y);
        *p = keep;
        const double numeric = (up - dn) / (2.0 * step);
        const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        out.max_rel_error = std::max(out.max_rel_error, rel);
        ++out.checked;
    }
    return out;
}

Fcnn train_drift_net(const Cloud& samples, const DriftMap& drift, const TrainSpec& spec, std::uint64_t seed,
                     LossCurve* losses, const Fcnn* init) {
    spec.validate();
    if (!samples.allFinite()) throw std::invalid_argument("train_drift_net: samples must be finite");
    const std::size_t n = samples.rows(), d = samples.cols();
    const Cloud targets = drift(samples);
    std::vector<Layer> params = init ? init->layers() : init_weights(mlp_shape(d, spec), seed);
    Adam opt(params, spec.learning_rate, spec.beta1, spec.beta2, spec.adam_eps);
    const CounterRng shuffle_rng(seed, kShuffle);
    std::vector<Eigen::Index> order(n);
    std::vector<Layer> grad;
    Cloud xb, yb;
    LossCurve curve;
    curve.push_back(mse_loss(params, samples, targets));
    if (!std::isfinite(curve.back())) throw NumericAbort("training loss is not finite", 0);
    for (std::size_t e = 1; e <= spec.epochs; ++e) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform(e, i, 0) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        double acc = 0.0;
        std::size_t batches = 0;
        for (std::size_t s = 0; s < n; s += spec.batch_size) {
            const std::size_t B = std::min(spec.batch_size, n - s);
            xb.resize(B, d);
            yb.resize(B, d);
            for (std::size_t r = 0; r < B; ++r) {
                xb.row(r) = samples.row(order[s + r]);
                yb.row(r) = targets.row(order[s + r]);
            }
            const double l = loss_and_grad(params, xb, yb, grad);
            if (!std::isfinite(l)) throw NumericAbort("training loss is not finite", e);
            opt.step(params, grad);
            acc += l;
            ++batches;
        }
        curve.push_back(acc / static_cast<double>(batches));
    }
    if (losses) *losses = std::move(curve);
    return Fcnn(std::move(params));
}

std::vector<double> TrainedStack::final_losses() const {
    std::vector<double> out;
    for (const auto& c : losses) out.push_back(c.back());
    return out;
}

TrainedStack train_pipeline(const PotentialTarget& target, const ReferenceDistribution& ref, const TrainSpec& spec,
                            std::uint64_t seed) {
    spec.validate();
    const std::size_t d = target.dim();
    const double h = spec.h();
    const DriftMap exact = drift_from_target(target);
    // Training clouds use their own seed so they never share noise with evaluation chains.
    const std::uint64_t cloud_seed = derive_seed(seed, 0x7261696eULL);
    Cloud Y = ref.sample(spec.dataset_size, d, CounterRng(cloud_seed, kInitialCloud));
    const NoiseStream noise(cloud_seed, h);
    Cloud xi(spec.dataset_size, d);
    TrainedStack out;
    out.spec = spec;
    out.seed = seed;
    Fcnn prev;
    for (std::size_t k = 1; k <= spec.steps; ++k) {
        LossCurve curve;
        const Fcnn* init = (spec.warm_start && k > 1) ? &prev : nullptr;
        Fcnn phi = train_drift_net(Y, exact, spec, derive_seed(seed, k), &curve, init);
        noise.increment(k, xi);
        Y = Y + h * realize_batch(phi, Y) + xi;
        if (!(Y.cwiseAbs().maxCoeff() <= kBlowUp)) throw NumericAbort("training cloud left the finite range", k);
        out.nets.push_back(scale_last_layer(phi, h));
        out.losses.push_back(std::move(curve));
        if (spec.warm_start) prev = std::move(phi);
    }
    return out;
}

namespace {

json spec_json(const TrainSpec& s) {
    return {{"hidden_layers", s.hidden_layers}, {"width", s.width},         {"epochs", s.epochs},
            {"batch_size", s.batch_size},       {"learning_rate", s.learning_rate},
            {"dataset_size", s.dataset_size},   {"horizon", s.horizon},     {"steps", s.steps},
            {"beta1", s.beta1},                 {"beta2", s.beta2},         {"adam_eps", s.adam_eps},
            {"warm_start", s.warm_start}};
}

std::string step_file(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%04zu.json", k);
    return buf;
}

}  // namespace

void save_stack(const TrainedStack& stack, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json files = json::array();
    for (std::size_t k = 1; k <= stack.nets.size(); ++k) {
        save_fcnn(stack.nets[k - 1], (fs::path(dir) / step_file(k)).string());
        files.push_back(step_file(k));
    }
    const json manifest{{"schema", "lresnet.trained_stack/1"},
                        {"spec", spec_json(stack.spec)},
                        {"seed", stack.seed},
                        {"steps", stack.nets.size()},
                        {"nets", files},
                        {"losses", "losses.csv"}};
    std::ofstream(fs::path(dir) / "manifest.json") << manifest.dump(2) << '\n';
    std::ofstream os(fs::path(dir) / "losses.csv");
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "step,epoch,loss\n";
    for (std::size_t k = 0; k < stack.losses.size(); ++k)
        for (std::size_t e = 0; e < stack.losses[k].size(); ++e)
            os << k + 1 << ',' << e << ',' << stack.losses[k][e] << '\n';
}

TrainedStack load_stack(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream is(fs::path(dir) / "manifest.json");
    if (!is) throw std::runtime_error("load_stack: missing manifest in " + dir);
    const json m = json::parse(is);
    TrainedStack out;
    const json& s = m.at("spec");
    out.spec.hidden_layers = s.at("hidden_layers");
    out.spec.width = s.at("width");
    out.spec.epochs = s.at("epochs");
    out.spec.batch_size = s.at("batch_size");
    out.spec.learning_rate = s.at("learning_rate");
    out.spec.dataset_size = s.at("dataset_size");
    out.spec.horizon = s.at("horizon");
    out.spec.steps = s.at("steps");
    out.spec.beta1 = s.at("beta1");
    out.spec.beta2 = s.at("beta2");
    out.spec.adam_eps = s.at("adam_eps");
    out.spec.warm_start = s.value("warm_start", false);
    out.seed = m.at("seed");
    for (const auto& f : m.at("nets")) out.nets.push_back(load_fcnn((fs::path(dir) / f.get<std::string>()).string()));
    out.losses.assign(out.nets.size(), {});
    std::ifstream ls(fs::path(dir) / "losses.csv");
    std::string line;
    std::getline(ls, line);
    while (std::getline(ls, line)) {
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        const std::size_t k = std::stoul(a);
        if (k >= 1 && k <= out.losses.size()) out.losses[k - 1].push_back(std::stod(c));
    }
    return out;
}

std::vector<DriftMap> stack_drifts(const TrainedStack& stack) {
    std::vector<DriftMap> out;
    const double h = stack.spec.h();
    for (const auto& psi : stack.nets) out.push_back(drift_from_net(scale_last_layer(psi, 1.0 / h)));
    return out;
}

}  // namespace lresnet
