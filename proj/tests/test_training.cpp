#include "lresnet/training.hpp"
#include "lresnet/transport.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

using namespace lresnet;

namespace {

Cloud normal_cloud(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
    const CounterRng rng(seed, kUser);
    Cloud X(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) X(i, j) = scale * rng.normal(0, i, j);
    return X;
}

TrainSpec small_spec() {
    TrainSpec s;
    s.epochs = 10;
    s.dataset_size = 1000;
    s.steps = 10;
    s.horizon = 1.0;
    s.learning_rate = 2e-3;
    return s;
}

}  // namespace

TEST(Init, XavierUniform) {
    const auto a = init_weights({10, 32, 32, 10}, 5), b = init_weights({10, 32, 32, 10}, 5);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_EQ(a[l].b, Vec::Zero(a[l].b.size()));
        EXPECT_EQ(a[l].A, b[l].A);
        const double bound = std::sqrt(6.0 / (a[l].A.rows() + a[l].A.cols()));
        EXPECT_LE(a[l].A.cwiseAbs().maxCoeff(), bound);
    }
    const Mat& W = a[1].A;
    const double var = (W.array() - W.mean()).square().sum() / (W.size() - 1);
    EXPECT_NEAR(var, 2.0 / 64.0, 0.1 * 2.0 / 64.0);
    EXPECT_NE(init_weights({10, 32, 32, 10}, 6)[0].A, a[0].A);
}

TEST(Backprop, GradientCheckAllShapes) {
    for (std::size_t d : {1u, 2u, 10u}) {
        TrainSpec s;
        const auto layers = init_weights(mlp_shape(d, s), 100 + d);
        const Cloud X = normal_cloud(64, d, 1 + d), Y = normal_cloud(64, d, 50 + d);
        const GradCheck g = gradient_check(layers, X, Y, 20, 1e-6, 7);
        EXPECT_EQ(g.checked, 20u);
        EXPECT_LT(g.max_rel_error, 1e-5) << d;
    }
}

TEST(Backprop, LossMatchesDefinition) {
    const auto layers = init_weights({2, 8, 2}, 3);
    const Cloud X = normal_cloud(20, 2, 4), Y = normal_cloud(20, 2, 5);
    const Cloud out = realize_batch(Fcnn(layers), X);
    EXPECT_NEAR(mse_loss(layers, X, Y), (out - Y).rowwise().squaredNorm().mean(), 1e-13);
    std::vector<Layer> grad;
    EXPECT_NEAR(loss_and_grad(layers, X, Y, grad), mse_loss(layers, X, Y), 1e-13);
}

TEST(Adam, ZeroGradientKeepsWeights) {
    auto params = init_weights({3, 5, 3}, 2);
    const auto before = params;
    std::vector<Layer> zero;
    for (const auto& L : params) zero.push_back({Mat::Zero(L.A.rows(), L.A.cols()), Vec::Zero(L.b.size())});
    Adam opt(params, 1e-3, 0.9, 0.999, 1e-8);
    for (int i = 0; i < 5; ++i) opt.step(params, zero);
    for (std::size_t l = 0; l < params.size(); ++l) {
        EXPECT_EQ(params[l].A, before[l].A);
        EXPECT_EQ(params[l].b, before[l].b);
    }
    EXPECT_EQ(opt.t(), 5u);
}

TEST(Train, LinearDriftIsRecovered) {
    const auto target = gaussian_target(Vec::Zero(1), Mat::Identity(1, 1));
    TrainSpec s;
    const Cloud X = normal_cloud(s.dataset_size, 1, 9);
    LossCurve losses;
    const Fcnn net = train_drift_net(X, drift_from_target(*target), s, 1, &losses);
    ASSERT_EQ(losses.size(), s.epochs + 1);
    EXPECT_LT(losses.back(), losses.front());
    EXPECT_LT(mse_loss(net.layers(), X, Cloud(-X)), 1e-3);
    EXPECT_EQ(net.layers().size(), 3u);
}

TEST(Train, ZeroEpochsReturnsInitialization) {
    const auto target = gaussian_target(Vec::Zero(2), Mat::Identity(2, 2));
    TrainSpec s = small_spec();
    s.epochs = 0;
    const Fcnn net = train_drift_net(normal_cloud(100, 2, 1), drift_from_target(*target), s, 4);
    const auto init = init_weights(mlp_shape(2, s), 4);
    for (std::size_t l = 0; l < init.size(); ++l) EXPECT_EQ(net.layers()[l].A, init[l].A);
}

TEST(Train, NonFiniteLossAborts) {
    const Cloud X = normal_cloud(100, 1, 2);
    TrainSpec s = small_spec();
    s.learning_rate = 1e300;
    const DriftMap huge = [](const Cloud& Y) { return Cloud(1e200 * Y); };
    EXPECT_THROW(train_drift_net(X, huge, s, 1), NumericAbort);
}

TEST(Pipeline, SingleStepIsOneRegressionAndOneEulerStep) {
    const auto target = gaussian_target(Vec::Zero(2), Mat::Identity(2, 2));
    TrainSpec s = small_spec();
    s.steps = 1;
    const TrainedStack st = train_pipeline(*target, ReferenceDistribution{}, s, 3);
    ASSERT_EQ(st.nets.size(), 1u);
    const std::uint64_t cloud_seed = derive_seed(3, 0x7261696eULL);
    const Cloud Y = ReferenceDistribution{}.sample(s.dataset_size, 2, CounterRng(cloud_seed, kInitialCloud));
    const Fcnn phi = train_drift_net(Y, drift_from_target(*target), s, derive_seed(3, 1));
    const Fcnn psi = scale_last_layer(phi, s.h());
    for (std::size_t l = 0; l < psi.layers().size(); ++l) EXPECT_EQ(st.nets[0].layers()[l].A, psi.layers()[l].A);
}

TEST(Pipeline, DeterministicAndRoundTrips) {
    const auto target = gaussian_target(Vec::Zero(2), Mat::Identity(2, 2));
    const TrainSpec s = small_spec();
    const TrainedStack a = train_pipeline(*target, ReferenceDistribution{}, s, 11);
    const TrainedStack b = train_pipeline(*target, ReferenceDistribution{}, s, 11);
    EXPECT_EQ(a.final_losses(), b.final_losses());
    const auto dir = (std::filesystem::temp_directory_path() / "lresnet_stack_test").string();
    std::filesystem::remove_all(dir);
    save_stack(a, dir);
    const TrainedStack c = load_stack(dir);
    ASSERT_EQ(c.nets.size(), a.nets.size());
    EXPECT_EQ(c.seed, 11u);
    EXPECT_EQ(c.spec.steps, s.steps);
    EXPECT_EQ(c.final_losses(), a.final_losses());
    for (std::size_t k = 0; k < a.nets.size(); ++k) EXPECT_EQ(c.nets[k].layers()[1].A, a.nets[k].layers()[1].A);
    std::filesystem::remove_all(dir);
}

TEST(Pipeline, QuadraticStackTracksLmc) {
    Mat P = Mat::Identity(2, 2);
    P(1, 1) = 2.0;
    Vec mu(2);
    mu << 1.0, -1.0;
    const auto target = gaussian_target(mu, P);
    TrainSpec s = small_spec();
    s.steps = 20;
    s.horizon = 2.0;
    s.epochs = 15;
    const TrainedStack st = train_pipeline(*target, ReferenceDistribution{}, s, 5);

    const std::vector<double> fl = st.final_losses();
    std::vector<double> sorted = fl;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    EXPECT_LT(sorted[sorted.size() / 2], 10.0 * fl.front());

    ChainConfig c;
    c.d = 2;
    c.n = 512;
    c.K = s.steps;
    c.h = s.h();
    c.seed = 77;
    const Cloud y0 = initial_cloud(ReferenceDistribution{}, c);
    const Cloud model = driven_chain(stack_drifts(st), c, y0).final_state();
    const Cloud base = lmc_chain(*target, c, y0).final_state();
    const Cloud ref = target->sample(512, CounterRng(78, kTargetSamples));
    const double wm = exact_w2_empirical(model, ref), wb = exact_w2_empirical(base, ref);
    EXPECT_LE(wm, 2.0 * wb) << wm << " vs " << wb;
}
