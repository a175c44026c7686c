#include "lresnet/construct.hpp"

#include <algorithm>
#include <cmath>

namespace lresnet {

namespace {

Mat plus_minus(Eigen::Index d) {
    Mat S(2 * d, d);
    S << Mat::Identity(d, d), -Mat::Identity(d, d);
    return S;
}

}  // namespace

Fcnn identity_net(std::size_t d) {
    if (d == 0) throw std::invalid_argument("identity_net: d must be positive");
    const Eigen::Index n = d;
    Mat A1(n, 2 * n);
    A1 << Mat::Identity(n, n), -Mat::Identity(n, n);
    return Fcnn({{plus_minus(n), Vec::Zero(2 * n)}, {A1, Vec::Zero(n)}});
}

Fcnn l1_net(std::size_t d) {
    if (d == 0) throw std::invalid_argument("l1_net: d must be positive");
    const Eigen::Index n = d;
    return Fcnn({{plus_minus(n), Vec::Zero(2 * n)}, {Mat::Ones(1, 2 * n), Vec::Zero(1)}});
}

Fcnn indicator_net(std::size_t d, double r, double delta) {
    if (d == 0 || !(r > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("indicator_net: need d >= 1, r > 0, delta > 0");
    const Eigen::Index n = d;
    std::vector<Layer> layers;
    layers.push_back({plus_minus(n), Vec::Zero(2 * n)});
    layers.push_back({Mat::Ones(1, 2 * n), Vec::Zero(1)});
    layers.push_back({Mat::Ones(2, 1), Vec{{-r, -(r + delta)}}});
    Mat A3(1, 2);
    A3 << -1.0 / delta, 1.0 / delta;
    layers.push_back({A3, Vec::Ones(1)});
    return Fcnn(std::move(layers));
}

Fcnn cutoff(const Fcnn& net, const Vec& c) {
    const Eigen::Index k = net.output_dim();
    if (c.size() != k) throw std::invalid_argument("cutoff: clamp vector has wrong length");
    if ((c.array() < 0.0).any() || !c.allFinite())
        throw std::invalid_argument("cutoff: clamp levels must be finite and nonnegative");
    std::vector<Layer> out(net.layers().begin(), net.layers().end() - 1);
    const Layer& last = net.layers().back();
    // relu(c - phi), then relu(2c - h) = relu(min(phi, c) + c), then - c
    out.push_back({-last.A, c - last.b});
    out.push_back({-Mat::Identity(k, k), 2.0 * c});
    out.push_back({Mat::Identity(k, k), -c});
    return Fcnn(std::move(out));
}

Fcnn cutoff(const Fcnn& net, double c) {
    return cutoff(net, Vec::Constant(net.output_dim(), c));
}

int mult_levels(double M, double eps) {
    const double s = std::ceil(std::log2(3.0 * M * M / eps));
    return std::max(1, static_cast<int>(s));
}

Fcnn mult_net(const MultSpec& spec) {
    if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw std::invalid_argument("mult_net: eps must lie in (0,1)");
    if (!(spec.M > 0.0) || !std::isfinite(spec.M)) throw std::invalid_argument("mult_net: M must be positive");
    const int s = spec.levels > 0 ? spec.levels : mult_levels(spec.M, spec.eps);
    const double w = 1.0 / (2.0 * spec.M);
    const double M2 = spec.M * spec.M;
    const double shift[3] = {0.0, -0.5, -1.0};
    const double tent[3] = {2.0, -4.0, 2.0};

    // Both branches (beta = 0: x+y, beta = 1: x-y) are interleaved neuron by
    // neuron so that mirrored branches cancel exactly in the output sum.
    std::vector<Layer> layers;
    Mat A0(4, 2);
    A0 << 1, 1,    // relu(x+y)
          1, -1,   // relu(x-y)
          -1, -1,  // relu(-x-y)
          -1, 1;   // relu(y-x)
    layers.push_back({A0, Vec::Zero(4)});

    // level 1: relu(u), relu(u - 1/2), relu(u - 1) with u = |x +- y| / (2M)
    {
        Mat A = Mat::Zero(6, 4);
        Vec b(6);
        for (int q = 0; q < 3; ++q)
            for (int beta = 0; beta < 2; ++beta) {
                const int row = 2 * q + beta;
                A(row, beta) = w;
                A(row, 2 + beta) = w;
                b(row) = shift[q];
            }
        layers.push_back({A, b});
    }

    auto abc_col = [](int level, int q, int beta) { return level == 1 ? 2 * q + beta : 2 + 2 * q + beta; };
    auto acc_coeffs = [&](int level, double* acc, double* abc) {
        // f_level = acc_{level-1} - g_level / 4^level, acc_0 = A_1
        const double scale = std::ldexp(1.0, -2 * level);
        *acc = level == 1 ? 0.0 : 1.0;
        for (int q = 0; q < 3; ++q) abc[q] = -tent[q] * scale;
        if (level == 1) abc[0] += 1.0;
    };

    for (int level = 2; level <= s; ++level) {
        const int prev = level - 1;
        const Eigen::Index cols = prev == 1 ? 6 : 8;
        Mat A = Mat::Zero(8, cols);
        Vec b = Vec::Zero(8);
        double acc_c, abc_c[3];
        acc_coeffs(prev, &acc_c, abc_c);
        for (int beta = 0; beta < 2; ++beta) {
            if (prev > 1) A(beta, beta) = acc_c;
            for (int q = 0; q < 3; ++q) A(beta, abc_col(prev, q, beta)) = abc_c[q];
            for (int q = 0; q < 3; ++q) {
                const int row = 2 + 2 * q + beta;
                for (int p = 0; p < 3; ++p) A(row, abc_col(prev, p, beta)) = tent[p];
                b(row) = shift[q];
            }
        }
        layers.push_back({A, b});
    }

    {
        const Eigen::Index cols = s == 1 ? 6 : 8;
        Mat A = Mat::Zero(1, cols);
        double acc_c, abc_c[3];
        acc_coeffs(s, &acc_c, abc_c);
        for (int beta = 0; beta < 2; ++beta) {
            const double sign = beta == 0 ? M2 : -M2;
            if (s > 1) A(0, beta) = sign * acc_c;
            for (int q = 0; q < 3; ++q) A(0, abc_col(s, q, beta)) = sign * abc_c[q];
        }
        layers.push_back({A, Vec::Zero(1)});
    }
    return Fcnn(std::move(layers));
}

double elementwise_half_width(const ElementwiseRange& g) {
    const double t = std::min(g.A1, g.A2);
    const double r = std::max(g.B1 - t, g.B2 - t);
    return std::max({r, std::abs(g.A1), std::abs(g.B1), std::abs(g.A2), std::abs(g.B2)});
}

Fcnn elementwise_mult_net(std::size_t d, const ElementwiseRange& range, double eps) {
    if (d == 0) throw std::invalid_argument("elementwise_mult_net: d must be positive");
    if (!(range.A1 <= range.B1) || !(range.A2 <= range.B2) || !std::isfinite(range.A1) ||
        !std::isfinite(range.B1) || !std::isfinite(range.A2) || !std::isfinite(range.B2))
        throw std::invalid_argument("elementwise_mult_net: invalid ranges");
    if (!(eps > 0.0)) throw std::invalid_argument("elementwise_mult_net: eps must be positive");
    double half = elementwise_half_width(range);
    if (half == 0.0) half = 1.0;
    const Fcnn mult = mult_net({half, eps / static_cast<double>(d), 0});

    const Eigen::Index in = d + 1;
    Mat A1(2, 4);
    A1 << 1, 0, -1, 0,
          0, 1, 0, -1;
    std::vector<Fcnn> parts;
    for (std::size_t j = 0; j < d; ++j) {
        Mat gamma = Mat::Zero(2, in);
        gamma(0, 0) = 1.0;
        gamma(1, j + 1) = 1.0;
        Mat A0(4, in);
        A0 << gamma, -gamma;
        const Fcnn extract({{A0, Vec::Zero(4)}, {A1, Vec::Zero(2)}});
        parts.push_back(concatenate(mult, extract));
    }
    return parallelize(parts);
}

Fcnn linear_net(const Mat& A) {
    const Eigen::Index d = A.cols();
    if (d == 0 || A.rows() == 0) throw std::invalid_argument("linear_net: empty matrix");
    Mat A1(A.rows(), 2 * d);
    A1 << A, -A;
    return Fcnn({{plus_minus(d), Vec::Zero(2 * d)}, {A1, Vec::Zero(A.rows())}});
}

Fcnn linear_drift_net(std::size_t d, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("linear_drift_net: m must be positive");
    return scale_output(identity_net(d), -m);
}

Fcnn composite_drift_net(const Fcnn& local_net, const CompositeParams& p, CompositeInfo* info) {
    const std::size_t d = local_net.input_dim();
    if (local_net.output_dim() != d) throw std::invalid_argument("composite: local net must map R^d to R^d");
    if (!(p.r > 0.0)) throw std::invalid_argument("composite: r must be positive");
    if (!(p.eps > 0.0 && p.eps < 1.0)) throw std::invalid_argument("composite: eps must lie in (0,1)");
    if (!(p.m > 0.0) || p.M < p.m) throw std::invalid_argument("composite: need 0 < m <= M");

    const double G = std::sqrt(p.M * p.M - p.m * p.m);
    const double clamp = p.r * G;
    const Fcnn cut = cutoff(local_net, clamp);
    const double lip = p.lip_bound > 0.0 ? p.lip_bound : lipschitz_upper_bound(cut);
    const double b = p.r + p.eps / std::max(lip, p.M);

    const Fcnn ind = indicator_net(d, p.r, b - p.r);
    const Fcnn pair = parallelize({ind, cut});
    const double tol = p.eps / std::sqrt(static_cast<double>(d));
    const Fcnn prod = concatenate(elementwise_mult_net(d, {0.0, 1.0, -clamp, clamp}, tol * d), pair);

    if (info) *info = {b, clamp, lip, tol};
    return sum_networks({prod, linear_drift_net(d, p.m)});
}

}  // namespace lresnet
