#pragma once

#include "lresnet/fcnn.hpp"

namespace lresnet {

/// A_0 = [I; -I], A_1 = [I, -I]. P = 4d, depth 1.
Fcnn identity_net(std::size_t d);

/// x -> ||x||_1. P = 4d, depth 1.
Fcnn l1_net(std::size_t d);

/// 1 - (relu(||x||_1 - r) - relu(||x||_1 - r - delta)) / delta. P = 4d+7, depth 3.
Fcnn indicator_net(std::size_t d, double r, double delta);

/// Componentwise clamp of the output to [-c_i, c_i]; adds two hidden layers.
Fcnn cutoff(const Fcnn& net, const Vec& c);
Fcnn cutoff(const Fcnn& net, double c);

struct MultSpec {
    double M = 1.0;    // inputs in [-M, M]^2
    double eps = 0.1;  // uniform tolerance, in (0,1)
    int levels = 0;    // sawtooth compositions s; 0 selects mult_levels(M, eps)
};

/// s = ceil(log2(3 M^2 / eps)), at least 1.
int mult_levels(double M, double eps);

/// (x, y) -> xy up to eps on [-M,M]^2; exactly 0 when x = 0 or y = 0.
/// Polarization xy = ((x+y)^2 - (x-y)^2)/4 with a sawtooth squaring of |x +- y|.
Fcnn mult_net(const MultSpec& spec);

struct ElementwiseRange {
    double A1 = 0.0, B1 = 1.0;  // scalar factor range
    double A2 = -1.0, B2 = 1.0; // vector entry range
};

/// Half-width fed to the scalar multiplication networks.
double elementwise_half_width(const ElementwiseRange& range);

/// (x, y_1..y_d) -> (x y_1, ..., x y_d), l1 error <= eps on the range box.
Fcnn elementwise_mult_net(std::size_t d, const ElementwiseRange& range, double eps);

/// x -> A x via [I; -I] and [A, -A].
Fcnn linear_net(const Mat& A);

/// x -> -m x.
Fcnn linear_drift_net(std::size_t d, double m);

struct CompositeParams {
    double r = 1.0;          // radius of the l1 ball where local_net is accurate
    double m = 1.0;
    double M = 1.0;
    double eps = 0.1;        // in (0,1)
    double lip_bound = 0.0;  // Lipschitz bound of the cutoff net; <= 0 computes it
};

struct CompositeInfo {
    double b = 0.0;          // outer radius of the indicator slope
    double clamp = 0.0;      // r * sqrt(M^2 - m^2)
    double lip_bound = 0.0;
    double mult_tolerance = 0.0;  // per-entry tolerance of the product stage
};

/// local_net approximates the residual -grad V(x) + m x on B1_r.
/// Result realizes indicator(x) * cutoff(local_net)(x) - m x (products approximate).
Fcnn composite_drift_net(const Fcnn& local_net, const CompositeParams& p, CompositeInfo* info = nullptr);

}  // namespace lresnet
