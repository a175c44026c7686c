#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lresnet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Particle clouds and batches: one sample per row.
using Cloud = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Layer {
    Mat A;
    Vec b;
};

struct ParamCount {
    std::size_t nonzero = 0;
    std::size_t dense = 0;
};

/// Fully connected ReLU network ((A_0,b_0),...,(A_L,b_L)).
/// ReLU follows every affine map except the last one.
class Fcnn {
public:
    Fcnn() = default;
    explicit Fcnn(std::vector<Layer> layers);

    const std::vector<Layer>& layers() const { return layers_; }
    std::size_t input_dim() const { return layers_.front().A.cols(); }
    std::size_t output_dim() const { return layers_.back().A.rows(); }
    bool empty() const { return layers_.empty(); }

private:
    std::vector<Layer> layers_;
};

/// Forward pass for one input. Dot products are accumulated left to right
/// over columns, so structurally mirrored neurons give bit-identical values.
Vec realize(const Fcnn& net, const Vec& x);

/// Forward pass for a batch (rows). Uses Eigen products; results may differ
/// from realize() in the last bits.
Cloud realize_batch(const Fcnn& net, const Cloud& X);

ParamCount param_count(const Fcnn& net);

/// Number of activated hidden layers (affine maps minus one).
std::size_t depth(const Fcnn& net);

/// Extends a network to the given depth with identity blocks of width
/// 2*min(input_dim, output_dim); realization is unchanged.
Fcnn pad_depth(const Fcnn& net, std::size_t target_depth);

/// Pointwise sum of networks sharing input and output dimensions.
Fcnn sum_networks(const std::vector<Fcnn>& nets);

/// Shared-input stacking; outputs are concatenated in list order.
Fcnn parallelize(const std::vector<Fcnn>& nets);

/// outer o inner, merging inner's last affine map into outer's first.
/// depth = depth(inner) + depth(outer).
Fcnn concatenate(const Fcnn& outer, const Fcnn& inner);

/// Multiplies the last affine map by h > 0.
Fcnn scale_last_layer(const Fcnn& net, double h);

/// Same as scale_last_layer but any real factor (used for -m scalings).
Fcnn scale_output(const Fcnn& net, double s);

/// Product of the layer spectral norms.
double lipschitz_upper_bound(const Fcnn& net);

std::string to_json_string(const Fcnn& net);
Fcnn fcnn_from_json_string(const std::string& text);
void save_fcnn(const Fcnn& net, const std::string& path);
Fcnn load_fcnn(const std::string& path);

}  // namespace lresnet
