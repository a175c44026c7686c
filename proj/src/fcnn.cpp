#include "lresnet/fcnn.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lresnet {

using json = nlohmann::json;

Fcnn::Fcnn(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.size() < 2)
        throw std::invalid_argument("Fcnn needs at least two affine maps");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& L = layers_[l];
        if (L.A.rows() == 0 || L.A.cols() == 0)
            throw std::invalid_argument("Fcnn layer with empty matrix");
        if (L.b.size() != L.A.rows())
            throw std::invalid_argument("Fcnn bias length does not match rows");
        if (l > 0 && L.A.cols() != layers_[l - 1].A.rows())
            throw std::invalid_argument("Fcnn layers are not dimension-compatible");
        if (!L.A.allFinite() || !L.b.allFinite())
            throw std::invalid_argument("Fcnn entries must be finite");
    }
}

Vec realize(const Fcnn& net, const Vec& x) {
    if (static_cast<std::size_t>(x.size()) != net.input_dim())
        throw std::invalid_argument("realize: input dimension mismatch");
    const auto& layers = net.layers();
    Vec cur = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Mat& A = layers[l].A;
        const Vec& b = layers[l].b;
        const bool last = l + 1 == layers.size();
        Vec next(A.rows());
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < A.cols(); ++j) s += A(i, j) * cur(j);
            s += b(i);
            next(i) = last ? s : std::max(s, 0.0);
        }
        cur.swap(next);
    }
    return cur;
}

Cloud realize_batch(const Fcnn& net, const Cloud& X) {
    if (static_cast<std::size_t>(X.cols()) != net.input_dim())
        throw std::invalid_argument("realize_batch: input dimension mismatch");
    const auto& layers = net.layers();
    Cloud H = X;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Cloud Z = H * layers[l].A.transpose();
        Z.rowwise() += layers[l].b.transpose();
        if (l + 1 < layers.size()) Z = Z.cwiseMax(0.0);
        H.swap(Z);
    }
    return H;
}

ParamCount param_count(const Fcnn& net) {
    ParamCount pc;
    for (const auto& L : net.layers()) {
        pc.nonzero += (L.A.array() != 0.0).count() + (L.b.array() != 0.0).count();
        pc.dense += L.A.rows() * (L.A.cols() + 1);
    }
    return pc;
}

std::size_t depth(const Fcnn& net) { return net.layers().size() - 1; }

namespace {

Mat stack_pm(Eigen::Index k) {  // [I; -I]
    Mat S = Mat::Zero(2 * k, k);
    S.topRows(k).setIdentity();
    S.bottomRows(k) = -Mat::Identity(k, k);
    return S;
}

Mat relay(Eigen::Index k) {  // [[I,-I],[-I,I]] keeps (relu(y), relu(-y))
    Mat R(2 * k, 2 * k);
    R << Mat::Identity(k, k), -Mat::Identity(k, k), -Mat::Identity(k, k), Mat::Identity(k, k);
    return R;
}

Mat merge_pm(Eigen::Index k) {  // [I, -I]
    Mat P(k, 2 * k);
    P << Mat::Identity(k, k), -Mat::Identity(k, k);
    return P;
}

}  // namespace

Fcnn pad_depth(const Fcnn& net, std::size_t target_depth) {
    const std::size_t cur = depth(net);
    if (target_depth < cur) throw std::invalid_argument("pad_depth: target below current depth");
    if (target_depth == cur) return net;
    const std::size_t p = target_depth - cur;
    const Eigen::Index d = net.input_dim();
    const Eigen::Index k = net.output_dim();
    std::vector<Layer> out;
    if (d < k) {
        out.push_back({stack_pm(d), Vec::Zero(2 * d)});
        for (std::size_t i = 1; i < p; ++i) out.push_back({relay(d), Vec::Zero(2 * d)});
        const Layer& first = net.layers().front();
        Mat A(first.A.rows(), 2 * d);
        A << first.A, -first.A;
        out.push_back({A, first.b});
        for (std::size_t l = 1; l < net.layers().size(); ++l) out.push_back(net.layers()[l]);
    } else {
        for (std::size_t l = 0; l + 1 < net.layers().size(); ++l) out.push_back(net.layers()[l]);
        const Layer& last = net.layers().back();
        Mat A(2 * k, last.A.cols());
        A << last.A, -last.A;
        Vec b(2 * k);
        b << last.b, -last.b;
        out.push_back({A, b});
        for (std::size_t i = 1; i < p; ++i) out.push_back({relay(k), Vec::Zero(2 * k)});
        out.push_back({merge_pm(k), Vec::Zero(k)});
    }
    return Fcnn(std::move(out));
}

namespace {

Fcnn stack_networks(const std::vector<Fcnn>& nets, bool sum_outputs) {
    if (nets.empty()) throw std::invalid_argument("empty network list");
    const std::size_t d = nets.front().input_dim();
    std::size_t L = 0;
    for (const auto& n : nets) {
        if (n.input_dim() != d) throw std::invalid_argument("networks must share input_dim");
        if (sum_outputs && n.output_dim() != nets.front().output_dim())
            throw std::invalid_argument("summed networks must share output_dim");
        L = std::max(L, depth(n));
    }
    std::vector<Fcnn> padded;
    padded.reserve(nets.size());
    for (const auto& n : nets) padded.push_back(pad_depth(n, L));

    std::vector<Layer> out(L + 1);
    for (std::size_t l = 0; l <= L; ++l) {
        Eigen::Index rows = 0, cols = 0;
        for (const auto& n : padded) {
            rows += n.layers()[l].A.rows();
            cols += n.layers()[l].A.cols();
        }
        if (l == 0) cols = d;
        const bool last = l == L;
        if (last && sum_outputs) rows = nets.front().output_dim();
        Mat A = Mat::Zero(rows, cols);
        Vec b = Vec::Zero(rows);
        Eigen::Index r0 = 0, c0 = 0;
        for (const auto& n : padded) {
            const Layer& src = n.layers()[l];
            const Eigen::Index r = last && sum_outputs ? 0 : r0;
            const Eigen::Index c = l == 0 ? 0 : c0;
            A.block(r, c, src.A.rows(), src.A.cols()) = src.A;
            b.segment(r, src.b.size()) += src.b;
            r0 += src.A.rows();
            c0 += src.A.cols();
        }
        out[l] = {std::move(A), std::move(b)};
    }
    return Fcnn(std::move(out));
}

}  // namespace

Fcnn sum_networks(const std::vector<Fcnn>& nets) { return stack_networks(nets, true); }

Fcnn parallelize(const std::vector<Fcnn>& nets) { return stack_networks(nets, false); }

Fcnn concatenate(const Fcnn& outer, const Fcnn& inner) {
    if (inner.output_dim() != outer.input_dim())
        throw std::invalid_argument("concatenate: inner output_dim != outer input_dim");
    std::vector<Layer> out;
    const auto& in = inner.layers();
    const auto& ou = outer.layers();
    for (std::size_t l = 0; l + 1 < in.size(); ++l) out.push_back(in[l]);
    Mat A = ou.front().A * in.back().A;
    Vec b = ou.front().A * in.back().b + ou.front().b;
    out.push_back({std::move(A), std::move(b)});
    for (std::size_t l = 1; l < ou.size(); ++l) out.push_back(ou[l]);
    return Fcnn(std::move(out));
}

Fcnn scale_output(const Fcnn& net, double s) {
    std::vector<Layer> out = net.layers();
    out.back().A *= s;
    out.back().b *= s;
    return Fcnn(std::move(out));
}

Fcnn scale_last_layer(const Fcnn& net, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("scale_last_layer: h must be positive");
    return scale_output(net, h);
}

double lipschitz_upper_bound(const Fcnn& net) {
    double lip = 1.0;
    for (const auto& L : net.layers()) {
        Eigen::JacobiSVD<Mat> svd(L.A);
        lip *= svd.singularValues()(0);
    }
    return lip;
}

std::string to_json_string(const Fcnn& net) {
    json layers = json::array();
    for (const auto& L : net.layers()) {
        json A = json::array();
        for (Eigen::Index i = 0; i < L.A.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < L.A.cols(); ++j) row.push_back(L.A(i, j));
            A.push_back(std::move(row));
        }
        json b = json::array();
        for (Eigen::Index i = 0; i < L.b.size(); ++i) b.push_back(L.b(i));
        layers.push_back({{"A", std::move(A)}, {"b", std::move(b)}});
    }
    return json{{"layers", std::move(layers)}}.dump();
}

Fcnn fcnn_from_json_string(const std::string& text) {
    const json doc = json::parse(text);
    std::vector<Layer> layers;
    for (const auto& jl : doc.at("layers")) {
        const auto& jA = jl.at("A");
        const auto& jb = jl.at("b");
        const Eigen::Index rows = jA.size();
        const Eigen::Index cols = rows ? jA.at(0).size() : 0;
        Layer L{Mat(rows, cols), Vec(jb.size())};
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (static_cast<Eigen::Index>(jA.at(i).size()) != cols)
                throw std::invalid_argument("ragged weight matrix");
            for (Eigen::Index j = 0; j < cols; ++j) L.A(i, j) = jA.at(i).at(j).get<double>();
        }
        for (Eigen::Index i = 0; i < L.b.size(); ++i) L.b(i) = jb.at(i).get<double>();
        layers.push_back(std::move(L));
    }
    return Fcnn(std::move(layers));
}

void save_fcnn(const Fcnn& net, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << to_json_string(net) << '\n';
}

Fcnn load_fcnn(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return fcnn_from_json_string(ss.str());
}

}  // namespace lresnet
