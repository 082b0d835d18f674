#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pslmorl/rng.hpp"

namespace pslmorl {

using Vector = Eigen::VectorXd;
// Row-major so that flattening a weight matrix is a straight memory copy.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { Relu, Tanh, Identity };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation act);

struct LayerSpec {
    int in_dim = 0;
    int out_dim = 0;
    Activation act = Activation::Identity;
};

// Throws std::invalid_argument if dims are non-positive or consecutive layers
// do not chain.
void validate_spec(const std::vector<LayerSpec>& spec);
std::size_t flat_size(const std::vector<LayerSpec>& spec);

struct Layer {
    Matrix weight;  // out_dim x in_dim
    Vector bias;    // out_dim
    Activation act = Activation::Identity;
};

struct MlpParams {
    std::vector<Layer> layers;

    static MlpParams zeros(const std::vector<LayerSpec>& spec);
    // He-uniform for relu layers, Xavier-uniform otherwise; biases zero.
    static MlpParams init(const std::vector<LayerSpec>& spec, Rng& rng);

    int input_dim() const { return layers.front().weight.cols(); }
    int output_dim() const { return layers.back().weight.rows(); }
    std::vector<LayerSpec> spec() const;
    std::size_t param_count() const;
    bool all_finite() const;
};

// Activation cache from a forward pass; consumed by mlp_backward.
struct MlpTape {
    Vector input;
    std::vector<Vector> pre;   // pre-activations per layer
    std::vector<Vector> post;  // activations per layer; post.back() is the output
};

Vector mlp_forward(const MlpParams& params, const Vector& input, MlpTape* tape = nullptr);

// Parameter gradients, shaped exactly like the network they differentiate.
struct Gradients {
    std::vector<Layer> layers;
    long accum_count = 0;

    static Gradients zeros_like(const MlpParams& params);
    void set_zero();
    void add_scaled(const Gradients& other, double scale);
    void scale(double factor);
    double squared_norm() const;
};

// Accumulates d(grad_output . output)/d(params) into `grads` and returns the
// gradient with respect to the input. Throws std::invalid_argument when the
// tape or grad_output does not match `params`.
Vector mlp_backward(const MlpParams& params, const MlpTape& tape,
                    const Vector& grad_output, Gradients& grads);

struct TensorShape {
    std::size_t offset = 0;
    int rows = 0;
    int cols = 0;  // 1 for bias vectors
};

// Flattened parameter vector: per layer, the row-major weight matrix followed
// by the bias, layers in declaration order.
struct FlatParams {
    Vector data;
    std::vector<TensorShape> shape_table;
};

std::vector<TensorShape> shape_table_for(const std::vector<LayerSpec>& spec);

FlatParams flatten(const MlpParams& params);
FlatParams flatten(const Gradients& grads);
MlpParams unflatten(const FlatParams& flat, const std::vector<LayerSpec>& spec);
Gradients gradients_from_flat(const FlatParams& flat, const std::vector<LayerSpec>& spec);

}  // namespace pslmorl
