#include "pslmorl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace pslmorl {

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation act) {
    switch (act) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

void validate_spec(const std::vector<LayerSpec>& spec) {
    if (spec.empty()) throw std::invalid_argument("layer spec is empty");
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec[i].in_dim < 1 || spec[i].out_dim < 1) {
            throw std::invalid_argument("layer " + std::to_string(i) +
                                        ": dimensions must be >= 1");
        }
        if (i > 0 && spec[i].in_dim != spec[i - 1].out_dim) {
            throw std::invalid_argument("layer " + std::to_string(i) +
                                        ": in_dim does not chain with previous out_dim");
        }
    }
}

std::size_t flat_size(const std::vector<LayerSpec>& spec) {
    std::size_t n = 0;
    for (const auto& l : spec) {
        n += static_cast<std::size_t>(l.out_dim) * l.in_dim + l.out_dim;
    }
    return n;
}

MlpParams MlpParams::zeros(const std::vector<LayerSpec>& spec) {
    validate_spec(spec);
    MlpParams p;
    p.layers.reserve(spec.size());
    for (const auto& s : spec) {
        Layer l;
        l.weight = Matrix::Zero(s.out_dim, s.in_dim);
        l.bias = Vector::Zero(s.out_dim);
        l.act = s.act;
        p.layers.push_back(std::move(l));
    }
    return p;
}

MlpParams MlpParams::init(const std::vector<LayerSpec>& spec, Rng& rng) {
    MlpParams p = zeros(spec);
    for (auto& l : p.layers) {
        const double fan_in = static_cast<double>(l.weight.cols());
        const double fan_out = static_cast<double>(l.weight.rows());
        const double limit = l.act == Activation::Relu
                                 ? std::sqrt(6.0 / fan_in)
                                 : std::sqrt(6.0 / (fan_in + fan_out));
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
                l.weight(r, c) = rng.uniform(-limit, limit);
            }
        }
    }
    return p;
}

std::vector<LayerSpec> MlpParams::spec() const {
    std::vector<LayerSpec> s;
    s.reserve(layers.size());
    for (const auto& l : layers) {
        s.push_back({static_cast<int>(l.weight.cols()),
                     static_cast<int>(l.weight.rows()), l.act});
    }
    return s;
}

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

bool MlpParams::all_finite() const {
    for (const auto& l : layers) {
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

namespace {

inline void apply_activation(Activation act, const Vector& z, Vector& out) {
    switch (act) {
        case Activation::Relu: out = z.cwiseMax(0.0); break;
        case Activation::Tanh: out = z.array().tanh(); break;
        case Activation::Identity: out = z; break;
    }
}

// Derivative through the activation, expressed with the pre-activation z and
// activation value a. relu'(0) is taken as 0.
inline Vector activation_grad(Activation act, const Vector& z, const Vector& a,
                              const Vector& upstream) {
    switch (act) {
        case Activation::Relu:
            return (z.array() > 0.0).select(upstream, Vector::Zero(upstream.size()));
        case Activation::Tanh:
            return (upstream.array() * (1.0 - a.array().square())).matrix();
        case Activation::Identity:
            return upstream;
    }
    return upstream;
}

}  // namespace

Vector mlp_forward(const MlpParams& params, const Vector& input, MlpTape* tape) {
    if (params.layers.empty()) throw std::invalid_argument("empty network");
    if (input.size() != params.input_dim()) {
        throw std::invalid_argument("input length " + std::to_string(input.size()) +
                                    " does not match first layer in_dim " +
                                    std::to_string(params.input_dim()));
    }
    if (tape) {
        tape->input = input;
        tape->pre.assign(params.layers.size(), Vector());
        tape->post.assign(params.layers.size(), Vector());
    }
    Vector x = input;
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        const Layer& l = params.layers[i];
        Vector z = l.weight * x + l.bias;
        Vector a;
        apply_activation(l.act, z, a);
        if (tape) {
            tape->pre[i] = z;
            tape->post[i] = a;
        }
        x = std::move(a);
    }
    return x;
}

Gradients Gradients::zeros_like(const MlpParams& params) {
    Gradients g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        Layer gl;
        gl.weight = Matrix::Zero(l.weight.rows(), l.weight.cols());
        gl.bias = Vector::Zero(l.bias.size());
        gl.act = l.act;
        g.layers.push_back(std::move(gl));
    }
    return g;
}

void Gradients::set_zero() {
    for (auto& l : layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
    accum_count = 0;
}

void Gradients::add_scaled(const Gradients& other, double scale) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].weight += scale * other.layers[i].weight;
        layers[i].bias += scale * other.layers[i].bias;
    }
    accum_count += other.accum_count;
}

void Gradients::scale(double factor) {
    for (auto& l : layers) {
        l.weight *= factor;
        l.bias *= factor;
    }
}

double Gradients::squared_norm() const {
    double n = 0.0;
    for (const auto& l : layers) {
        n += l.weight.squaredNorm() + l.bias.squaredNorm();
    }
    return n;
}

Vector mlp_backward(const MlpParams& params, const MlpTape& tape,
                    const Vector& grad_output, Gradients& grads) {
    const std::size_t n = params.layers.size();
    if (tape.pre.size() != n || tape.post.size() != n ||
        tape.input.size() != params.input_dim()) {
        throw std::invalid_argument("tape does not match network shape");
    }
    if (grads.layers.size() != n) {
        throw std::invalid_argument("gradient accumulator does not match network");
    }
    if (grad_output.size() != params.output_dim()) {
        throw std::invalid_argument("grad_output length does not match output dim");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (tape.pre[i].size() != params.layers[i].bias.size()) {
            throw std::invalid_argument("tape layer " + std::to_string(i) +
                                        " does not match network shape");
        }
    }

    Vector delta = grad_output;
    for (std::size_t i = n; i-- > 0;) {
        const Layer& l = params.layers[i];
        Vector dz = activation_grad(l.act, tape.pre[i], tape.post[i], delta);
        const Vector& layer_input = i == 0 ? tape.input : tape.post[i - 1];
        grads.layers[i].weight.noalias() += dz * layer_input.transpose();
        grads.layers[i].bias += dz;
        delta.noalias() = l.weight.transpose() * dz;
    }
    grads.accum_count += 1;
    return delta;
}

std::vector<TensorShape> shape_table_for(const std::vector<LayerSpec>& spec) {
    std::vector<TensorShape> table;
    table.reserve(spec.size() * 2);
    std::size_t offset = 0;
    for (const auto& s : spec) {
        table.push_back({offset, s.out_dim, s.in_dim});
        offset += static_cast<std::size_t>(s.out_dim) * s.in_dim;
        table.push_back({offset, s.out_dim, 1});
        offset += s.out_dim;
    }
    return table;
}

namespace {

FlatParams flatten_layers(const std::vector<Layer>& layers) {
    FlatParams flat;
    std::size_t total = 0;
    for (const auto& l : layers) total += l.weight.size() + l.bias.size();
    flat.data.resize(static_cast<Eigen::Index>(total));
    flat.shape_table.reserve(layers.size() * 2);
    std::size_t offset = 0;
    for (const auto& l : layers) {
        const std::size_t wn = l.weight.size();
        flat.shape_table.push_back({offset, static_cast<int>(l.weight.rows()),
                                    static_cast<int>(l.weight.cols())});
        std::copy(l.weight.data(), l.weight.data() + wn, flat.data.data() + offset);
        offset += wn;
        flat.shape_table.push_back({offset, static_cast<int>(l.bias.size()), 1});
        std::copy(l.bias.data(), l.bias.data() + l.bias.size(),
                  flat.data.data() + offset);
        offset += l.bias.size();
    }
    return flat;
}

}  // namespace

FlatParams flatten(const MlpParams& params) { return flatten_layers(params.layers); }

FlatParams flatten(const Gradients& grads) { return flatten_layers(grads.layers); }

MlpParams unflatten(const FlatParams& flat, const std::vector<LayerSpec>& spec) {
    validate_spec(spec);
    if (static_cast<std::size_t>(flat.data.size()) != flat_size(spec)) {
        throw std::invalid_argument(
            "flat data length " + std::to_string(flat.data.size()) +
            " does not match spec size " + std::to_string(flat_size(spec)));
    }
    if (!flat.shape_table.empty()) {
        const auto expect = shape_table_for(spec);
        if (flat.shape_table.size() != expect.size()) {
            throw std::invalid_argument("shape table does not match spec");
        }
        for (std::size_t i = 0; i < expect.size(); ++i) {
            if (flat.shape_table[i].offset != expect[i].offset ||
                flat.shape_table[i].rows != expect[i].rows ||
                flat.shape_table[i].cols != expect[i].cols) {
                throw std::invalid_argument("shape table entry " + std::to_string(i) +
                                            " does not match spec");
            }
        }
    }
    MlpParams p = MlpParams::zeros(spec);
    std::size_t offset = 0;
    for (auto& l : p.layers) {
        std::copy(flat.data.data() + offset, flat.data.data() + offset + l.weight.size(),
                  l.weight.data());
        offset += l.weight.size();
        std::copy(flat.data.data() + offset, flat.data.data() + offset + l.bias.size(),
                  l.bias.data());
        offset += l.bias.size();
    }
    return p;
}

Gradients gradients_from_flat(const FlatParams& flat, const std::vector<LayerSpec>& spec) {
    MlpParams p = unflatten(flat, spec);
    Gradients g;
    g.layers = std::move(p.layers);
    g.accum_count = 1;
    return g;
}

}  // namespace pslmorl
