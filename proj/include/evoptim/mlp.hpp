#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "evoptim/batch.hpp"
#include "evoptim/error.hpp"
#include "evoptim/params.hpp"

namespace evoptim {

enum class Activation { Relu, Tanh };
enum class OutputKind { SoftmaxCrossEntropy, MeanSquare };

/// Fully connected feedforward net over a flat ParamVector.
///
/// Parameter layout, layer by layer: first the weight block of layer l as a
/// row-major (n_l x n_{l+1}) matrix (entry [i*n_out + j] connects input i to
/// output j), then the n_{l+1} biases. Hidden layers apply their activation;
/// the last layer is linear and feeds the output head.
struct MlpShape {
  std::vector<std::size_t> layer_sizes;        // [d_in, h1, ..., d_out]
  std::vector<Activation> hidden_activations;  // one per hidden layer
  OutputKind output = OutputKind::SoftmaxCrossEntropy;

  MlpShape() = default;
  MlpShape(std::vector<std::size_t> sizes, Activation act, OutputKind out)
      : layer_sizes(std::move(sizes)), output(out) {
    hidden_activations.assign(hidden_layer_count(), act);
  }

  std::size_t hidden_layer_count() const {
    return layer_sizes.size() >= 2 ? layer_sizes.size() - 2 : 0;
  }

  std::size_t weight_layer_count() const {
    return layer_sizes.size() >= 2 ? layer_sizes.size() - 1 : 0;
  }

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
      n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
    }
    return n;
  }

  void validate() const {
    if (layer_sizes.size() < 2) {
      throw ConfigError("MlpShape: need at least input and output layers");
    }
    for (std::size_t s : layer_sizes) {
      if (s == 0) throw ConfigError("MlpShape: zero-width layer");
    }
    if (hidden_activations.size() != hidden_layer_count()) {
      throw ConfigError("MlpShape: expected " + std::to_string(hidden_layer_count()) +
                        " hidden activations, got " +
                        std::to_string(hidden_activations.size()));
    }
  }

  /// Fresh parameters. FanInScaled draws each layer block (weights and
  /// biases) with standard deviation 1/sqrt(n_l); StandardNormal draws every
  /// entry from N(0,1).
  ParamVector init_params(InitScheme scheme, RngStream& rng) const {
    validate();
    ParamVector w;
    w.reserve(param_count());
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
      const std::size_t block = layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
      ParamVector part = evoptim::init_params(block, scheme, rng, layer_sizes[l]);
      w.insert(w.end(), part.begin(), part.end());
    }
    return w;
  }
};

namespace detail {

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
  }
  return z;
}

// Derivative expressed through the activation value; relu's subgradient at 0
// is taken as 0.
inline double activate_deriv(Activation a, double value) {
  switch (a) {
    case Activation::Relu: return value > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - value * value;
  }
  return 1.0;
}

inline void check_mlp_inputs(const MlpShape& shape, const ParamVector& w,
                             const Batch& batch) {
  shape.validate();
  if (w.size() != shape.param_count()) {
    throw ShapeError("mlp: parameter vector has " + std::to_string(w.size()) +
                     " entries, shape needs " + std::to_string(shape.param_count()));
  }
  if (batch.rows == 0) throw ShapeError("mlp: empty batch");
  if (batch.feature_cols != shape.input_dim()) {
    throw ShapeError("mlp: batch features have width " +
                     std::to_string(batch.feature_cols) + ", net expects " +
                     std::to_string(shape.input_dim()));
  }
  if (shape.output == OutputKind::SoftmaxCrossEntropy) {
    if (batch.labels.size() != batch.rows) {
      throw ShapeError("mlp: softmax head needs one class label per row");
    }
    for (std::size_t r = 0; r < batch.rows; ++r) {
      if (batch.labels[r] < 0 ||
          static_cast<std::size_t>(batch.labels[r]) >= shape.output_dim()) {
        throw ShapeError("mlp: label out of range at row " + std::to_string(r));
      }
    }
  } else {
    if (batch.target_cols != shape.output_dim() ||
        batch.targets.size() != batch.rows * batch.target_cols) {
      throw ShapeError("mlp: mean-square head needs rows x output_dim targets");
    }
  }
}

// Forward pass plus (optionally) backprop of the mean per-instance batch
// loss. Activations are kept per layer; gradient layout mirrors the
// parameter layout exactly.
inline double mlp_eval(const MlpShape& shape, const ParamVector& w,
                       const Batch& batch, ParamVector* grad_out,
                       std::vector<double>* outputs_out = nullptr) {
  check_mlp_inputs(shape, w, batch);
  const std::size_t layers = shape.weight_layer_count();
  const std::size_t rows = batch.rows;

  // offsets of each layer's weight block within w
  std::vector<std::size_t> offset(layers);
  {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      offset[l] = off;
      off += shape.layer_sizes[l] * shape.layer_sizes[l + 1] + shape.layer_sizes[l + 1];
    }
  }

  std::vector<std::vector<double>> act(layers + 1);
  act[0] = batch.features;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t n_in = shape.layer_sizes[l];
    const std::size_t n_out = shape.layer_sizes[l + 1];
    const double* weights = w.data() + offset[l];
    const double* bias = weights + n_in * n_out;
    std::vector<double>& out = act[l + 1];
    out.assign(rows * n_out, 0.0);
    const std::vector<double>& in = act[l];
    for (std::size_t r = 0; r < rows; ++r) {
      double* zr = out.data() + r * n_out;
      const double* ar = in.data() + r * n_in;
      for (std::size_t j = 0; j < n_out; ++j) zr[j] = bias[j];
      for (std::size_t i = 0; i < n_in; ++i) {
        const double a = ar[i];
        if (a == 0.0) continue;
        const double* wrow = weights + i * n_out;
        for (std::size_t j = 0; j < n_out; ++j) zr[j] += a * wrow[j];
      }
      if (l + 1 < layers) {
        const Activation hact = shape.hidden_activations[l];
        for (std::size_t j = 0; j < n_out; ++j) zr[j] = activate(hact, zr[j]);
      }
    }
  }

  // output head: loss and dL/dZ for the last layer
  const std::size_t d_out = shape.output_dim();
  std::vector<double>& z = act[layers];
  if (outputs_out) *outputs_out = z;
  double loss = 0.0;
  std::vector<double> dz;
  if (grad_out) dz.assign(rows * d_out, 0.0);

  if (shape.output == OutputKind::SoftmaxCrossEntropy) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* zr = z.data() + r * d_out;
      const double zmax = *std::max_element(zr, zr + d_out);
      double sum = 0.0;
      for (std::size_t j = 0; j < d_out; ++j) sum += std::exp(zr[j] - zmax);
      const double lse = zmax + std::log(sum);
      loss += lse - zr[batch.labels[r]];
      if (grad_out) {
        double* dr = dz.data() + r * d_out;
        for (std::size_t j = 0; j < d_out; ++j) {
          dr[j] = std::exp(zr[j] - lse) / static_cast<double>(rows);
        }
        dr[batch.labels[r]] -= 1.0 / static_cast<double>(rows);
      }
    }
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* zr = z.data() + r * d_out;
      const double* tr = batch.targets.data() + r * d_out;
      for (std::size_t j = 0; j < d_out; ++j) {
        const double diff = zr[j] - tr[j];
        loss += 0.5 * diff * diff;
        if (grad_out) dz[r * d_out + j] = diff / static_cast<double>(rows);
      }
    }
  }
  loss /= static_cast<double>(rows);
  if (!std::isfinite(loss)) {
    throw NumericError("mlp: non-finite loss (activations overflowed?)");
  }
  if (!grad_out) return loss;

  // backprop
  ParamVector& grad = *grad_out;
  grad.assign(w.size(), 0.0);
  std::vector<double> delta = std::move(dz);  // dL/dZ of layer being processed
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t n_in = shape.layer_sizes[l];
    const std::size_t n_out = shape.layer_sizes[l + 1];
    const double* weights = w.data() + offset[l];
    double* gw = grad.data() + offset[l];
    double* gb = gw + n_in * n_out;
    const std::vector<double>& in = act[l];
    for (std::size_t r = 0; r < rows; ++r) {
      const double* dr = delta.data() + r * n_out;
      const double* ar = in.data() + r * n_in;
      for (std::size_t j = 0; j < n_out; ++j) gb[j] += dr[j];
      for (std::size_t i = 0; i < n_in; ++i) {
        const double a = ar[i];
        if (a == 0.0) continue;
        double* gwrow = gw + i * n_out;
        for (std::size_t j = 0; j < n_out; ++j) gwrow[j] += a * dr[j];
      }
    }
    if (l == 0) break;
    // delta for the previous layer: (delta . W^T) * act'(a)
    std::vector<double> prev(rows * n_in, 0.0);
    const Activation hact = shape.hidden_activations[l - 1];
    for (std::size_t r = 0; r < rows; ++r) {
      const double* dr = delta.data() + r * n_out;
      const double* ar = in.data() + r * n_in;
      double* pr = prev.data() + r * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        const double* wrow = weights + i * n_out;
        double s = 0.0;
        for (std::size_t j = 0; j < n_out; ++j) s += dr[j] * wrow[j];
        pr[i] = s * activate_deriv(hact, ar[i]);
      }
    }
    delta = std::move(prev);
  }
  return loss;
}

}  // namespace detail

/// Mean per-instance loss of the batch.
inline double mlp_loss(const MlpShape& shape, const ParamVector& w, const Batch& batch) {
  return detail::mlp_eval(shape, w, batch, nullptr);
}

/// Mean batch loss and its gradient with respect to w (backpropagation).
inline double mlp_loss_and_grad(const MlpShape& shape, const ParamVector& w,
                                const Batch& batch, ParamVector& grad) {
  return detail::mlp_eval(shape, w, batch, &grad);
}

/// Raw last-layer outputs (logits for the softmax head), rows x output_dim.
inline std::vector<double> mlp_outputs(const MlpShape& shape, const ParamVector& w,
                                       const Batch& batch) {
  std::vector<double> out;
  detail::mlp_eval(shape, w, batch, nullptr, &out);
  return out;
}

/// Fraction of rows whose argmax output matches the label.
inline double mlp_accuracy(const MlpShape& shape, const ParamVector& w, const Batch& batch) {
  if (shape.output != OutputKind::SoftmaxCrossEntropy) {
    throw ConfigError("mlp_accuracy: only defined for the softmax head");
  }
  const std::vector<double> out = mlp_outputs(shape, w, batch);
  const std::size_t d_out = shape.output_dim();
  std::size_t correct = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const double* zr = out.data() + r * d_out;
    const std::size_t pred =
        static_cast<std::size_t>(std::max_element(zr, zr + d_out) - zr);
    if (pred == static_cast<std::size_t>(batch.labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.rows);
}

}  // namespace evoptim
