// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matrix_types.hpp"

namespace dualmc {

enum class Activation { sigmoid, tanh, relu };

Activation activation_from_string(const std::string& name);
const char* activation_name(Activation a);

/// One branch of the two-branch completion network: an MLP whose weight
/// stack is evaluated twice per forward pass, once with the nonlinear
/// activation at every layer and once purely affine, through the SAME
/// weights and biases. layer_dims = [d_0, d_1, ..., d_{L+1}] gives L hidden
/// layers and L+1 weight layers; weights[l] is d_{l+1} x d_l.
struct BranchNetwork {
  std::vector<Index> layer_dims;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation activation = Activation::sigmoid;

  Index input_dim() const { return layer_dims.front(); }
  Index output_dim() const { return layer_dims.back(); }
  std::size_t layer_count() const { return weights.size(); }
};

/// Fan-scaled symmetric uniform initialization: weights[l] i.i.d. uniform on
/// [-s, s] with s = sqrt(6 / (fan_in + fan_out)); biases zero.
BranchNetwork init_branch(const std::vector<Index>& layer_dims, Activation activation,
                          std::uint64_t seed);

/// Which of the two shared-weight paths participate. Disabling a path makes
/// its output identically zero and removes its gradient contribution.
enum class PathMode { both, nonlinear_only, linear_only };

struct DualForwardCache {
  Matrix input;
  std::vector<Matrix> pre_activations;  // nonlinear path z^l
  std::vector<Matrix> activations;      // nonlinear path a^l = sigma(z^l)
  std::vector<Matrix> linear_values;    // affine path value after layer l
  PathMode mode = PathMode::both;
};

struct DualForward {
  Matrix nonlinear_out;
  Matrix linear_out;
  DualForwardCache cache;
};

/// Evaluates both paths on an input_dim x k batch. The branch reconstruction
/// is nonlinear_out + linear_out.
DualForward forward_dual(const BranchNetwork& net, const Matrix& input,
                         PathMode mode = PathMode::both);

/// weights[L] * weights[L-1] * ... * weights[0], biases excluded. For the
/// column branch this is the row latent factor estimate; transposed for the
/// row branch it estimates the column factors.
Matrix weight_product(const BranchNetwork& net);

struct BranchGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Matrix input;

  static BranchGradients zeros_like(const BranchNetwork& net);
  void add_scaled(const BranchGradients& other, double scale);
};

/// Backpropagates upstream = dLoss/d(branch reconstruction) through both
/// paths. Each weight and bias receives the sum of the nonlinear-path and
/// affine-path contributions; bias gradients are the row sums of the layer
/// deltas.
BranchGradients backward_dual(const BranchNetwork& net, const DualForwardCache& cache,
                              const Matrix& upstream);

struct ManifoldGradients {
  std::vector<Matrix> col_weights;
  std::vector<Matrix> row_weights;
};

/// Gradients of the masked factorization residual 0.5*||I.(Y - Pc*Pr^T)||^2
/// (already folded into `residual` by the caller, residual = scale *
/// I.(Pc*Pr^T - Y)) with respect to every weight layer of both branches.
/// Biases take no gradient from this loss.
ManifoldGradients manifold_gradients(const BranchNetwork& col_net,
                                     const BranchNetwork& row_net,
                                     const Matrix& residual);

// Checkpoint: versioned textual dump of layer_dims, activation, weights and
// biases in row-major order.
void save_branch(const BranchNetwork& net, const std::string& path);
BranchNetwork load_branch(const std::string& path);

}  // namespace dualmc
