// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "branch.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "csv_io.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace dualmc {

Activation activation_from_string(const std::string& name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw Error(ErrorCode::invalid_argument,
              "unknown activation '" + name + "' (expected sigmoid, tanh or relu)");
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "?";
}

namespace {

Matrix apply_activation(Activation act, const Matrix& z) {
  switch (act) {
    case Activation::sigmoid:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::tanh:
      return z.array().tanh().matrix();
    case Activation::relu:
      return z.cwiseMax(0.0);
  }
  return z;
}

// Derivative in terms of the cached pre-activation z and activation a.
Matrix activation_derivative(Activation act, const Matrix& z, const Matrix& a) {
  switch (act) {
    case Activation::sigmoid:
      return (a.array() * (1.0 - a.array())).matrix();
    case Activation::tanh:
      return (1.0 - a.array().square()).matrix();
    case Activation::relu:
      return (z.array() > 0.0).cast<double>().matrix();
  }
  return Matrix::Ones(z.rows(), z.cols());
}

void check_dims(const std::vector<Index>& layer_dims) {
  require(layer_dims.size() >= 2, ErrorCode::invalid_argument,
          "branch needs at least input and output dimensions");
  for (Index d : layer_dims)
    require(d >= 1, ErrorCode::invalid_argument, "branch layer dimensions must be >= 1");
}

}  // namespace

BranchNetwork init_branch(const std::vector<Index>& layer_dims, Activation activation,
                          std::uint64_t seed) {
  check_dims(layer_dims);
  BranchNetwork net;
  net.layer_dims = layer_dims;
  net.activation = activation;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const Index fan_in = layer_dims[l];
    const Index fan_out = layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    // Row-major fill order, part of the determinism contract.
    for (Index i = 0; i < fan_out; ++i)
      for (Index j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

DualForward forward_dual(const BranchNetwork& net, const Matrix& input, PathMode mode) {
  require(input.rows() == net.input_dim(), ErrorCode::shape_mismatch,
          "forward_dual: input row count does not match the branch input width");
  const auto layers = net.layer_count();
  const Index k = input.cols();

  DualForward out;
  out.cache.input = input;
  out.cache.mode = mode;

  if (mode != PathMode::linear_only) {
    Matrix a = input;
    for (std::size_t l = 0; l < layers; ++l) {
      Matrix z = net.weights[l] * a + net.biases[l].replicate(1, k);
      a = apply_activation(net.activation, z);
      out.cache.pre_activations.push_back(std::move(z));
      out.cache.activations.push_back(a);
    }
    out.nonlinear_out = out.cache.activations.back();
  } else {
    out.nonlinear_out = Matrix::Zero(net.output_dim(), k);
  }

  if (mode != PathMode::nonlinear_only) {
    Matrix v = input;
    for (std::size_t l = 0; l < layers; ++l) {
      v = net.weights[l] * v + net.biases[l].replicate(1, k);
      out.cache.linear_values.push_back(v);
    }
    out.linear_out = out.cache.linear_values.back();
  } else {
    out.linear_out = Matrix::Zero(net.output_dim(), k);
  }

  return out;
}

Matrix weight_product(const BranchNetwork& net) {
  Matrix product = net.weights.back();
  for (std::size_t l = net.layer_count() - 1; l-- > 0;) product = product * net.weights[l];
  return product;
}

BranchGradients BranchGradients::zeros_like(const BranchNetwork& net) {
  BranchGradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  g.input = Matrix::Zero(net.input_dim(), 0);
  return g;
}

void BranchGradients::add_scaled(const BranchGradients& other, double scale) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += scale * other.weights[l];
    biases[l] += scale * other.biases[l];
  }
  if (input.size() == 0)
    input = scale * other.input;
  else
    input += scale * other.input;
}

BranchGradients backward_dual(const BranchNetwork& net, const DualForwardCache& cache,
                              const Matrix& upstream) {
  const auto layers = net.layer_count();
  require(upstream.rows() == net.output_dim(), ErrorCode::shape_mismatch,
          "backward_dual: upstream rows do not match the branch output width");
  require(upstream.cols() == cache.input.cols(), ErrorCode::shape_mismatch,
          "backward_dual: upstream batch width does not match the cached input");

  BranchGradients grads = BranchGradients::zeros_like(net);
  grads.input = Matrix::Zero(net.input_dim(), cache.input.cols());

  if (cache.mode != PathMode::linear_only) {
    require(cache.activations.size() == layers, ErrorCode::invalid_argument,
            "backward_dual: cache does not match the network");
    Matrix delta = upstream.cwiseProduct(activation_derivative(
        net.activation, cache.pre_activations[layers - 1], cache.activations[layers - 1]));
    for (std::size_t l = layers; l-- > 0;) {
      const Matrix& below = l == 0 ? cache.input : cache.activations[l - 1];
      grads.weights[l] += delta * below.transpose();
      grads.biases[l] += delta.rowwise().sum();
      if (l == 0) {
        grads.input += net.weights[0].transpose() * delta;
      } else {
        delta = (net.weights[l].transpose() * delta)
                    .cwiseProduct(activation_derivative(net.activation,
                                                        cache.pre_activations[l - 1],
                                                        cache.activations[l - 1]));
      }
    }
  }

  if (cache.mode != PathMode::nonlinear_only) {
    require(cache.linear_values.size() == layers, ErrorCode::invalid_argument,
            "backward_dual: cache does not match the network");
    Matrix delta = upstream;
    for (std::size_t l = layers; l-- > 0;) {
      const Matrix& below = l == 0 ? cache.input : cache.linear_values[l - 1];
      grads.weights[l] += delta * below.transpose();
      grads.biases[l] += delta.rowwise().sum();
      delta = net.weights[l].transpose() * delta;
    }
    grads.input += delta;
  }

  return grads;
}

namespace {

// suffix[l] = W[L]...W[l]  (suffix[L+1] = I), prefix[l] = W[l]...W[0]
// (prefix[-1] = I). dW[l] = suffix[l+1]^T * M * prefix[l-1]^T.
std::vector<Matrix> product_gradients(const BranchNetwork& net, const Matrix& m_term) {
  const auto layers = net.layer_count();
  std::vector<Matrix> suffix(layers + 1);
  suffix[layers] = Matrix::Identity(net.output_dim(), net.output_dim());
  for (std::size_t l = layers; l-- > 0;) suffix[l] = suffix[l + 1] * net.weights[l];

  std::vector<Matrix> grads(layers);
  Matrix prefix = Matrix::Identity(net.input_dim(), net.input_dim());
  for (std::size_t l = 0; l < layers; ++l) {
    grads[l] = suffix[l + 1].transpose() * m_term * prefix.transpose();
    prefix = net.weights[l] * prefix;
  }
  return grads;
}

}  // namespace

ManifoldGradients manifold_gradients(const BranchNetwork& col_net,
                                     const BranchNetwork& row_net,
                                     const Matrix& residual) {
  require(col_net.input_dim() == row_net.input_dim(), ErrorCode::shape_mismatch,
          "manifold_gradients: branch input widths (rank) differ");
  require(residual.rows() == col_net.output_dim() &&
              residual.cols() == row_net.output_dim(),
          ErrorCode::shape_mismatch, "manifold_gradients: residual shape mismatch");

  const Matrix col_product = weight_product(col_net);  // m x r
  const Matrix row_product = weight_product(row_net);  // n x r

  ManifoldGradients grads;
  grads.col_weights = product_gradients(col_net, residual * row_product);
  grads.row_weights = product_gradients(row_net, residual.transpose() * col_product);
  return grads;
}

void save_branch(const BranchNetwork& net, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path);
  out << "dualmc-branch 1\n";
  out << "activation " << activation_name(net.activation) << "\n";
  out << "layer_dims";
  for (Index d : net.layer_dims) out << ' ' << d;
  out << '\n';
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weights[l];
    out << "weight " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) {
        if (j) out << ' ';
        out << format_double(w(i, j));
      }
      out << '\n';
    }
    const Vector& b = net.biases[l];
    out << "bias " << l << ' ' << b.size() << '\n';
    for (Index i = 0; i < b.size(); ++i) {
      if (i) out << ' ';
      out << format_double(b(i));
    }
    out << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed for " + path);
}

BranchNetwork load_branch(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path);
  std::string word;
  int version = 0;
  in >> word >> version;
  require(in.good() && word == "dualmc-branch" && version == 1, ErrorCode::parse,
          path + ": not a dualmc-branch v1 checkpoint");

  BranchNetwork net;
  std::string activation;
  in >> word >> activation;
  require(in.good() && word == "activation", ErrorCode::parse,
          path + ": expected activation line");
  net.activation = activation_from_string(activation);

  in >> word;
  require(in.good() && word == "layer_dims", ErrorCode::parse,
          path + ": expected layer_dims line");
  std::string rest;
  std::getline(in, rest);
  std::istringstream dims(rest);
  Index d = 0;
  while (dims >> d) net.layer_dims.push_back(d);
  check_dims(net.layer_dims);

  for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
    std::size_t index = 0;
    Index rows = 0, cols = 0;
    in >> word >> index >> rows >> cols;
    require(in.good() && word == "weight" && index == l && rows == net.layer_dims[l + 1] &&
                cols == net.layer_dims[l],
            ErrorCode::parse, path + ": malformed weight header");
    Matrix w(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) {
        in >> w(i, j);
        require(in.good(), ErrorCode::parse, path + ": truncated weight block");
      }
    net.weights.push_back(std::move(w));

    Index size = 0;
    in >> word >> index >> size;
    require(in.good() && word == "bias" && index == l && size == net.layer_dims[l + 1],
            ErrorCode::parse, path + ": malformed bias header");
    Vector b(size);
    for (Index i = 0; i < size; ++i) {
      in >> b(i);
      require(in.good(), ErrorCode::parse, path + ": truncated bias block");
    }
    net.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace dualmc
