#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "realm/error.hpp"

namespace realm::core {

/// Flat view of one parameter tensor. `encoder` marks tensors belonging to
/// an encoder adapter so training can freeze them as a group.
struct TensorRef {
  const char* name;
  double* data;
  std::ptrdiff_t size;
  bool encoder;
};

/// Adam with decoupled weight decay: the decay term is applied directly to
/// the parameter, scaled by the learning rate, never entering the moment
/// estimates.
class AdamW {
public:
  AdamW(double lr, double weight_decay = 0.01, double beta1 = 0.9, double beta2 = 0.999,
        double eps = 1e-8)
      : lr_(lr), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {
    if (lr < 0.0) throw InvalidInputError("adamw: learning rate must be >= 0");
    if (weight_decay < 0.0) throw InvalidInputError("adamw: weight decay must be >= 0");
  }

  double learning_rate() const { return lr_; }
  std::int64_t steps_taken() const { return t_; }

  /// One update over aligned (parameter, gradient) tensor lists. The list
  /// must be identical in order and shape on every call.
  void step(const std::vector<TensorRef>& params, const std::vector<TensorRef>& grads) {
    if (params.size() != grads.size())
      throw InvalidInputError("adamw: parameter/gradient list mismatch");
    if (m_.empty()) {
      for (const auto& p : params) {
        m_.emplace_back(std::size_t(p.size), 0.0);
        v_.emplace_back(std::size_t(p.size), 0.0);
      }
    }
    if (m_.size() != params.size()) throw InvalidInputError("adamw: tensor list changed size");

    ++t_;
    const double bc1 = 1.0 - std::pow(b1_, double(t_));
    const double bc2 = 1.0 - std::pow(b2_, double(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& p = params[i];
      const auto& g = grads[i];
      if (p.size != g.size || std::size_t(p.size) != m_[i].size())
        throw InvalidInputError(std::string("adamw: shape drift on tensor ") + p.name);
      double* m = m_[i].data();
      double* v = v_[i].data();
      for (std::ptrdiff_t j = 0; j < p.size; ++j) {
        m[j] = b1_ * m[j] + (1.0 - b1_) * g.data[j];
        v[j] = b2_ * v[j] + (1.0 - b2_) * g.data[j] * g.data[j];
        double mhat = m[j] / bc1;
        double vhat = v[j] / bc2;
        p.data[j] -= lr_ * (mhat / (std::sqrt(vhat) + eps_) + wd_ * p.data[j]);
      }
    }
  }

private:
  double lr_, wd_, b1_, b2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace realm::core
