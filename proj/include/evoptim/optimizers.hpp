#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "evoptim/error.hpp"
#include "evoptim/params.hpp"

namespace evoptim {

struct AdamConfig {
  double eta = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam stepper state. Moments start at zero; the step counter starts at 0
/// and is incremented at the top of each step, so the bias-correction factor
/// of the first step uses k = 1.
struct AdamState {
  ParamVector m;
  ParamVector v;
  std::uint64_t k = 0;
  AdamConfig hp;

  static AdamState fresh(std::size_t dim, const AdamConfig& hp = {}) {
    AdamState s;
    s.m.assign(dim, 0.0);
    s.v.assign(dim, 0.0);
    s.k = 0;
    s.hp = hp;
    return s;
  }
};

/// Shared state for the single-accumulator steppers. `v` holds the SGDM
/// velocity, the AdaGrad cumulative square, or the RMSProp moving-average
/// square; AdaDelta additionally uses `u` for its squared-update average.
struct MomentState {
  ParamVector v;
  ParamVector u;  // AdaDelta only
  double eta = 0.01;
  double beta = 0.9;
  double eps = 1e-8;

  static MomentState fresh(std::size_t dim, double eta, double beta,
                           double eps, bool with_update_acc = false) {
    MomentState s;
    s.v.assign(dim, 0.0);
    if (with_update_acc) s.u.assign(dim, 0.0);
    s.eta = eta;
    s.beta = beta;
    s.eps = eps;
    return s;
  }

  static MomentState sgdm(std::size_t dim, double eta = 0.01, double beta = 0.9) {
    return fresh(dim, eta, beta, 0.0);
  }
  static MomentState adagrad(std::size_t dim, double eta = 0.01, double eps = 1e-8) {
    return fresh(dim, eta, 0.0, eps);
  }
  static MomentState rmsprop(std::size_t dim, double eta = 0.001, double beta = 0.9,
                             double eps = 1e-8) {
    return fresh(dim, eta, beta, eps);
  }
  static MomentState adadelta(std::size_t dim, double rho = 0.95, double eps = 1e-6) {
    return fresh(dim, 0.0, rho, eps, /*with_update_acc=*/true);
  }
};

namespace detail {

inline void check_step_inputs(const ParamVector& w, const ParamVector& grad,
                              const char* where) {
  check_same_size(w, grad, where);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericError(std::string(where) + ": non-finite gradient at index " +
                         std::to_string(i));
    }
  }
}

}  // namespace detail

/// One Adam step. Moment estimates are updated first, then the parameters:
///   m <- b1*m + (1-b1)*g
///   v <- b2*v + (1-b2)*g^2
///   w <- w - eta * sqrt(1-b2^k)/(1-b1^k) * m/(sqrt(v)+eps)
/// with k the post-increment step counter. Epsilon sits outside the root.
inline void adam_step(ParamVector& w, const ParamVector& grad, AdamState& state) {
  detail::check_step_inputs(w, grad, "adam_step");
  check_same_size(w, state.m, "adam_step(state)");
  state.k += 1;
  const double b1 = state.hp.beta1;
  const double b2 = state.hp.beta2;
  const double bias = std::sqrt(1.0 - std::pow(b2, static_cast<double>(state.k))) /
                      (1.0 - std::pow(b1, static_cast<double>(state.k)));
  const double scale = state.hp.eta * bias;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    w[i] -= scale * state.m[i] / (std::sqrt(state.v[i]) + state.hp.eps);
  }
}

/// Plain stochastic gradient descent: w <- w - eta*g.
inline void sgd_step(ParamVector& w, const ParamVector& grad, double eta) {
  detail::check_step_inputs(w, grad, "sgd_step");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= eta * grad[i];
}

/// Momentum SGD: v <- beta*v + g; w <- w - eta*v. Note the raw gradient is
/// added undamped, so beta = 0 reduces exactly to sgd_step.
inline void sgdm_step(ParamVector& w, const ParamVector& grad, MomentState& state) {
  detail::check_step_inputs(w, grad, "sgdm_step");
  check_same_size(w, state.v, "sgdm_step(state)");
  for (std::size_t i = 0; i < w.size(); ++i) {
    state.v[i] = state.beta * state.v[i] + grad[i];
    w[i] -= state.eta * state.v[i];
  }
}

/// AdaGrad: v <- v + g^2; w <- w - eta*g/(sqrt(v)+eps). The accumulator is
/// entrywise non-decreasing for the life of the state.
inline void adagrad_step(ParamVector& w, const ParamVector& grad, MomentState& state) {
  detail::check_step_inputs(w, grad, "adagrad_step");
  check_same_size(w, state.v, "adagrad_step(state)");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = grad[i];
    state.v[i] += g * g;
    w[i] -= state.eta * g / (std::sqrt(state.v[i]) + state.eps);
  }
}

/// RMSProp: v <- beta*v + (1-beta)*g^2; w <- w - eta*g/(sqrt(v)+eps).
inline void rmsprop_step(ParamVector& w, const ParamVector& grad, MomentState& state) {
  detail::check_step_inputs(w, grad, "rmsprop_step");
  check_same_size(w, state.v, "rmsprop_step(state)");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = grad[i];
    state.v[i] = state.beta * state.v[i] + (1.0 - state.beta) * g * g;
    w[i] -= state.eta * g / (std::sqrt(state.v[i]) + state.eps);
  }
}

/// AdaDelta in the accumulate-gradient / accumulate-update form with decay
/// `beta` (rho) and epsilon inside both roots:
///   v <- rho*v + (1-rho)*g^2
///   d  = -sqrt(u+eps)/sqrt(v+eps) * g
///   u <- rho*u + (1-rho)*d^2
///   w <- w + d
inline void adadelta_step(ParamVector& w, const ParamVector& grad, MomentState& state) {
  detail::check_step_inputs(w, grad, "adadelta_step");
  check_same_size(w, state.v, "adadelta_step(state)");
  check_same_size(w, state.u, "adadelta_step(update accumulator)");
  const double rho = state.beta;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = grad[i];
    state.v[i] = rho * state.v[i] + (1.0 - rho) * g * g;
    const double d = -std::sqrt(state.u[i] + state.eps) /
                     std::sqrt(state.v[i] + state.eps) * g;
    state.u[i] = rho * state.u[i] + (1.0 - rho) * d * d;
    w[i] += d;
  }
}

// --- runtime-selected stepper ----------------------------------------------

enum class OptimizerKind { Adam, Sgd, Sgdm, AdaGrad, RmsProp, AdaDelta };

/// Hyperparameters for any of the steppers; unused fields are ignored by the
/// algorithms that do not read them.
struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::Adam;
  double eta = 0.001;   // Adam/RMSProp default; SGD family uses 0.01
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double beta = 0.9;    // SGDM velocity decay / RMSProp average decay
  double rho = 0.95;    // AdaDelta decay
  double adadelta_eps = 1e-6;

  static OptimizerSpec defaults(OptimizerKind kind) {
    OptimizerSpec s;
    s.kind = kind;
    switch (kind) {
      case OptimizerKind::Adam:     s.eta = 0.001; break;
      case OptimizerKind::Sgd:      s.eta = 0.01;  break;
      case OptimizerKind::Sgdm:     s.eta = 0.01;  break;
      case OptimizerKind::AdaGrad:  s.eta = 0.01;  break;
      case OptimizerKind::RmsProp:  s.eta = 0.001; break;
      case OptimizerKind::AdaDelta: s.eta = 1.0;   break;  // unused by the update
    }
    return s;
  }
};

/// Owns the per-model state for one stepper and dispatches on kind. Intended
/// for harness code; the engine uses the step functions directly.
class Optimizer {
 public:
  Optimizer(const OptimizerSpec& spec, std::size_t dim) : spec_(spec) {
    switch (spec.kind) {
      case OptimizerKind::Adam:
        adam_ = AdamState::fresh(dim, AdamConfig{spec.eta, spec.beta1, spec.beta2, spec.eps});
        break;
      case OptimizerKind::Sgd:
        break;
      case OptimizerKind::Sgdm:
        moment_ = MomentState::sgdm(dim, spec.eta, spec.beta);
        break;
      case OptimizerKind::AdaGrad:
        moment_ = MomentState::adagrad(dim, spec.eta, spec.eps);
        break;
      case OptimizerKind::RmsProp:
        moment_ = MomentState::rmsprop(dim, spec.eta, spec.beta, spec.eps);
        break;
      case OptimizerKind::AdaDelta:
        moment_ = MomentState::adadelta(dim, spec.rho, spec.adadelta_eps);
        break;
    }
  }

  void step(ParamVector& w, const ParamVector& grad) {
    switch (spec_.kind) {
      case OptimizerKind::Adam:     adam_step(w, grad, adam_); break;
      case OptimizerKind::Sgd:      sgd_step(w, grad, spec_.eta); break;
      case OptimizerKind::Sgdm:     sgdm_step(w, grad, moment_); break;
      case OptimizerKind::AdaGrad:  adagrad_step(w, grad, moment_); break;
      case OptimizerKind::RmsProp:  rmsprop_step(w, grad, moment_); break;
      case OptimizerKind::AdaDelta: adadelta_step(w, grad, moment_); break;
    }
  }

  const OptimizerSpec& spec() const { return spec_; }

 private:
  OptimizerSpec spec_;
  AdamState adam_;
  MomentState moment_;
};

inline const char* optimizer_kind_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Adam:     return "adam";
    case OptimizerKind::Sgd:      return "sgd";
    case OptimizerKind::Sgdm:     return "sgdm";
    case OptimizerKind::AdaGrad:  return "adagrad";
    case OptimizerKind::RmsProp:  return "rmsprop";
    case OptimizerKind::AdaDelta: return "adadelta";
  }
  return "?";
}

}  // namespace evoptim
