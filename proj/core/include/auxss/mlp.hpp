#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "auxss/rng.hpp"

namespace auxss {

enum class Activation : std::uint32_t { SiLU = 1, Tanh = 2 };

std::string_view to_string(Activation act);
Activation activation_from_string(std::string_view text);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Gradients with the same shapes as an Mlp's layers.
struct MlpGrad {
  std::vector<DenseLayer> layers;
  void set_zero();
};

// Fully connected network, column-per-sample. Hidden layers use the smooth
// activation, the output layer is linear.
class Mlp {
 public:
  // Activations recorded by forward() for backward().
  struct Tape {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each hidden layer
  };

  Mlp() = default;
  // sizes = {in, hidden..., out}. Weights and biases drawn from
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(std::vector<int> sizes, Activation act, Rng& rng);
  // Same shape, all parameters zero.
  Mlp(std::vector<int> sizes, Activation act);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;

  // Backpropagates dL/d(output). Parameter gradients are accumulated into
  // `grad` when it is non-null. Returns dL/d(input).
  Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& grad_out, MlpGrad* grad) const;

  MlpGrad zero_grad() const;

  // target <- (1 - tau) target + tau source
  void soft_update_from(const Mlp& source, double tau);

  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Flat view used by finite-difference checks: every weight (column
  // major) then every bias, layer by layer.
  std::size_t parameter_count() const;
  double& parameter(std::size_t k);
  static double gradient(const MlpGrad& grad, std::size_t k);

  bool all_finite() const;

  // Per layer: weights row-major, then biases, as little-endian f64.
  void write_parameters(std::ostream& out) const;
  void read_parameters(std::istream& in);

 private:
  std::vector<int> sizes_;
  Activation act_ = Activation::SiLU;
  std::vector<DenseLayer> layers_;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, AdamConfig cfg);
  void step(Mlp& net, const MlpGrad& grad);
  std::int64_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
};

namespace binio {
void write_u32(std::ostream& out, std::uint32_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
double read_f64(std::istream& in);
}  // namespace binio

}  // namespace auxss
