#include "auxss/mlp.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "auxss/errors.hpp"

namespace auxss {

std::string_view to_string(Activation act) {
  return act == Activation::Tanh ? "tanh" : "silu";
}

Activation activation_from_string(std::string_view text) {
  if (text == "silu") return Activation::SiLU;
  if (text == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation '" + std::string(text) + "'");
}

void MlpGrad::set_zero() {
  for (auto& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

namespace {

Eigen::MatrixXd activate(const Eigen::MatrixXd& pre, Activation act) {
  if (act == Activation::Tanh) return pre.array().tanh().matrix();
  return (pre.array() / (1.0 + (-pre.array()).exp())).matrix();
}

// Elementwise derivative of the activation at `pre`.
Eigen::ArrayXXd activation_slope(const Eigen::MatrixXd& pre, Activation act) {
  if (act == Activation::Tanh) {
    const Eigen::ArrayXXd t = pre.array().tanh();
    return 1.0 - t * t;
  }
  const Eigen::ArrayXXd sig = 1.0 / (1.0 + (-pre.array()).exp());
  return sig * (1.0 + pre.array() * (1.0 - sig));
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes, Activation act, Rng& rng) : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw ConfigError("an MLP needs at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw ConfigError("MLP layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) layer.weight(r, c) = u(rng);
    }
    for (int r = 0; r < out; ++r) layer.bias(r) = u(rng);
    layers_.push_back(std::move(layer));
  }
}

Mlp::Mlp(std::vector<int> sizes, Activation act) : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw ConfigError("an MLP needs at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw ConfigError("MLP layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]), Eigen::VectorXd::Zero(sizes_[l + 1])});
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd pre = (layers_[l].weight * h).colwise() + layers_[l].bias;
    h = (l + 1 < layers_.size()) ? activate(pre, act_) : std::move(pre);
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  tape.inputs.resize(layers_.size());
  tape.pre.resize(layers_.size() - 1);
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    tape.inputs[l] = h;
    Eigen::MatrixXd pre = (layers_[l].weight * h).colwise() + layers_[l].bias;
    if (l + 1 < layers_.size()) {
      h = activate(pre, act_);
      tape.pre[l] = std::move(pre);
    } else {
      h = std::move(pre);
    }
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& grad_out, MlpGrad* grad) const {
  Eigen::MatrixXd g = grad_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (grad != nullptr) {
      grad->layers[l].weight.noalias() += g * tape.inputs[l].transpose();
      grad->layers[l].bias.noalias() += g.rowwise().sum();
    }
    Eigen::MatrixXd down = layers_[l].weight.transpose() * g;
    if (l > 0) down.array() *= activation_slope(tape.pre[l - 1], act_);
    g = std::move(down);
  }
  return g;
}

MlpGrad Mlp::zero_grad() const {
  MlpGrad g;
  for (const auto& l : layers_) {
    g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

void Mlp::soft_update_from(const Mlp& source, double tau) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight = (1.0 - tau) * layers_[l].weight + tau * source.layers_[l].weight;
    layers_[l].bias = (1.0 - tau) * layers_[l].bias + tau * source.layers_[l].bias;
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

double& Mlp::parameter(std::size_t k) {
  for (auto& l : layers_) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (k < nw) return l.weight.data()[k];
    k -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (k < nb) return l.bias.data()[k];
    k -= nb;
  }
  throw std::out_of_range("Mlp::parameter index out of range");
}

double Mlp::gradient(const MlpGrad& grad, std::size_t k) {
  for (const auto& l : grad.layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (k < nw) return l.weight.data()[k];
    k -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (k < nb) return l.bias.data()[k];
    k -= nb;
  }
  throw std::out_of_range("Mlp::gradient index out of range");
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

namespace binio {

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
  out.write(b, 4);
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffU);
  out.write(b, 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError(0, "unexpected end of binary data");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ParseError(0, "unexpected end of binary data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace binio

void Mlp::write_parameters(std::ostream& out) const {
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) binio::write_f64(out, l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) binio::write_f64(out, l.bias(r));
  }
}

void Mlp::read_parameters(std::istream& in) {
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = binio::read_f64(in);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = binio::read_f64(in);
  }
}

Adam::Adam(const Mlp& net, AdamConfig cfg) : cfg_(cfg) {
  const MlpGrad zero = net.zero_grad();
  m_ = zero.layers;
  v_ = zero.layers;
}

void Adam::step(Mlp& net, const MlpGrad& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double step = cfg_.learning_rate * std::sqrt(c2) / c1;
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    m_[l].weight = cfg_.beta1 * m_[l].weight + (1.0 - cfg_.beta1) * grad.layers[l].weight;
    v_[l].weight = cfg_.beta2 * v_[l].weight + (1.0 - cfg_.beta2) * grad.layers[l].weight.cwiseAbs2();
    layers[l].weight.array() -=
        step * m_[l].weight.array() / (v_[l].weight.array().sqrt() + cfg_.epsilon * std::sqrt(c2));
    m_[l].bias = cfg_.beta1 * m_[l].bias + (1.0 - cfg_.beta1) * grad.layers[l].bias;
    v_[l].bias = cfg_.beta2 * v_[l].bias + (1.0 - cfg_.beta2) * grad.layers[l].bias.cwiseAbs2();
    layers[l].bias.array() -=
        step * m_[l].bias.array() / (v_[l].bias.array().sqrt() + cfg_.epsilon * std::sqrt(c2));
  }
}

}  // namespace auxss
