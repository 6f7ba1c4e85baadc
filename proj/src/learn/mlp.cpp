#include "wavesim/mlp.hpp"

#include <cmath>

#include "wavesim/errors.hpp"

namespace wavesim {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ShapeError("MLP needs at least input and output sizes");
  Eigen::Index total = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  return {params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  return {params_.data() + offsets_[layer] + static_cast<Eigen::Index>(sizes_[layer]) *
                                                 sizes_[layer + 1],
          sizes_[layer + 1]};
}

void Mlp::init(std::mt19937_64& rng, double output_scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  params_.setZero();
  for (int l = 0; l < layer_count(); ++l) {
    const double scale =
        (l == layer_count() - 1 ? output_scale : 1.0) / std::sqrt(static_cast<double>(sizes_[l]));
    const Eigen::Index n = static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1];
    for (Eigen::Index i = 0; i < n; ++i) params_(offsets_[l] + i) = scale * normal(rng);
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != input_size()) throw ShapeError("MLP input size mismatch");
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(x);
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weight(l) * h;
    z.colwise() += bias(l);
    if (l < layer_count() - 1) z = z.array().tanh().matrix();
    h = std::move(z);
    if (cache) cache->activations.push_back(h);
  }
  return h;
}

Eigen::VectorXd Mlp::forward_one(const Eigen::VectorXd& x) const {
  if (x.size() != input_size()) throw ShapeError("MLP input size mismatch");
  Eigen::VectorXd h = x;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::VectorXd z = weight(l) * h + bias(l);
    if (l < layer_count() - 1) z = z.array().tanh().matrix();
    h = std::move(z);
  }
  return h;
}

void Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                   Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd d = d_out;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const auto& input = cache.activations[static_cast<std::size_t>(l)];
    Eigen::Map<Eigen::MatrixXd> g_w(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
    Eigen::Map<Eigen::VectorXd> g_b(
        grad.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l]) * sizes_[l + 1],
        sizes_[l + 1]);
    g_w.noalias() += d * input.transpose();
    g_b += d.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weight(l).transpose() * d;
      d = back.array() * (1.0 - input.array().square());
    }
  }
}

Adam::Adam(Eigen::Index size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (m_.size() != params.size()) {
    m_ = Eigen::VectorXd::Zero(params.size());
    v_ = Eigen::VectorXd::Zero(params.size());
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

}  // namespace wavesim
