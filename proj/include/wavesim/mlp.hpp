#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace wavesim {

// Fully connected network with tanh hidden layers and a linear output layer.
// Parameters live in one flat vector (per layer: W column-major, then b) so
// optimizers and finite-difference checks can treat them uniformly.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> sizes);

  // Gaussian init with std 1/sqrt(fan_in); the last layer is scaled by
  // `output_scale`. Biases start at zero.
  void init(std::mt19937_64& rng, double output_scale);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // [0] = input
  };

  // x: input_size x batch. Returns output_size x batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;
  Eigen::VectorXd forward_one(const Eigen::VectorXd& x) const;

  // Accumulates d(loss)/d(params) into grad given d(loss)/d(output).
  void backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                Eigen::VectorXd& grad) const;

 private:
  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;
  Eigen::VectorXd params_;
};

// Adam on a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_ = 3e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace wavesim
