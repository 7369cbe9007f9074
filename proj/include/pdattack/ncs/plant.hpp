#pragma once

#include <utility>
#include <variant>

#include "pdattack/numkit/matrix.hpp"

namespace pdattack {

/// ẋ = A·x + B·u, z = C·x.
struct LinearPlant {
  Mat A;
  Mat B;
  Mat C;
};

/// Cart–pendulum with cart acceleration as the input. State [α, θ, α̇, θ̇];
/// θ̈ = c·u·cos θ + c·g·sin θ where c = l·m/J.
struct PendulumPlant {
  double c = 0.0;
  double g = 0.0;
  Mat C;
};

class PlantModel {
 public:
  static PlantModel linear(Mat A, Mat B, Mat C);
  static PlantModel pendulum(double c, double g, Mat C);

  std::size_t state_dim() const;
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  const Mat& output_matrix() const;
  bool is_linear() const { return std::holds_alternative<LinearPlant>(model_); }

  const std::variant<LinearPlant, PendulumPlant>& model() const { return model_; }

 private:
  explicit PlantModel(std::variant<LinearPlant, PendulumPlant> m) : model_(std::move(m)) {}
  std::variant<LinearPlant, PendulumPlant> model_;
};

Vec plant_derivative(const PlantModel& plant, const Vec& x, const Vec& u);

/// (A, B) of the plant linearised at the origin; the model itself for a
/// linear plant.
std::pair<Mat, Mat> linearize(const PlantModel& plant);

/// Attacker/defender model triple with Φ_n = A_n + B_n·K_n.
class NominalModel {
 public:
  NominalModel(Mat A_n, Mat B_n, Mat K_n);

  const Mat& A_n() const { return a_; }
  const Mat& B_n() const { return b_; }
  const Mat& K_n() const { return k_; }
  const Mat& Phi_n() const { return phi_; }

 private:
  Mat a_, b_, k_, phi_;
};

/// u = K·x_a.
Vec controller_output(const Mat& K, const Vec& x_a);

}  // namespace pdattack
