#include "pdattack/ncs/plant.hpp"

#include <cmath>
#include <string>

#include "pdattack/error.hpp"

namespace pdattack {

PlantModel PlantModel::linear(Mat A, Mat B, Mat C) {
  if (!A.square() || A.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "plant A must be square");
  if (B.rows() != A.rows() || B.cols() == 0) throw Error(ErrorKind::DimensionMismatch, "plant B must be p x m");
  if (C.cols() != A.rows() || C.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "plant C must be q x p");
  return PlantModel(LinearPlant{std::move(A), std::move(B), std::move(C)});
}

PlantModel PlantModel::pendulum(double c, double g, Mat C) {
  if (!std::isfinite(c) || !std::isfinite(g)) throw Error(ErrorKind::NonFinite, "pendulum parameters");
  if (C.cols() != 4 || C.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "pendulum C must be q x 4");
  return PlantModel(PendulumPlant{c, g, std::move(C)});
}

std::size_t PlantModel::state_dim() const {
  if (const auto* lin = std::get_if<LinearPlant>(&model_)) return lin->A.rows();
  return 4;
}

std::size_t PlantModel::input_dim() const {
  if (const auto* lin = std::get_if<LinearPlant>(&model_)) return lin->B.cols();
  return 1;
}

std::size_t PlantModel::output_dim() const { return output_matrix().rows(); }

const Mat& PlantModel::output_matrix() const {
  return std::visit([](const auto& m) -> const Mat& { return m.C; }, model_);
}

Vec plant_derivative(const PlantModel& plant, const Vec& x, const Vec& u) {
  if (x.dim() != plant.state_dim() || u.dim() != plant.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "plant_derivative: state/input dimension");
  }
  if (const auto* lin = std::get_if<LinearPlant>(&plant.model())) {
    Vec dx = lin->A * x;
    dx += lin->B * u;
    return dx;
  }
  const auto& pend = std::get<PendulumPlant>(plant.model());
  const double theta = x[1];
  Vec dx(4);
  dx[0] = x[2];
  dx[1] = x[3];
  dx[2] = u[0];
  dx[3] = pend.c * u[0] * std::cos(theta) + pend.c * pend.g * std::sin(theta);
  return dx;
}

std::pair<Mat, Mat> linearize(const PlantModel& plant) {
  if (const auto* lin = std::get_if<LinearPlant>(&plant.model())) return {lin->A, lin->B};
  const auto& pend = std::get<PendulumPlant>(plant.model());
  Mat A(4, 4);
  A(0, 2) = 1.0;
  A(1, 3) = 1.0;
  A(3, 1) = pend.c * pend.g;
  Mat B(4, 1);
  B(2, 0) = 1.0;
  B(3, 0) = pend.c;
  return {A, B};
}

NominalModel::NominalModel(Mat A_n, Mat B_n, Mat K_n) : a_(std::move(A_n)), b_(std::move(B_n)), k_(std::move(K_n)) {
  if (!a_.square() || b_.rows() != a_.rows() || k_.rows() != b_.cols() || k_.cols() != a_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "nominal model dimensions (A_n p x p, B_n p x m, K_n m x p)");
  }
  phi_ = a_ + b_ * k_;
}

Vec controller_output(const Mat& K, const Vec& x_a) {
  if (K.cols() != x_a.dim()) throw Error(ErrorKind::DimensionMismatch, "controller gain columns vs x_a");
  return K * x_a;
}

}  // namespace pdattack
