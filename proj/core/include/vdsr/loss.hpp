#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vdsr {

/// Estimation errors F = prediction - target, stored row-major.
struct ResidualMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;

  ResidualMatrix() = default;
  ResidualMatrix(std::size_t r, std::size_t c, std::vector<double> e);

  std::span<const double> view() const noexcept { return entries; }
};

enum class EstimatorKind { kMse, kVarNorm };

/// Regression-layer estimator. The stability parameter only matters for
/// Var-norm and is always > 0 there.
class LossEstimator {
 public:
  static constexpr double kDefaultStability = 0.1;

  static LossEstimator mse() noexcept { return LossEstimator(EstimatorKind::kMse, 0.0); }
  static LossEstimator var_norm(double stability_r = kDefaultStability);

  /// Accepts "mse" or "var-norm" (also "varnorm").
  static LossEstimator parse(std::string_view id, double stability_r = kDefaultStability);

  EstimatorKind kind() const noexcept { return kind_; }
  double stability_r() const noexcept { return stability_r_; }
  std::string id() const;

  friend bool operator==(const LossEstimator&, const LossEstimator&) = default;

 private:
  LossEstimator(EstimatorKind kind, double r) noexcept : kind_(kind), stability_r_(r) {}

  EstimatorKind kind_;
  double stability_r_;
};

struct LossEvaluation {
  double loss = 0.0;
  std::vector<double> gradient;  // same shape as F
  double slope = 0.0;            // per-element weight applied to F
};

/// Population variance of |F|.
double var_abs(std::span<const double> f);
inline double var_abs(const ResidualMatrix& f) { return var_abs(f.view()); }

/// Var-norm influence function: x / (R + var(|F|)) for every element x of F.
/// The denominator is one scalar computed from all of F.
std::vector<double> varnorm_psi(std::span<const double> f, double stability_r);
inline std::vector<double> varnorm_psi(const ResidualMatrix& f, double stability_r) {
  return varnorm_psi(f.view(), stability_r);
}

/// Loss value, output gradient and slope of the estimator at F.
///
/// MSE: loss = sum(x^2) / 2N, gradient = x / N, slope = 1 / N.
///
/// Var-norm: slope s = 1 / (R + var(|F|)) is frozen for the current
/// evaluation, gradient = s * x (the psi function) and loss = s/2 * sum(x^2),
/// which is the quadratic whose gradient at fixed s is exactly psi.
LossEvaluation evaluate(const LossEstimator& est, std::span<const double> f);
inline LossEvaluation evaluate(const LossEstimator& est, const ResidualMatrix& f) {
  return evaluate(est, f.view());
}

}  // namespace vdsr
