#include "vdsr/loss.hpp"

#include <cmath>

#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

void require_nonempty(std::span<const double> f, const char* what) {
  if (f.empty()) {
    throw DegenerateInput(std::string(what) + ": residual matrix is empty");
  }
}

double sum_squares(std::span<const double> f) {
  double s = 0.0;
  for (double x : f) {
    s += x * x;
  }
  return s;
}

}  // namespace

ResidualMatrix::ResidualMatrix(std::size_t r, std::size_t c, std::vector<double> e)
    : rows(r), cols(c), entries(std::move(e)) {
  if (entries.size() != rows * cols) {
    throw ShapeMismatch("residual matrix: entry count does not match rows x cols");
  }
}

LossEstimator LossEstimator::var_norm(double stability_r) {
  if (!(stability_r > 0.0) || !std::isfinite(stability_r)) {
    throw InvalidParameter("var-norm stability parameter R must be a finite value > 0");
  }
  return LossEstimator(EstimatorKind::kVarNorm, stability_r);
}

LossEstimator LossEstimator::parse(std::string_view id, double stability_r) {
  if (id == "mse") {
    return mse();
  }
  if (id == "var-norm" || id == "varnorm") {
    return var_norm(stability_r);
  }
  throw InvalidParameter("unknown estimator '" + std::string(id) + "' (expected mse or var-norm)");
}

std::string LossEstimator::id() const {
  return kind_ == EstimatorKind::kMse ? "mse" : "var-norm";
}

double var_abs(std::span<const double> f) {
  require_nonempty(f, "var_abs");
  const auto n = static_cast<double>(f.size());
  double mean = 0.0;
  for (double x : f) {
    mean += std::abs(x);
  }
  mean /= n;
  double acc = 0.0;
  for (double x : f) {
    const double d = std::abs(x) - mean;
    acc += d * d;
  }
  return acc / n;
}

std::vector<double> varnorm_psi(std::span<const double> f, double stability_r) {
  if (!(stability_r > 0.0)) {
    throw InvalidParameter("varnorm_psi: R must be > 0");
  }
  const double denom = stability_r + var_abs(f);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = f[i] / denom;
  }
  return out;
}

LossEvaluation evaluate(const LossEstimator& est, std::span<const double> f) {
  require_nonempty(f, "evaluate");
  LossEvaluation ev;
  ev.gradient.resize(f.size());
  if (est.kind() == EstimatorKind::kMse) {
    const auto n = static_cast<double>(f.size());
    ev.slope = 1.0 / n;
    ev.loss = sum_squares(f) / (2.0 * n);
    for (std::size_t i = 0; i < f.size(); ++i) {
      ev.gradient[i] = f[i] / n;
    }
    return ev;
  }
  const double denom = est.stability_r() + var_abs(f);
  ev.slope = 1.0 / denom;
  ev.loss = 0.5 * ev.slope * sum_squares(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    ev.gradient[i] = f[i] / denom;
  }
  return ev;
}

}  // namespace vdsr
