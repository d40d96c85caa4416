#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vdsr/metrics.hpp"

namespace vdsr {

struct EvalRow {
  std::string scene;
  std::string method;
  double psnr_db = 0.0;
  double ssim = 0.0;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

/// Scene-by-method score grid in insertion order.
class EvalTable {
 public:
  void add(const std::string& scene, const std::string& method, const QualityScore& score);

  const std::vector<std::string>& scenes() const noexcept { return scenes_; }
  const std::vector<std::string>& methods() const noexcept { return methods_; }
  const std::vector<EvalRow>& rows() const noexcept { return rows_; }

  /// Tab-separated grid: header "scene<TAB>method...", cells "PSNR/SSIM".
  std::string render_grid() const;

 private:
  std::vector<std::string> scenes_;
  std::vector<std::string> methods_;
  std::vector<EvalRow> rows_;
};

/// CSV with header scene,method,psnr_db,ssim and round-trip precision;
/// infinite PSNR is written as "inf".
std::string render_rows_csv(const std::vector<EvalRow>& rows);
std::vector<EvalRow> parse_rows_csv(std::string_view text);

}  // namespace vdsr
