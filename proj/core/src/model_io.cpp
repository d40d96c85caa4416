#include "vdsr/model_io.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "binary_io.hpp"
#include "vdsr/errors.hpp"
#include "vdsr/fileutil.hpp"

namespace vdsr {

namespace {

constexpr char kMagic[8] = {'V', 'D', 'S', 'R', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t kReluTag = 1;
constexpr std::uint32_t kMaxDimension = 1u << 16;

}  // namespace

void write_model(std::ostream& os, const NetworkModel& model) {
  model.validate();
  using namespace detail;
  os.write(kMagic, sizeof kMagic);
  put_u32(os, kModelFormatVersion);
  put_u32(os, static_cast<std::uint32_t>(model.depth()));
  put_u32(os, static_cast<std::uint32_t>(model.filters));
  put_u32(os, static_cast<std::uint32_t>(model.kernel));
  put_u32(os, kReluTag);
  put_u32(os, model.info.estimator.kind() == EstimatorKind::kMse ? 0u : 1u);
  put_f64(os, model.info.estimator.stability_r());
  put_u32(os, static_cast<std::uint32_t>(model.info.scales.size()));
  for (int s : model.info.scales) {
    put_u32(os, static_cast<std::uint32_t>(s));
  }
  put_string(os, model.info.provenance);
  for (const auto& layer : model.layers) {
    put_f64s(os, layer.weights);
    put_f64s(os, layer.biases);
  }
}

NetworkModel read_model(std::istream& is) {
  using namespace detail;
  char magic[8];
  read_exact(is, magic, sizeof magic, "model magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a VDSR model file (bad magic)");
  }
  const std::uint32_t version = get_u32(is, "model version");
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  const std::uint32_t depth = get_u32(is, "depth");
  const std::uint32_t filters = get_u32(is, "filters");
  const std::uint32_t kernel = get_u32(is, "kernel");
  const std::uint32_t activation = get_u32(is, "activation");
  if (depth == 0 || depth > kMaxDimension || filters == 0 || filters > kMaxDimension ||
      kernel == 0 || kernel > 255 || kernel % 2 == 0) {
    throw FormatError("model header has implausible architecture fields");
  }
  if (activation != kReluTag) {
    throw FormatError("unknown activation tag " + std::to_string(activation));
  }
  const std::uint32_t est = get_u32(is, "estimator");
  const double r = get_f64(is, "stability R");

  NetworkModel model = zero_model(depth, filters, kernel);
  if (est == 0) {
    model.info.estimator = LossEstimator::mse();
  } else if (est == 1) {
    model.info.estimator = LossEstimator::var_norm(r);
  } else {
    throw FormatError("unknown estimator id " + std::to_string(est));
  }
  const std::uint32_t nscales = get_u32(is, "scale count");
  if (nscales > 16) {
    throw FormatError("implausible scale count");
  }
  model.info.scales.clear();
  for (std::uint32_t i = 0; i < nscales; ++i) {
    model.info.scales.push_back(static_cast<int>(get_u32(is, "scale")));
  }
  model.info.provenance = get_string(is, "provenance");
  for (auto& layer : model.layers) {
    get_f64s(is, layer.weights, "layer weights");
    get_f64s(is, layer.biases, "layer biases");
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after model payload");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const NetworkModel& model) {
  write_file_atomic(path, [&](std::ostream& os) { write_model(os, model); });
}

NetworkModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open model file " + path.string());
  }
  return read_model(is);
}

}  // namespace vdsr
