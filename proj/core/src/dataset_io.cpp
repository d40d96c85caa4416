#include "vdsr/dataset_io.hpp"

#include <cstring>

#include "binary_io.hpp"
#include "vdsr/errors.hpp"

namespace vdsr {

namespace {

constexpr char kMagic[8] = {'V', 'D', 'S', 'R', 'P', 'A', 'T', '\0'};
constexpr std::streamoff kCountOffset = 16;

}  // namespace

DatasetWriter::DatasetWriter(std::filesystem::path path, std::size_t patch_size)
    : path_(std::move(path)), patch_size_(patch_size) {
  if (patch_size_ == 0) {
    throw InvalidParameter("dataset patch size must be >= 1");
  }
  tmp_ = path_;
  tmp_ += ".tmp";
  os_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!os_) {
    throw IoError("cannot open " + tmp_.string() + " for writing");
  }
  os_.write(kMagic, sizeof kMagic);
  detail::put_u32(os_, kDatasetFormatVersion);
  detail::put_u32(os_, static_cast<std::uint32_t>(patch_size_));
  detail::put_u64(os_, 0);
}

DatasetWriter::~DatasetWriter() {
  if (!finished_) {
    os_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

std::uint32_t DatasetWriter::add_source(const std::string& name) {
  sources_.push_back(name);
  return static_cast<std::uint32_t>(sources_.size() - 1);
}

void DatasetWriter::add(const PatchPair& pair) {
  const std::size_t p = patch_size_;
  if (pair.ilr.height() != p || pair.ilr.width() != p || !pair.ilr.same_shape(pair.residual)) {
    throw ShapeMismatch("patch pair does not match archive patch size");
  }
  detail::put_u32(os_, static_cast<std::uint32_t>(pair.scale));
  detail::put_u32(os_, pair.source);
  detail::put_f64s(os_, pair.ilr.samples());
  detail::put_f64s(os_, pair.residual.samples());
  ++count_;
}

void DatasetWriter::finish() {
  detail::put_u32(os_, static_cast<std::uint32_t>(sources_.size()));
  for (const auto& s : sources_) {
    detail::put_string(os_, s);
  }
  os_.seekp(kCountOffset);
  detail::put_u64(os_, count_);
  os_.flush();
  if (!os_) {
    throw IoError("write failed for " + tmp_.string());
  }
  os_.close();
  std::error_code ec;
  std::filesystem::rename(tmp_, path_, ec);
  if (ec) {
    throw IoError("cannot move " + tmp_.string() + " to " + path_.string());
  }
  finished_ = true;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  DatasetWriter w(path, ds.patch_size);
  for (const auto& s : ds.sources) {
    w.add_source(s);
  }
  for (const auto& p : ds.pairs) {
    w.add(p);
  }
  w.finish();
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open dataset " + path.string());
  }
  char magic[8];
  detail::read_exact(is, magic, sizeof magic, "dataset magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a VDSR patch archive (bad magic)");
  }
  const std::uint32_t version = detail::get_u32(is, "dataset version");
  if (version != kDatasetFormatVersion) {
    throw FormatError("unsupported dataset format version " + std::to_string(version));
  }
  Dataset ds;
  ds.patch_size = detail::get_u32(is, "patch size");
  if (ds.patch_size == 0 || ds.patch_size > 4096) {
    throw FormatError("implausible patch size in dataset header");
  }
  const std::uint64_t count = detail::get_u64(is, "record count");
  const std::size_t p = ds.patch_size;
  const auto record_bytes = 8 + 16 * p * p;
  const auto file_size = std::filesystem::file_size(path);
  if (count > file_size / record_bytes) {
    throw FormatError("record count exceeds file size");
  }
  ds.pairs.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PatchPair pair;
    pair.scale = static_cast<int>(detail::get_u32(is, "record scale"));
    pair.source = detail::get_u32(is, "record source");
    std::vector<double> ilr(p * p), res(p * p);
    detail::get_f64s(is, ilr, "ILR patch");
    detail::get_f64s(is, res, "residual patch");
    pair.ilr = ImagePlane(p, p, std::move(ilr));
    pair.residual = ImagePlane(p, p, std::move(res));
    ds.pairs.push_back(std::move(pair));
  }
  const std::uint32_t nsrc = detail::get_u32(is, "source count");
  for (std::uint32_t i = 0; i < nsrc; ++i) {
    ds.sources.push_back(detail::get_string(is, "source name"));
  }
  for (const auto& pair : ds.pairs) {
    if (pair.source >= nsrc && nsrc > 0) {
      throw FormatError("record refers to unknown source index");
    }
  }
  return ds;
}

}  // namespace vdsr
