#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vdsr/trainer.hpp"

namespace vdsr {

/// Patch archive, little-endian:
///
///   magic "VDSRPAT\0", u32 version = 1, u32 patch size P, u64 record count K,
///   K records of { u32 scale, u32 source index, P*P f64 ILR, P*P f64 residual },
///   u32 source count M, M x { u32 length, bytes } source names.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

struct Dataset {
  std::size_t patch_size = 0;
  std::vector<std::string> sources;
  std::vector<PatchPair> pairs;
};

/// Streams records to a temp file; `finish` patches the count, appends the
/// source table and renames into place. Abandoned writers remove their temp.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path path, std::size_t patch_size);
  ~DatasetWriter();

  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  std::uint32_t add_source(const std::string& name);
  void add(const PatchPair& pair);
  std::uint64_t count() const noexcept { return count_; }
  void finish();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::size_t patch_size_;
  std::ofstream os_;
  std::vector<std::string> sources_;
  std::uint64_t count_ = 0;
  bool finished_ = false;
};

void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace vdsr
