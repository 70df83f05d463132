#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "fsrec/factorizer.hpp"

namespace fsrec {

struct CheckpointHeader {
  std::uint64_t num_users = 0;
  std::uint64_t num_items = 0;
  std::uint64_t latent_dim = 0;
  ScalarMode scalar_mode = ScalarMode::kTagCount;
  std::uint64_t seed = 0;
};

struct Checkpoint {
  CheckpointHeader header;
  LatentFactors factors;
};

// Binary layout (little-endian):
//   "FSRECFAC" | u32 version | u64 p | u64 q | u64 l | u8 scalar_mode | u64 seed
//   | S as l x p row-major doubles | V as l x q row-major doubles
void write_checkpoint(std::ostream& out, const LatentFactors& factors, ScalarMode mode, std::uint64_t seed);
Checkpoint read_checkpoint(std::istream& in);

void write_checkpoint(const std::string& path, const LatentFactors& factors, ScalarMode mode, std::uint64_t seed);
Checkpoint read_checkpoint(const std::string& path);

/// Sidecar metadata: sorted `key = value` lines.
void write_metadata(std::ostream& out, const std::map<std::string, std::string>& meta);
std::map<std::string, std::string> read_metadata(std::istream& in);

}  // namespace fsrec
