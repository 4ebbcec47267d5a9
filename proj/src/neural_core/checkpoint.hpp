#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "neural_core/params.hpp"

namespace mlfw::nn {

using Params = ParamSet<float>;

inline constexpr char kCheckpointMagic[4] = {'M', 'L', 'F', 'W'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Params params;
  // Free-form provenance stored alongside the architecture.
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

// Layout (all integers little-endian uint32):
//   "MLFW" version header_len header_json array_count
//   per array: name_len name rank dims... float32 values (row-major)
// header_json = {"arch": {...}, "metadata": {...}}
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// FNV-1a of the serialized bytes, hex encoded.
std::string checkpoint_hash(const Checkpoint& ckpt);

}  // namespace mlfw::nn
