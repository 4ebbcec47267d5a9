#pragma once

#include <string>

#include "json.hpp"

namespace mlfw::nn {

enum class CellType { LSTM, GRU };

const char* to_string(CellType cell);
CellType parse_cell(const std::string& name);

struct ArchDescriptor {
  CellType cell = CellType::LSTM;
  int layers = 2;
  int hidden_dim = 64;
  int embed_dim = 64;
  int vocab_size = 10;
  // Constant added to the LSTM forget-gate pre-activation. Equivalent to
  // initializing the forget bias at this value while keeping every stored
  // parameter inside the uniform init range.
  double forget_bias = 1.0;

  int gate_count() const { return cell == CellType::LSTM ? 4 : 3; }
  void validate() const;

  bool operator==(const ArchDescriptor&) const = default;
};

nlohmann::ordered_json to_json(const ArchDescriptor& arch);
ArchDescriptor arch_from_json(const nlohmann::json& j);

}  // namespace mlfw::nn
