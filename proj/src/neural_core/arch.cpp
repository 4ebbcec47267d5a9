#include "neural_core/arch.hpp"

#include "common/error.hpp"

namespace mlfw::nn {

const char* to_string(CellType cell) { return cell == CellType::LSTM ? "lstm" : "gru"; }

CellType parse_cell(const std::string& name) {
  if (name == "lstm" || name == "LSTM") return CellType::LSTM;
  if (name == "gru" || name == "GRU") return CellType::GRU;
  fail(ErrorCode::InvalidArgument, "unknown cell type '" + name + "' (expected lstm or gru)");
}

void ArchDescriptor::validate() const {
  if (layers < 1 || hidden_dim < 1 || embed_dim < 1 || vocab_size < 1) {
    fail(ErrorCode::InvalidArgument, "architecture needs layers, dims and vocab >= 1");
  }
}

nlohmann::ordered_json to_json(const ArchDescriptor& arch) {
  nlohmann::ordered_json j;
  j["cell"] = to_string(arch.cell);
  j["layers"] = arch.layers;
  j["hidden_dim"] = arch.hidden_dim;
  j["embed_dim"] = arch.embed_dim;
  j["vocab_size"] = arch.vocab_size;
  j["forget_bias"] = arch.forget_bias;
  return j;
}

ArchDescriptor arch_from_json(const nlohmann::json& j) {
  ArchDescriptor arch;
  try {
    arch.cell = parse_cell(j.value("cell", std::string("lstm")));
    arch.layers = j.value("layers", arch.layers);
    arch.hidden_dim = j.value("hidden_dim", arch.hidden_dim);
    // Embedding width follows the hidden width unless given.
    arch.embed_dim = j.value("embed_dim", arch.hidden_dim);
    arch.vocab_size = j.value("vocab_size", arch.vocab_size);
    arch.forget_bias = j.value("forget_bias", arch.forget_bias);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("bad architecture descriptor: ") + e.what());
  }
  arch.validate();
  return arch;
}

}  // namespace mlfw::nn
