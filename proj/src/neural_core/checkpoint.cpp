#include "neural_core/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mlfw::nn {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) fail(ErrorCode::Format, "checkpoint truncated");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

std::string get_bytes(std::istream& in, std::uint32_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) fail(ErrorCode::Format, "checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kCheckpointMagic, 4);
  put_u32(out, kCheckpointVersion);
  nlohmann::ordered_json header;
  header["arch"] = to_json(ckpt.params.arch);
  header["metadata"] = ckpt.metadata;
  const std::string text = header.dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_u32(out, static_cast<std::uint32_t>(ckpt.params.arrays.size()));
  for (std::size_t i = 0; i < ckpt.params.arrays.size(); ++i) {
    const auto& name = ckpt.params.names[i];
    const auto& a = ckpt.params.arrays[i];
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(a.rows()));
    put_u32(out, static_cast<std::uint32_t>(a.cols()));
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) put_u32(out, std::bit_cast<std::uint32_t>(a(r, c)));
    }
  }
  if (!out) fail(ErrorCode::Io, "failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    fail(ErrorCode::Format, "not a checkpoint (bad magic)");
  }
  const auto version = get_u32(in);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::Format, "unsupported checkpoint version " + std::to_string(version));
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(get_bytes(in, get_u32(in)));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("checkpoint header is not JSON: ") + e.what());
  }
  Checkpoint ckpt;
  ckpt.params = zeros<float>(arch_from_json(header.at("arch")));
  if (header.contains("metadata")) ckpt.metadata = header["metadata"];

  const auto count = get_u32(in);
  if (count != ckpt.params.arrays.size()) {
    fail(ErrorCode::ShapeMismatch, "checkpoint holds " + std::to_string(count) +
                                       " arrays; architecture expects " +
                                       std::to_string(ckpt.params.arrays.size()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = get_bytes(in, get_u32(in));
    if (name != ckpt.params.names[i]) {
      fail(ErrorCode::Format, "array " + std::to_string(i) + " is '" + name + "', expected '" +
                                  ckpt.params.names[i] + "'");
    }
    auto& a = ckpt.params.arrays[i];
    const auto rank = get_u32(in);
    if (rank != 2) fail(ErrorCode::Format, "array '" + name + "' has rank " + std::to_string(rank));
    const auto rows = get_u32(in), cols = get_u32(in);
    if (rows != a.rows() || cols != a.cols()) {
      fail(ErrorCode::ShapeMismatch, "array '" + name + "' has shape " + std::to_string(rows) + "x" +
                                         std::to_string(cols));
    }
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = std::bit_cast<float>(get_u32(in));
    }
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  return read_checkpoint(in);
}

std::string checkpoint_hash(const Checkpoint& ckpt) {
  std::ostringstream buffer;
  write_checkpoint(buffer, ckpt);
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << fnv1a64(buffer.str());
  return hex.str();
}

}  // namespace mlfw::nn
