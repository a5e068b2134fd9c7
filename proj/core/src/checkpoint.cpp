// Copyright 2026 The lexguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexguard/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>
#include <zlib.h>

namespace lexguard {

namespace {

using nlohmann::json;
using Kind = CheckpointError::Kind;

constexpr std::string_view kMagic = "LXGDCKPT";

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  const auto& params = checkpoint.model.params();
  if (!params.all_finite()) throw Error("refusing to save non-finite parameters");

  std::string data;
  json manifest = json::array();
  params.for_each([&](const std::string& name, const Matrix& m) {
    const std::size_t offset = data.size();
    for (double v : m.values()) {
      put_le<std::uint32_t>(data, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    manifest.push_back({{"name", name},
                        {"shape", {m.rows(), m.cols()}},
                        {"offset", offset},
                        {"crc32", crc_of(std::string_view(data).substr(offset))}});
  });

  const json header = {{"config", checkpoint.model.config().to_json()},
                       {"vocab", checkpoint.vocab.tokens()},
                       {"threshold", checkpoint.threshold},
                       {"tensors", std::move(manifest)},
                       {"data_bytes", data.size()}};
  const std::string header_text = header.dump();

  std::string out(kMagic);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, header_text.size());
  out += header_text;
  out += data;
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  const std::size_t prefix = kMagic.size() + 4 + 8;
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CheckpointError(Kind::kFormat, "not a lexguard checkpoint");
  }
  if (bytes.size() < prefix) throw CheckpointError(Kind::kTruncated, "checkpoint truncated in preamble");
  const auto version = get_le<std::uint32_t>(bytes, kMagic.size());
  if (version != kCheckpointVersion) {
    throw CheckpointError(Kind::kVersionMismatch,
                          "checkpoint version " + std::to_string(version) +
                              ", expected " + std::to_string(kCheckpointVersion));
  }
  const auto header_size = get_le<std::uint64_t>(bytes, kMagic.size() + 4);
  if (bytes.size() - prefix < header_size) {
    throw CheckpointError(Kind::kTruncated, "checkpoint truncated in header");
  }
  const json header = json::parse(bytes.substr(prefix, header_size), nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw CheckpointError(Kind::kFormat, "checkpoint header is not valid JSON");
  }
  const std::string_view data = bytes.substr(prefix + header_size);

  try {
    const auto config = EncoderConfig::from_json(header.at("config"));
    const auto data_bytes = header.at("data_bytes").get<std::size_t>();
    if (data.size() < data_bytes) {
      throw CheckpointError(Kind::kTruncated, "checkpoint truncated in tensor data");
    }
    if (data.size() > data_bytes) {
      throw CheckpointError(Kind::kFormat, "trailing bytes after tensor data");
    }
    try {
      config.validate();
    } catch (const Error& e) {
      throw CheckpointError(Kind::kShapeMismatch, e.what());
    }

    auto params = ParameterSet::zeros(config);
    const auto& manifest = header.at("tensors");
    std::size_t i = 0;
    std::size_t expected_offset = 0;
    params.for_each([&](const std::string& name, Matrix& m) {
      if (i >= manifest.size()) {
        throw CheckpointError(Kind::kShapeMismatch, "missing tensor " + name);
      }
      const auto& entry = manifest.at(i++);
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      if (entry.at("name").get<std::string>() != name || shape.size() != 2 ||
          shape[0] != m.rows() || shape[1] != m.cols()) {
        throw CheckpointError(Kind::kShapeMismatch,
                              "tensor " + entry.at("name").get<std::string>() +
                                  " does not match the shape implied by the config");
      }
      const auto offset = entry.at("offset").get<std::size_t>();
      const std::size_t n = m.size() * 4;
      if (offset != expected_offset || offset + n > data.size()) {
        throw CheckpointError(Kind::kShapeMismatch, "tensor " + name + " has a bad offset");
      }
      const auto chunk = data.substr(offset, n);
      if (crc_of(chunk) != entry.at("crc32").get<std::uint32_t>()) {
        throw CheckpointError(Kind::kChecksum, "checksum mismatch in tensor " + name);
      }
      auto values = m.values();
      for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = static_cast<double>(
            std::bit_cast<float>(get_le<std::uint32_t>(chunk, 4 * k)));
      }
      expected_offset += n;
    });
    if (i != manifest.size()) {
      throw CheckpointError(Kind::kShapeMismatch, "unexpected extra tensors");
    }
    if (expected_offset != data_bytes) {
      throw CheckpointError(Kind::kShapeMismatch, "tensor data size mismatch");
    }
    auto vocab = Vocabulary::from_tokens(header.at("vocab").get<std::vector<std::string>>());
    if (vocab.size() != config.vocab_size) {
      throw CheckpointError(Kind::kShapeMismatch, "vocabulary size does not match config");
    }
    return Checkpoint{GuardrailModel(config, std::move(params)), std::move(vocab),
                      header.at("threshold").get<double>()};
  } catch (const json::exception& e) {
    throw CheckpointError(Kind::kFormat, std::string("bad checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(Kind::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(Kind::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::kIo, "cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace lexguard
