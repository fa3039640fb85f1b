// Copyright 2026 the sawt authors
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

#include "sawt/model/checkpoint.h"

#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "sawt/util/error.h"

namespace sawt::model {

namespace {

constexpr char kMagic[8] = {'S', 'A', 'W', 'T', 'C', 'K', 'P', '1'};

void WriteU32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void WriteU64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}
std::uint32_t ReadU32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint64_t ReadU64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

struct Header {
  CheckpointInfo info;
  std::uint64_t array_count = 0;
};

Header ReadHeader(std::ifstream& in, const std::string& path) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw DataError("UnsupportedFormat", path + ": bad checkpoint magic");
  }
  const std::uint32_t version = ReadU32(in);
  if (version != kCheckpointVersion) {
    throw DataError("UnsupportedFormat",
                    path + ": checkpoint version " + std::to_string(version));
  }
  const std::uint64_t json_len = ReadU64(in);
  std::string header_json(json_len, '\0');
  in.read(header_json.data(), static_cast<std::streamsize>(json_len));
  if (!in) throw DataError("ParseError", path + ": truncated header");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header_json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("ParseError", path + ": header json: " + e.what());
  }
  Header h;
  h.info.config = ModelConfig::FromJson(j.at("config").dump());
  h.info.meta_json = j.value("meta", nlohmann::json::object()).dump();
  h.array_count = ReadU64(in);
  return h;
}

}  // namespace

void SaveCheckpoint(const std::string& path, const ModelConfig& config,
                    const nn::ParamStore& params, const std::string& meta_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("FileNotFound", "cannot write checkpoint " + path);
  out.write(kMagic, 8);
  WriteU32(out, kCheckpointVersion);

  nlohmann::json header;
  header["config"] = nlohmann::json::parse(config.ToJson());
  header["meta"] = nlohmann::json::parse(meta_json);
  const std::string header_str = header.dump();
  WriteU64(out, header_str.size());
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));

  WriteU64(out, params.items().size());
  for (const auto& p : params.items()) {
    WriteU32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    out.put(1);  // dtype: float64
    WriteU64(out, static_cast<std::uint64_t>(p->value.rows()));
    WriteU64(out, static_cast<std::uint64_t>(p->value.cols()));
    for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
        const double v = p->value(i, j);
        out.write(reinterpret_cast<const char*>(&v), 8);
      }
    }
  }
  if (!out) throw DataError("FileNotFound", "short write to " + path);
}

CheckpointInfo LoadCheckpoint(const std::string& path, nn::ParamStore& params,
                              const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open checkpoint " + path);
  const Header header = ReadHeader(in, path);

  std::set<std::string> loaded;
  for (std::uint64_t a = 0; a < header.array_count; ++a) {
    const std::uint32_t name_len = ReadU32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const int dtype = in.get();
    if (dtype != 1) {
      throw DataError("UnsupportedFormat", path + ": unknown dtype");
    }
    const auto rows = static_cast<Eigen::Index>(ReadU64(in));
    const auto cols = static_cast<Eigen::Index>(ReadU64(in));
    nn::Mat value(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        value(i, j) = v;
      }
    }
    if (!in) throw DataError("ParseError", path + ": truncated array " + name);

    nn::Parameter* p = params.Find(name);
    if (p == nullptr) {
      if (!options.allow_extra) {
        throw DataError("ParseError",
                        path + ": checkpoint array '" + name +
                            "' has no matching parameter");
      }
      continue;
    }
    if (p->value.rows() == rows && p->value.cols() == cols) {
      p->value = value;
    } else if (options.grow_dims && p->value.cols() == cols &&
               p->value.rows() > rows) {
      p->value.topRows(rows) = value;
    } else if (options.grow_dims && p->value.rows() == rows &&
               p->value.cols() > cols) {
      p->value.leftCols(cols) = value;
    } else {
      throw DataError("ParseError",
                      path + ": shape mismatch on '" + name + "' (" +
                          std::to_string(rows) + "x" + std::to_string(cols) +
                          " vs " + std::to_string(p->value.rows()) + "x" +
                          std::to_string(p->value.cols()) + ")");
    }
    loaded.insert(name);
  }

  if (!options.allow_missing) {
    for (const auto& p : params.items()) {
      if (!loaded.contains(p->name)) {
        throw DataError("ParseError",
                        path + ": parameter '" + p->name +
                            "' missing from checkpoint");
      }
    }
  }
  return header.info;
}

CheckpointInfo PeekCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open checkpoint " + path);
  return ReadHeader(in, path).info;
}

}  // namespace sawt::model
