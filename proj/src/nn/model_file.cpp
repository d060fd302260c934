// Copyright 2026 The ctxrec Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctxrec/nn/model_file.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "ctxrec/common/errors.hpp"
#include "ctxrec/common/hash.hpp"

namespace ctxrec::nn {

void write_model_file(const std::string& path, const nlohmann::json& header,
                      const ParameterSet& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << header.dump() << '\n';
  write_parameters(out, params);
}

ModelFile read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty model file");
  ModelFile file;
  try {
    file.header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": bad model header: " + e.what());
  }
  file.params = read_parameters(in);
  return file;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return to_hex(fnv1a(bytes));
}

}  // namespace ctxrec::nn
