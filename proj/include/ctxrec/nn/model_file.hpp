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

#pragma once

#include <string>

#include "ctxrec/nn/parameters.hpp"
#include "json.hpp"

namespace ctxrec::nn {

/// Model file: one line of compact JSON header, then the parameter container.
struct ModelFile {
  nlohmann::json header;
  ParameterSet params;
};

void write_model_file(const std::string& path, const nlohmann::json& header,
                      const ParameterSet& params);
ModelFile read_model_file(const std::string& path);

/// FNV-1a over the file's bytes; used to tie bundles to the encoder they used.
std::string file_digest(const std::string& path);

}  // namespace ctxrec::nn
