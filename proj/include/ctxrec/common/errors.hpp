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

#include <stdexcept>
#include <string>

namespace ctxrec {

/// Coarse error families. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kConfig,     // invalid configuration or layer shape
  kData,       // ingestion, schema, or dataset-shape problems
  kTraining,   // divergence during optimization
  kModel,      // shape mismatches and misuse of a model
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define CTXREC_DEFINE_ERROR(Name, Kind)                        \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& what)                     \
        : Error(ErrorKind::Kind, std::string(#Name ": ") + what) {} \
  }

// data
CTXREC_DEFINE_ERROR(FileNotFound, kData);
CTXREC_DEFINE_ERROR(SchemaMismatch, kData);
CTXREC_DEFINE_ERROR(ParseError, kData);
CTXREC_DEFINE_ERROR(UnknownCategory, kData);
CTXREC_DEFINE_ERROR(EmptyDataset, kData);
CTXREC_DEFINE_ERROR(DegenerateSplit, kData);
CTXREC_DEFINE_ERROR(IoError, kData);

// configuration
CTXREC_DEFINE_ERROR(InvalidSpec, kConfig);
CTXREC_DEFINE_ERROR(InvalidConfig, kConfig);

// model / numerics
CTXREC_DEFINE_ERROR(ShapeMismatch, kModel);
CTXREC_DEFINE_ERROR(EmptyInput, kModel);
CTXREC_DEFINE_ERROR(NonFiniteGradient, kTraining);
CTXREC_DEFINE_ERROR(NonDeterministicClosure, kModel);
CTXREC_DEFINE_ERROR(EmptyCorpus, kData);
CTXREC_DEFINE_ERROR(RaggedSequences, kData);
CTXREC_DEFINE_ERROR(DivergedTraining, kTraining);
CTXREC_DEFINE_ERROR(EncoderSchemaMismatch, kModel);
CTXREC_DEFINE_ERROR(UnknownUser, kModel);
CTXREC_DEFINE_ERROR(UnknownItem, kModel);
CTXREC_DEFINE_ERROR(PositiveNotInCandidates, kModel);

#undef CTXREC_DEFINE_ERROR

}  // namespace ctxrec
