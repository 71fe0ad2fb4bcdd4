// Copyright 2026 The PointCert Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace pointcert {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define POINTCERT_DEFINE_ERROR(Name)  \
  class Name : public Error {         \
   public:                            \
    using Error::Error;               \
  }

POINTCERT_DEFINE_ERROR(EncodingError);
POINTCERT_DEFINE_ERROR(DimensionError);
POINTCERT_DEFINE_ERROR(ConfigError);
POINTCERT_DEFINE_ERROR(EmptyInputError);
POINTCERT_DEFINE_ERROR(TrainingError);
/// Every sub-point cloud is empty, so the ensemble has nothing to vote on.
POINTCERT_DEFINE_ERROR(NoEvidenceError);
POINTCERT_DEFINE_ERROR(BudgetError);
/// Exhaustive enumeration would exceed the state bound.
POINTCERT_DEFINE_ERROR(ScaleError);
POINTCERT_DEFINE_ERROR(ConstructionError);
POINTCERT_DEFINE_ERROR(FormatError);
POINTCERT_DEFINE_ERROR(IoError);

/// External classifier/completion process failed, timed out or broke protocol.
POINTCERT_DEFINE_ERROR(ClassifierBackendError);

#undef POINTCERT_DEFINE_ERROR

}  // namespace pointcert
