/*
 * Copyright 2026 The oodfair Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OODFAIR_ERRORS_H_
#define OODFAIR_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace oodfair {

enum class ErrorCode {
  kMalformedScene,
  kDuplicateSceneId,
  kEmptyDataset,
  kKTooLarge,
  kUnknownClass,
  kInsufficientReferences,
  kSubjectUnavailable,
  kProtocolError,
  kEmptyAfterFiltering,
  kDegenerateSamples,
  kConfig,
  kStageFailure,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and tests) can branch on the kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class MalformedScene : public Error {
 public:
  MalformedScene(std::string file, std::string reason);

  const std::string& file() const noexcept { return file_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string file_;
  std::string reason_;
};

}  // namespace oodfair

#endif  // OODFAIR_ERRORS_H_
