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

#include "oodfair/errors.h"

namespace oodfair {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedScene: return "MalformedScene";
    case ErrorCode::kDuplicateSceneId: return "DuplicateSceneId";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kInsufficientReferences: return "InsufficientReferences";
    case ErrorCode::kSubjectUnavailable: return "SubjectUnavailable";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kEmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::kDegenerateSamples: return "DegenerateSamples";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kStageFailure: return "StageFailure";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

MalformedScene::MalformedScene(std::string file, std::string reason)
    : Error(ErrorCode::kMalformedScene, file + ": " + reason),
      file_(std::move(file)),
      reason_(std::move(reason)) {}

}  // namespace oodfair
