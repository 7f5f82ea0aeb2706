/*
 * Copyright (C) 2026 The dmcid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmcid {

enum class ErrorCode {
  NonStochasticRow,
  NegativeEntry,
  BadParameter,
  LengthMismatch,
  BadEta,
  EmptyRow,
  BadAlpha,
  BadEps,
  BadDelta,
  BadY,
  BadIndex,
  AlphabetMismatch,
  EmptySet,
  NonUniqueBest,
  GenerationTimeout,
  BudgetOverflow,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadEta: return "BadEta";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::BadEps: return "BadEps";
    case ErrorCode::BadDelta: return "BadDelta";
    case ErrorCode::BadY: return "BadY";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NonUniqueBest: return "NonUniqueBest";
    case ErrorCode::GenerationTimeout: return "GenerationTimeout";
    case ErrorCode::BudgetOverflow: return "BudgetOverflow";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable code; what() is "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dmcid
