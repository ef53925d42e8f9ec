// Copyright 2026 The iiv Authors
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

#ifndef IIV__ERROR_HPP_
#define IIV__ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>

namespace iiv
{

enum class ErrorKind {
  NoMarks,
  NoIlluminationContrast,
  FlatMark,
  DegenerateMark,
  DimensionMismatch,
  InvalidStroke,
  InvalidInput,
  Io,
};

const char * to_string(ErrorKind kind) noexcept;

/// True for errors that mean the user's marks need fixing rather than the input files.
constexpr bool is_guidance_error(ErrorKind kind) noexcept
{
  return kind == ErrorKind::NoMarks || kind == ErrorKind::NoIlluminationContrast ||
         kind == ErrorKind::FlatMark || kind == ErrorKind::DegenerateMark;
}

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message, std::optional<int> mark_index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<int> mark_index() const noexcept { return mark_index_; }

  /// Copy of this error tagged with the index of the mark that produced it.
  Error with_mark(int index) const;

  /// Message without the mark prefix.
  const std::string & detail() const noexcept { return detail_; }

private:
  ErrorKind kind_;
  std::optional<int> mark_index_;
  std::string detail_;
};

}  // namespace iiv

#endif  // IIV__ERROR_HPP_
