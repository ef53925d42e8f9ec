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

#include "iiv/error.hpp"

namespace iiv
{

const char * to_string(ErrorKind kind) noexcept
{
  switch (kind) {
    case ErrorKind::NoMarks:
      return "NoMarks";
    case ErrorKind::NoIlluminationContrast:
      return "NoIlluminationContrast";
    case ErrorKind::FlatMark:
      return "FlatMark";
    case ErrorKind::DegenerateMark:
      return "DegenerateMark";
    case ErrorKind::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::InvalidStroke:
      return "InvalidStroke";
    case ErrorKind::InvalidInput:
      return "InvalidInput";
    case ErrorKind::Io:
      return "Io";
  }
  return "Unknown";
}

namespace
{
std::string format_message(ErrorKind kind, const std::string & detail, std::optional<int> mark)
{
  std::string out = to_string(kind);
  if (mark) {
    out += " (mark " + std::to_string(*mark) + ")";
  }
  out += ": " + detail;
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string & message, std::optional<int> mark_index)
: std::runtime_error(format_message(kind, message, mark_index)),
  kind_(kind),
  mark_index_(mark_index),
  detail_(message)
{
}

Error Error::with_mark(int index) const { return Error(kind_, detail_, index); }

}  // namespace iiv
