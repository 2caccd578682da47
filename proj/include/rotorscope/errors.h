// Copyright 2026 The rotorscope Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rotorscope
{
// Malformed input bytes or text. `offset` is a byte offset (binary formats)
// or a 1-based line number (text formats).
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string & what, std::size_t offset)
  : std::runtime_error(what + " (at " + std::to_string(offset) + ")"), offset_(offset)
  {
  }
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// Wrong magic bytes or an unknown format selector.
class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a semantic constraint (geometry, ordering).
class ValidationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

}  // namespace rotorscope
