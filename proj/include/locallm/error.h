// error.h
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
//
// Exception types shared by all modules.

#ifndef LOCALLM_ERROR_H_
#define LOCALLM_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace locallm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The message is prefixed with "<source>:<line>: ".
class ParseError : public Error {
 public:
  ParseError(const std::string &source, std::size_t line,
             const std::string &what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A model was asked for something it cannot provide, e.g. a full
// distribution from a per-token log-probability file.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Missing record in a keyed lookup.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Tokens or positions from two sources do not line up.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace locallm

#endif  // LOCALLM_ERROR_H_
