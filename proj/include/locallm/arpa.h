// arpa.h
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
// ARPA backoff text format. Probabilities and backoffs are log10 values
// written with 7 significant digits; the highest order carries no backoff
// column. Unigrams are written in id order so that reading a file back
// reproduces the vocabulary ids.

#ifndef LOCALLM_ARPA_H_
#define LOCALLM_ARPA_H_

#include <iosfwd>
#include <string>

#include "locallm/kneser_ney.h"

namespace locallm {

void WriteArpa(const KneserNeyLM &lm, std::ostream &out);

// Throws ParseError (with line number) on malformed headers, entries whose
// order does not match their section, or declared counts that disagree with
// the entries present.
KneserNeyLM ReadArpa(std::istream &in, const std::string &source = "<arpa>");

void WriteArpaFile(const KneserNeyLM &lm, const std::string &path);
KneserNeyLM ReadArpaFile(const std::string &path);

}  // namespace locallm

#endif  // LOCALLM_ARPA_H_
