// manifest.h
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
// Run manifests: one TSV line per output file,
//
//   timestamp  subcommand  output  inputs  version  seed
//
// where inputs is a `;`-separated list of `path=sha256`.

#ifndef LOCALLM_MANIFEST_H_
#define LOCALLM_MANIFEST_H_

#include <cstdint>
#include <string>
#include <vector>

namespace locallm {

inline constexpr const char *kVersion = "0.1.0";

// Lowercase hex SHA-256 of a file's bytes. Throws Error if unreadable.
std::string Sha256File(const std::string &path);
std::string Sha256Hex(const std::string &bytes);

// Appends a line to `<dir>/manifest.tsv`, writing the header first when
// the file is new. Columns: timestamp, subcommand, output, inputs as
// path=sha256 joined by ';', version, seed, parameters.
void AppendManifest(const std::string &dir, const std::string &subcommand,
                    const std::string &output, const std::vector<std::string> &inputs,
                    std::uint64_t seed, const std::string &parameters = "");

}  // namespace locallm

#endif  // LOCALLM_MANIFEST_H_
