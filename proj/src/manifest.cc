// manifest.cc
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

#include "locallm/manifest.h"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#include "locallm/error.h"

namespace locallm {
namespace {

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialize SHA-256");
    }
  }
  void Update(const char *data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string HexFinal() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("SHA-256 final failed");
    static const char *kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string Sha256Hex(const std::string &bytes) {
  Digest d;
  d.Update(bytes.data(), bytes.size());
  return d.HexFinal();
}

std::string Sha256File(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  Digest d;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    d.Update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return d.HexFinal();
}

void AppendManifest(const std::string &dir, const std::string &subcommand,
                    const std::string &output, const std::vector<std::string> &inputs,
                    std::uint64_t seed, const std::string &parameters) {
  const std::string path = (std::filesystem::path(dir) / "manifest.tsv").string();
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write '" + path + "'");
  if (fresh) out << "timestamp\tsubcommand\toutput\tinputs\tversion\tseed\tparameters\n";
  std::string hashes;
  for (const auto &in : inputs) {
    if (!hashes.empty()) hashes += ';';
    hashes += in + "=" + Sha256File(in);
  }
  out << Timestamp() << '\t' << subcommand << '\t' << output << '\t'
      << (hashes.empty() ? "-" : hashes) << '\t' << kVersion << '\t' << seed << '\t'
      << (parameters.empty() ? "-" : parameters) << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace locallm
