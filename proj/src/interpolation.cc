// interpolation.cc
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

#include "locallm/interpolation.h"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Core>

#include "locallm/error.h"
#include "locallm/numeric.h"

namespace locallm {

std::string_view ModeName(InterpolationMode mode) {
  return mode == InterpolationMode::kAdditive ? "add" : "mult";
}

InterpolationMode ParseMode(std::string_view name) {
  if (name == "add" || name == "additive") return InterpolationMode::kAdditive;
  if (name == "mult" || name == "multiplicative") {
    return InterpolationMode::kMultiplicative;
  }
  throw Error("unknown interpolation mode '" + std::string(name) + "'");
}

void InterpolationSpec::Validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error("interpolation weight must lie in [0, 1], got " + std::to_string(gamma));
  }
  if (!base || !local) throw Error("interpolation needs both a base and a local model");
  if (&base->vocab() != &local->vocab() && !(base->vocab() == local->vocab())) {
    throw Error("interpolated models must share one vocabulary");
  }
  if (mode == InterpolationMode::kMultiplicative &&
      (!base->HasFullDistribution() || !local->HasFullDistribution())) {
    throw CapabilityError(
        "multiplicative interpolation needs full distributions from both models");
  }
}

double MixAdditive(double log_local, double log_base, double gamma) {
  if (gamma == 0.0) return log_base;
  if (gamma == 1.0) return log_local;
  return LogAddExp(std::log(gamma) + log_local, std::log1p(-gamma) + log_base);
}

double MixMultiplicative(double log_local, double log_base, double gamma) {
  if (gamma == 0.0) return log_base;
  if (gamma == 1.0) return log_local;
  return gamma * log_local + (1.0 - gamma) * log_base;
}

double MultiplicativeLogNormalizer(std::span<const double> local,
                                   std::span<const double> base, double gamma) {
  if (local.size() != base.size()) throw Error("distribution sizes differ");
  if (local.empty()) return kLogZero;
  const Eigen::Map<const Eigen::ArrayXd> l(local.data(), local.size());
  const Eigen::Map<const Eigen::ArrayXd> b(base.data(), base.size());
  Eigen::ArrayXd mix;
  if (gamma == 0.0) {
    mix = b;
  } else if (gamma == 1.0) {
    mix = l;
  } else {
    mix = gamma * l + (1.0 - gamma) * b;
  }
  const double m = mix.maxCoeff();
  if (std::isinf(m)) return m;
  return m + std::log((mix - m).exp().sum());
}

std::optional<double> NormalizerCache::Find(const NGram &context) const {
  std::shared_lock lock(mu_);
  auto it = values_.find(context);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double NormalizerCache::Insert(const NGram &context, double value) {
  std::unique_lock lock(mu_);
  return values_.try_emplace(context, value).first->second;
}

std::size_t NormalizerCache::size() const {
  std::shared_lock lock(mu_);
  return values_.size();
}

void NormalizerCache::Clear() {
  std::unique_lock lock(mu_);
  values_.clear();
}

namespace {

int SpecContextLength(const InterpolationSpec &spec) {
  return std::max(spec.base->ContextLength(), spec.local->ContextLength());
}

double LogNormalizer(const InterpolationSpec &spec, std::span<const WordId> context,
                     NormalizerCache &cache) {
  // Either endpoint is a single normalized component.
  if (spec.gamma == 0.0 || spec.gamma == 1.0) return 0.0;
  context = TruncateContext(context, SpecContextLength(spec));
  const bool cacheable = context.size() <= static_cast<std::size_t>(kMaxOrder);
  NGram key;
  if (cacheable) {
    key = NGram(context);
    if (auto hit = cache.Find(key)) return *hit;
  }
  const LogDistribution local = spec.local->FullDistribution(context);
  const LogDistribution base = spec.base->FullDistribution(context);
  const double z = MultiplicativeLogNormalizer(local.values(), base.values(), spec.gamma);
  return cacheable ? cache.Insert(key, z) : z;
}

}  // namespace

double AdditiveLogProb(const InterpolationSpec &spec, WordId word,
                       std::span<const WordId> context) {
  return MixAdditive(spec.local->LogProb(word, context),
                     spec.base->LogProb(word, context), spec.gamma);
}

double MultiplicativeLogProb(const InterpolationSpec &spec, WordId word,
                             std::span<const WordId> context,
                             NormalizerCache &cache) {
  if (!spec.base->HasFullDistribution() || !spec.local->HasFullDistribution()) {
    throw CapabilityError(
        "multiplicative interpolation needs full distributions from both models");
  }
  const double unnormalized = MixMultiplicative(
      spec.local->LogProb(word, context), spec.base->LogProb(word, context), spec.gamma);
  return unnormalized - LogNormalizer(spec, context, cache);
}

LogDistribution InterpolatedDistribution(const InterpolationSpec &spec,
                                         std::span<const WordId> context,
                                         NormalizerCache &cache) {
  if (spec.mode == InterpolationMode::kMultiplicative &&
      (!spec.base->HasFullDistribution() || !spec.local->HasFullDistribution())) {
    throw CapabilityError(
        "multiplicative interpolation needs full distributions from both models");
  }
  LogDistribution local = spec.local->FullDistribution(context);
  const LogDistribution base = spec.base->FullDistribution(context);
  auto out = local.values();
  const auto b = base.values();
  if (spec.mode == InterpolationMode::kAdditive) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = MixAdditive(out[i], b[i], spec.gamma);
    }
    return local;
  }
  const double z = LogNormalizer(spec, context, cache);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = MixMultiplicative(out[i], b[i], spec.gamma) - z;
  }
  return local;
}

InterpolatedLM::InterpolatedLM(InterpolationSpec spec) : spec_(std::move(spec)) {
  spec_.Validate();
}

int InterpolatedLM::ContextLength() const { return SpecContextLength(spec_); }

double InterpolatedLM::LogProb(WordId word, std::span<const WordId> context) const {
  if (spec_.mode == InterpolationMode::kAdditive) {
    return AdditiveLogProb(spec_, word, context);
  }
  return MultiplicativeLogProb(spec_, word, context, cache_);
}

bool InterpolatedLM::HasFullDistribution() const {
  return spec_.base->HasFullDistribution() && spec_.local->HasFullDistribution();
}

LogDistribution InterpolatedLM::FullDistribution(std::span<const WordId> context) const {
  return InterpolatedDistribution(spec_, context, cache_);
}

}  // namespace locallm
