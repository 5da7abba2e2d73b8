// locallm.cc
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
// Command-line driver: vocab, count, train, eval-ppl, sweep, surprisal,
// rt-prep, rt-fit, rt-analyze, synth.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locallm/analysis.h"
#include "locallm/arpa.h"
#include "locallm/corpus.h"
#include "locallm/error.h"
#include "locallm/evaluation.h"
#include "locallm/external_lm.h"
#include "locallm/interpolation.h"
#include "locallm/kneser_ney.h"
#include "locallm/manifest.h"
#include "locallm/ngram.h"
#include "locallm/reading_time.h"
#include "locallm/regression.h"

namespace fs = std::filesystem;
using namespace locallm;

namespace {

struct RunConfig {
  std::string train, eval, vocab, text, fixations, series;
  std::uint64_t min_count = 3;
  int order = 3;
  std::string model, base, local, unigram, bigram, trigram;
  int local_order = 2;
  std::string mode = "mult";
  double gamma = 0.0;
  double gamma_step = 0.01;
  std::string subject_effects = "intercepts";
  std::uint64_t seed = 1;
  std::string out = "out";
  bool bits = false;
  std::size_t n = 50000;
  int subjects = 10;
  double noise_sd = 50.0;
};

using ModelPtr = std::shared_ptr<const KneserNeyLM>;

void RequireFile(const std::string &path, const std::string &flag) {
  if (path.empty()) throw Error(flag + " is required");
  if (!fs::is_regular_file(path)) throw Error(flag + " file '" + path + "' does not exist");
}

std::string OutPath(const RunConfig &cfg, const std::string &name) {
  fs::create_directories(cfg.out);
  return (fs::path(cfg.out) / name).string();
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

std::string Parameters(const RunConfig &cfg) {
  std::ostringstream p;
  p << "min_count=" << cfg.min_count << ";order=" << cfg.order
    << ";local_order=" << cfg.local_order << ";mode=" << cfg.mode << ";gamma=" << cfg.gamma
    << ";gamma_step=" << cfg.gamma_step << ";subject_effects=" << cfg.subject_effects
    << ";n=" << cfg.n << ";subjects=" << cfg.subjects << ";noise_sd=" << cfg.noise_sd;
  return p.str();
}

void Finish(const RunConfig &cfg, const std::string &sub, std::ofstream &out,
            const std::string &path, const std::vector<std::string> &inputs) {
  out.close();
  if (!out) throw Error("failed writing '" + path + "'");
  AppendManifest(cfg.out, sub, fs::path(path).filename().string(), inputs, cfg.seed,
                 Parameters(cfg));
  std::cerr << "wrote " << path << "\n";
}

class ModelStore {
 public:
  ModelPtr Get(const std::string &path, const std::string &flag) {
    RequireFile(path, flag);
    auto it = models_.find(path);
    if (it != models_.end()) return it->second;
    auto lm = std::make_shared<const KneserNeyLM>(ReadArpaFile(path));
    if (!models_.empty() && !(lm->vocab() == models_.begin()->second->vocab())) {
      throw Error("model '" + path + "' does not share the other models' vocabulary");
    }
    models_[path] = lm;
    return lm;
  }

 private:
  std::map<std::string, ModelPtr> models_;
};

std::shared_ptr<const Vocabulary> TrainingVocab(const RunConfig &cfg) {
  if (!cfg.vocab.empty()) {
    RequireFile(cfg.vocab, "--vocab");
    std::ifstream in(cfg.vocab);
    return std::make_shared<const Vocabulary>(Vocabulary::ReadTsv(in, cfg.vocab));
  }
  return std::make_shared<const Vocabulary>(BuildVocabularyFromFile(cfg.train, cfg.min_count));
}

std::vector<std::string> TrainingInputs(const RunConfig &cfg) {
  std::vector<std::string> in{cfg.train};
  if (!cfg.vocab.empty()) in.push_back(cfg.vocab);
  return in;
}

// The model of local order k: --local wins, then the order-specific flag.
std::string LocalModelPath(const RunConfig &cfg, int k, std::string *flag) {
  if (!cfg.local.empty()) {
    *flag = "--local";
    return cfg.local;
  }
  const std::string *paths[] = {&cfg.unigram, &cfg.bigram, &cfg.trigram};
  static const char *flags[] = {"--unigram", "--bigram", "--trigram"};
  *flag = flags[k - 1];
  return *paths[k - 1];
}

void CheckOrder(const KneserNeyLM &lm, int k, const std::string &flag) {
  if (lm.order() != k) {
    throw Error(flag + " has order " + std::to_string(lm.order()) + ", expected " +
                std::to_string(k));
  }
}

double Entropy(double ppl, bool bits) { return bits ? std::log2(ppl) : std::log(ppl); }

std::string Fixed(double x, const char *fmt = "%.6f") {
  if (std::isnan(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

void CmdVocab(const RunConfig &cfg) {
  RequireFile(cfg.train, "--train");
  const Vocabulary vocab = BuildVocabularyFromFile(cfg.train, cfg.min_count);
  const auto path = OutPath(cfg, "vocab.tsv");
  auto out = OpenOut(path);
  vocab.WriteTsv(out);
  std::cout << "vocabulary size " << vocab.size() << "\n";
  Finish(cfg, "vocab", out, path, {cfg.train});
}

void CmdCount(const RunConfig &cfg) {
  RequireFile(cfg.train, "--train");
  const auto vocab = TrainingVocab(cfg);
  const NGramCountTable counts = CountNGrams(EncodeFile(cfg.train, *vocab), cfg.order);
  const auto path = OutPath(cfg, "counts_" + std::to_string(cfg.order) + ".tsv");
  auto out = OpenOut(path);
  counts.WriteTsv(out, *vocab);
  Finish(cfg, "count", out, path, TrainingInputs(cfg));
}

void CmdTrain(const RunConfig &cfg) {
  RequireFile(cfg.train, "--train");
  const auto vocab = TrainingVocab(cfg);
  std::vector<std::string> warnings;
  const KneserNeyLM lm = TrainKneserNey(EncodeFile(cfg.train, *vocab), vocab, cfg.order, &warnings);
  for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
  const auto path = OutPath(cfg, "model_" + std::to_string(cfg.order) + ".arpa");
  auto out = OpenOut(path);
  WriteArpa(lm, out);
  Finish(cfg, "train", out, path, TrainingInputs(cfg));
}

void CmdEvalPpl(const RunConfig &cfg) {
  ModelStore store;
  auto model = store.Get(cfg.model, "--model");
  RequireFile(cfg.eval, "--eval");
  const TokenStream eval = EncodeFile(cfg.eval, model->vocab());
  std::vector<std::string> inputs{cfg.model, cfg.eval};
  double ppl;
  std::string local = "NA", mode = "NA", gamma = "NA";
  if (!cfg.local.empty()) {
    InterpolationSpec spec;
    spec.mode = ParseMode(cfg.mode);
    spec.gamma = cfg.gamma;
    spec.base = model;
    spec.local = store.Get(cfg.local, "--local");
    ppl = Perplexity(spec, eval);
    local = fs::path(cfg.local).filename().string();
    mode = std::string(ModeName(spec.mode));
    gamma = Fixed(cfg.gamma);
    inputs.push_back(cfg.local);
  } else {
    ppl = Perplexity(*model, eval);
  }
  const auto path = OutPath(cfg, "ppl.tsv");
  auto out = OpenOut(path);
  out << "model\tlocal\tmode\tgamma\ttokens\tperplexity\n"
      << fs::path(cfg.model).filename().string() << '\t' << local << '\t' << mode << '\t'
      << gamma << '\t' << eval.PredictedTokenCount() << '\t' << Fixed(ppl, "%.10f") << '\n';
  std::cout << "perplexity " << Fixed(ppl, "%.4f") << "  cross-entropy "
            << Fixed(Entropy(ppl, cfg.bits), "%.4f") << (cfg.bits ? " bits" : " nats") << "\n";
  Finish(cfg, "eval-ppl", out, path, inputs);
}

void CmdSweep(const RunConfig &cfg) {
  ModelStore store;
  auto base = store.Get(cfg.base, "--base");
  std::string flag;
  const std::string local_path = LocalModelPath(cfg, cfg.local_order, &flag);
  auto local = store.Get(local_path, flag);
  RequireFile(cfg.eval, "--eval");
  const TokenStream eval = EncodeFile(cfg.eval, base->vocab());
  const InterpolationMode mode = ParseMode(cfg.mode);
  const SweepResult r = Sweep(*base, *local, mode, eval, cfg.gamma_step);
  const auto path = OutPath(cfg, "sweep_" + std::string(ModeName(mode)) + ".csv");
  auto out = OpenOut(path);
  WriteSweepCsv(r, out);
  std::cout << "best gamma " << Fixed(r.best_gamma, "%.2f") << "  perplexity "
            << Fixed(r.best_perplexity, "%.4f") << "  (base " << Fixed(r.base_perplexity, "%.4f")
            << ", local " << Fixed(r.local_perplexity, "%.4f") << ")\n";
  Finish(cfg, "sweep", out, path, {cfg.base, local_path, cfg.eval});
}

void CmdSurprisal(const RunConfig &cfg) {
  ModelStore store;
  auto model = store.Get(cfg.model, "--model");
  RequireFile(cfg.eval, "--eval");
  const TokenStream eval = EncodeFile(cfg.eval, model->vocab());
  const TokenLogProbSeries series =
      ScoreStream(*model, eval, fs::path(cfg.model).filename().string());
  const auto path = OutPath(cfg, "surprisal.tsv");
  auto out = OpenOut(path);
  series.WriteTsv(out);
  Finish(cfg, "surprisal", out, path, {cfg.model, cfg.eval});
}

void CmdRtPrep(const RunConfig &cfg) {
  const int k = cfg.local_order;
  RequireFile(cfg.fixations, "--fixations");
  ModelStore store;
  DesignModels models;
  std::vector<std::string> inputs{cfg.fixations};
  auto unigram = store.Get(cfg.unigram, "--unigram");
  CheckOrder(*unigram, 1, "--unigram");
  models.unigram = unigram.get();
  inputs.push_back(cfg.unigram);
  ModelPtr base, local;
  std::optional<TokenLogProbSeries> series;
  if (!cfg.series.empty()) {
    RequireFile(cfg.series, "--series");
    series = LoadTokenLogProbsFile(cfg.series);
    models.series = &*series;
    inputs.push_back(cfg.series);
  } else {
    base = store.Get(cfg.base, "--base");
    models.base = base.get();
    inputs.push_back(cfg.base);
  }
  if (k > 1) {
    std::string flag;
    const std::string path = LocalModelPath(cfg, k, &flag);
    local = store.Get(path, flag);
    CheckOrder(*local, k, flag);
    models.local = local.get();
    inputs.push_back(path);
  }

  const auto records = LoadFixationsFile(cfg.fixations);
  const TextIndex index = TextIndex::FromRecords(records);
  ExclusionReport report;
  const auto kept = ApplyExclusions(records, unigram->vocab(), index, &report);
  const RegressionDataset design = BuildDesign(kept, index, models, k);

  const auto dpath = OutPath(cfg, "design_" + std::to_string(k) + ".tsv");
  auto dout = OpenOut(dpath);
  design.WriteTsv(dout);
  Finish(cfg, "rt-prep", dout, dpath, inputs);
  const auto epath = OutPath(cfg, "exclusions.tsv");
  auto eout = OpenOut(epath);
  report.WriteTsv(eout);
  Finish(cfg, "rt-prep", eout, epath, inputs);
  std::cout << report.input << " records, " << report.output << " retained\n";
}

FitOptions MakeFitOptions(const RunConfig &cfg, int k) {
  FitOptions opt;
  opt.subject_effects = ParseSubjectEffects(cfg.subject_effects);
  if (opt.subject_effects == SubjectEffects::kInterceptsAndSlopes) {
    opt.slope_predictors = LocalColumns(k);
  }
  return opt;
}

void WriteTable(const RunConfig &cfg, const CoefficientTable &t, const std::string &name,
                const std::vector<std::string> &inputs) {
  const auto path = OutPath(cfg, name);
  auto out = OpenOut(path);
  t.WriteTsv(out);
  Finish(cfg, "rt-fit", out, path, inputs);
}

void CmdRtFit(const RunConfig &cfg) {
  const int k = cfg.local_order;
  const auto dpath = (fs::path(cfg.out) / ("design_" + std::to_string(k) + ".tsv")).string();
  if (!fs::is_regular_file(dpath)) {
    throw Error("missing design matrix '" + dpath + "'; run rt-prep first");
  }
  std::ifstream in(dpath);
  const RegressionDataset data = RegressionDataset::ReadTsv(in, dpath);
  if (data.local_order != k) throw Error("design matrix '" + dpath + "' has the wrong order");
  const FitOptions opt = MakeFitOptions(cfg, k);

  const auto full_predictors = ModelPredictors(k);
  const CoefficientTable full = FitWithDropOneTests(data, full_predictors, opt);
  std::vector<std::string> reduced_predictors;
  const auto local_cols = LocalColumns(k);
  for (const auto &p : full_predictors) {
    if (std::find(local_cols.begin(), local_cols.end(), p) == local_cols.end()) {
      reduced_predictors.push_back(p);
    }
  }
  FitOptions reduced_opt = opt;
  reduced_opt.slope_predictors.clear();
  const CoefficientTable reduced = FitLinear(data, reduced_predictors, reduced_opt);
  const LrtResult lrt = Lrt(full, reduced);

  WriteTable(cfg, full, "coefficients_" + std::to_string(k) + ".tsv", {dpath});
  if (k > 1) {
    const CoefficientTable baseline = FitWithDropOneTests(data, ModelPredictors(1), MakeFitOptions(cfg, 1));
    WriteTable(cfg, baseline, "coefficients_1.tsv", {dpath});
  }
  const auto lpath = OutPath(cfg, "lrt_" + std::to_string(k) + ".tsv");
  auto lout = OpenOut(lpath);
  lout << "comparison\tstatistic\tdf\tp_value\n"
       << LocalStatName(k) << "\t" << Fixed(lrt.statistic, "%.10g") << '\t' << lrt.df << '\t'
       << Fixed(lrt.p_value, "%.10g") << '\n';
  Finish(cfg, "rt-fit", lout, lpath, {dpath});
  std::cout << "LRT for " << LocalStatName(k) << ": chi2 = " << Fixed(lrt.statistic, "%.3f")
            << ", df = " << lrt.df << ", p = " << Fixed(lrt.p_value, "%.3g") << "\n";
}

void CmdRtAnalyze(const RunConfig &cfg) {
  ModelStore store;
  ModelPtr base;
  std::optional<TokenStream> eval;
  std::vector<std::string> inputs;
  const bool with_ppl = !cfg.base.empty() && !cfg.eval.empty();
  if (with_ppl) {
    base = store.Get(cfg.base, "--base");
    RequireFile(cfg.eval, "--eval");
    eval = EncodeFile(cfg.eval, base->vocab());
    inputs = {cfg.base, cfg.eval};
  }

  std::vector<ReportRow> rows;
  for (int k = 1; k <= 3; ++k) {
    const auto cpath = (fs::path(cfg.out) / ("coefficients_" + std::to_string(k) + ".tsv")).string();
    if (!fs::is_regular_file(cpath)) continue;
    std::ifstream in(cpath);
    const CoefficientTable table = CoefficientTable::ReadTsv(in, cpath);
    inputs.push_back(cpath);

    ModelPtr local;
    std::optional<SweepResult> sweep;
    if (with_ppl) {
      const std::string *paths[] = {&cfg.unigram, &cfg.bigram, &cfg.trigram};
      static const char *flags[] = {"--unigram", "--bigram", "--trigram"};
      if (!paths[k - 1]->empty()) {
        local = store.Get(*paths[k - 1], flags[k - 1]);
        CheckOrder(*local, k, flags[k - 1]);
        inputs.push_back(*paths[k - 1]);
        sweep = Sweep(*base, *local, InterpolationMode::kMultiplicative, *eval, cfg.gamma_step);
        const auto spath = OutPath(cfg, "sweep_mult_" + std::to_string(k) + ".csv");
        auto sout = OpenOut(spath);
        WriteSweepCsv(*sweep, sout);
        Finish(cfg, "rt-analyze", sout, spath, {cfg.base, *paths[k - 1], cfg.eval});
      }
    }

    for (const auto &name : LocalColumns(k)) {
      const std::string suffix = name.substr(name.rfind('_'));
      ReportRow r;
      r.predictor = name;
      r.beta_ngram = table.Beta(name);
      r.beta_surprisal = table.Beta("surprisal" + suffix);
      r.p_value = table.p_value[table.Index(name)];
      r.effective = ComputeEffectiveWeight(r.beta_ngram, r.beta_surprisal);
      r.optimal_weight = r.optimal_ppl = r.effective_ppl = std::nan("");
      if (sweep) {
        r.optimal_weight = sweep->best_gamma;
        r.optimal_ppl = sweep->best_perplexity;
        if (r.effective.interpretable) {
          r.effective_ppl = WeightToPerplexity(r.effective.weight, *base, *local, *eval);
        }
      }
      rows.push_back(r);
    }
  }
  if (rows.empty()) {
    throw Error("no fitted models in '" + cfg.out + "'; run rt-fit first");
  }
  const auto path = OutPath(cfg, "report.tsv");
  auto out = OpenOut(path);
  WriteReport(rows, out);
  WriteReport(rows, std::cout);
  Finish(cfg, "rt-analyze", out, path, inputs);
}

void WriteTruth(const SyntheticSpec &spec, const SyntheticData &data, std::ostream &out) {
  out << "term\tvalue\n";
  out << "(intercept)\t" << Fixed(spec.intercept, "%.17g") << '\n';
  for (const auto &[name, beta] : spec.coefficients) {
    out << name << '\t' << Fixed(beta, "%.17g") << '\n';
  }
  out << "noise_sd\t" << Fixed(spec.noise_sd, "%.17g") << '\n';
  for (std::size_t s = 0; s < data.subject_offsets.size(); ++s) {
    char label[32];
    std::snprintf(label, sizeof(label), "s%02zu", s + 1);
    out << "subject[" << label << "]\t" << Fixed(data.subject_offsets[s], "%.17g") << '\n';
  }
}

void CmdSynth(const RunConfig &cfg) {
  const int k = cfg.local_order;
  RequireFile(cfg.text, "--text");
  ModelStore store;
  auto base = store.Get(cfg.base, "--base");
  auto unigram = store.Get(cfg.unigram, "--unigram");
  CheckOrder(*unigram, 1, "--unigram");
  std::vector<std::string> inputs{cfg.text, cfg.base, cfg.unigram};
  DesignModels models{base.get(), unigram.get(), nullptr, nullptr};
  ModelPtr local;
  if (k > 1) {
    std::string flag;
    const std::string path = LocalModelPath(cfg, k, &flag);
    local = store.Get(path, flag);
    CheckOrder(*local, k, flag);
    models.local = local.get();
    inputs.push_back(path);
  }
  std::ifstream in(cfg.text);
  const auto lines = ReadTokenizedLines(in);

  SyntheticSpec spec;
  spec.n = cfg.n;
  spec.subjects = cfg.subjects;
  spec.local_order = k;
  spec.noise_sd = cfg.noise_sd;
  spec.seed = cfg.seed;
  spec.coefficients = DefaultSyntheticCoefficients(k);
  const SyntheticData data = GenerateSynthetic(spec, lines, unigram->vocab(), models);

  const auto fpath = OutPath(cfg, "fixations.tsv");
  auto fout = OpenOut(fpath);
  WriteFixations(data.records, fout);
  Finish(cfg, "synth", fout, fpath, inputs);
  const auto tpath = OutPath(cfg, "truth.tsv");
  auto tout = OpenOut(tpath);
  WriteTruth(spec, data, tout);
  Finish(cfg, "synth", tout, tpath, inputs);
  std::cout << data.records.size() << " fixation records, " << data.dataset.rows()
            << " analysed\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Local n-gram statistics versus surprisal: language models, "
               "interpolation sweeps and reading-time regressions"};
  app.set_config("--config", "", "key = value run configuration; flags win");
  app.require_subcommand(1, 1);
  RunConfig cfg;

  app.add_option("--train", cfg.train, "Training text, one sentence per line");
  app.add_option("--eval", cfg.eval, "Evaluation text");
  app.add_option("--vocab", cfg.vocab, "Vocabulary TSV (default: built from --train)");
  app.add_option("--min-count", cfg.min_count, "Vocabulary count threshold")
      ->check(CLI::PositiveNumber);
  app.add_option("--order", cfg.order, "N-gram order")->check(CLI::Range(1, kMaxOrder));
  app.add_option("--model", cfg.model, "ARPA model");
  app.add_option("--base", cfg.base, "Base (high-order) ARPA model");
  app.add_option("--local", cfg.local, "Local ARPA model");
  app.add_option("--unigram", cfg.unigram, "Unigram ARPA model");
  app.add_option("--bigram", cfg.bigram, "Bigram ARPA model");
  app.add_option("--trigram", cfg.trigram, "Trigram ARPA model");
  app.add_option("--local-order", cfg.local_order, "Order of the local statistic")
      ->check(CLI::Range(1, 3));
  app.add_option("--mode", cfg.mode, "Interpolation mode")
      ->check(CLI::IsMember({"add", "mult"}));
  app.add_option("--gamma", cfg.gamma, "Local-model weight for eval-ppl")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--gamma-step", cfg.gamma_step, "Sweep grid step")
      ->check(CLI::Range(1e-6, 1.0));
  app.add_option("--fixations", cfg.fixations, "Fixation TSV");
  app.add_option("--series", cfg.series, "External per-token log-probabilities");
  app.add_option("--subject-effects", cfg.subject_effects, "Subject terms")
      ->check(CLI::IsMember({"none", "intercepts", "slopes"}));
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_flag("--bits", cfg.bits, "Report cross-entropy in bits");
  app.add_option("--n", cfg.n, "Synthetic analysed rows")->check(CLI::PositiveNumber);
  app.add_option("--subjects", cfg.subjects, "Synthetic subjects")->check(CLI::PositiveNumber);
  app.add_option("--noise-sd", cfg.noise_sd, "Synthetic noise sd (ms)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--text", cfg.text, "Source text for synthetic passages");

  const std::vector<std::pair<const char *, void (*)(const RunConfig &)>> commands = {
      {"vocab", CmdVocab},         {"count", CmdCount},       {"train", CmdTrain},
      {"eval-ppl", CmdEvalPpl},    {"sweep", CmdSweep},       {"surprisal", CmdSurprisal},
      {"rt-prep", CmdRtPrep},      {"rt-fit", CmdRtFit},      {"rt-analyze", CmdRtAnalyze},
      {"synth", CmdSynth}};
  static const std::map<std::string, std::string> help = {
      {"vocab", "Build vocab.tsv from --train"},
      {"count", "Write n-gram counts of --order"},
      {"train", "Train a modified Kneser-Ney model of --order"},
      {"eval-ppl", "Perplexity of --model (optionally mixed with --local) on --eval"},
      {"sweep", "Perplexity over the interpolation grid"},
      {"surprisal", "Per-token log-probabilities of --eval under --model"},
      {"rt-prep", "Exclusions and design matrix from --fixations"},
      {"rt-fit", "Fit the regressions on the design matrix"},
      {"rt-analyze", "Effective versus optimal interpolation report"},
      {"synth", "Synthetic fixation data with planted coefficients"}};
  for (const auto &[name, fn] : commands) {
    app.add_subcommand(name, help.at(name))->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  try {
    for (const auto &[name, fn] : commands) {
      if (app.got_subcommand(name)) fn(cfg);
    }
  } catch (const std::exception &e) {
    std::cerr << "locallm: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
