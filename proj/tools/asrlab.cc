// Copyright 2026 The asrlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// asrlab command-line tool.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asrlab/checkpoint.h"
#include "asrlab/config.h"
#include "asrlab/corpus_io.h"
#include "asrlab/gradcheck.h"
#include "asrlab/harness.h"
#include "asrlab/streaming.h"
#include "json.hpp"

namespace {

using namespace asrlab;
namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out;
  std::string format = "tsv";
};

ExperimentConfig LoadConfig(const Common& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : LoadConfigFile(o.config_path);
  for (const std::string& kv : o.overrides) ApplyConfigLine(c, kv);
  if (o.has_seed) c.seed = o.seed;
  c.Validate();
  return c;
}

nlohmann::json Cell(const std::string& s) {
  if (s.empty()) return s;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size()) return v;
  return s;
}

// Tables are produced as TSV with a header row; JSON output is an array of
// objects keyed by the header.
std::string Render(const std::string& tsv, const std::string& format) {
  if (format == "tsv") return tsv;
  std::istringstream is(tsv);
  std::string line;
  std::vector<std::string> header;
  nlohmann::json rows = nlohmann::json::array();
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string f;
    while (std::getline(ss, f, '\t')) out.push_back(f);
    if (!l.empty() && l.back() == '\t') out.emplace_back();
    return out;
  };
  while (std::getline(is, line)) {
    if (header.empty()) {
      header = split(line);
      continue;
    }
    const auto fields = split(line);
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) {
      row[header[i]] = Cell(fields[i]);
    }
    rows.push_back(row);
  }
  return rows.dump(2) + "\n";
}

std::string Extension(const std::string& format) { return format == "json" ? ".json" : ".tsv"; }

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
}

fs::path OutDir(const Common& o) {
  if (o.out.empty()) throw Error("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

std::vector<Example> LoadData(const ExperimentConfig& c, const std::string& corpus_path) {
  const Corpus corpus = corpus_path.empty() ? MakeCorpus(c) : ReadCorpusFile(corpus_path);
  return PrepareExamples(corpus, c.EffectiveStack());
}

void AddCommon(CLI::App* app, Common& o, bool with_config = true) {
  if (with_config) {
    app->add_option("--config", o.config_path, "Experiment config file")->check(CLI::ExistingFile);
    app->add_option("--set", o.overrides, "Config override key=value (repeatable)");
  }
  app->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.seed = s; o.has_seed = true; }, "Seed override");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
}

int Run(int argc, char** argv) {
  CLI::App app{"asrlab: streaming end-to-end ASR lab"};
  app.require_subcommand(1);

  Common o;
  std::string corpus_path, checkpoint_path, param_filter;
  std::vector<std::string> compare_configs;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double epsilon = 1e-5;
  std::size_t max_frames = 6;

  auto* gen = app.add_subcommand("gen-corpus", "Generate the synthetic corpus");
  AddCommon(gen, o);

  auto* train = app.add_subcommand("train", "Train a model");
  AddCommon(train, o);
  train->add_option("--corpus", corpus_path, "Corpus file (default: generated)");

  auto* decode = app.add_subcommand("decode", "Decode a corpus with a checkpoint");
  AddCommon(decode, o, false);
  decode->add_option("--checkpoint", checkpoint_path)->required()->check(CLI::ExistingFile);
  decode->add_option("--corpus", corpus_path, "Corpus file (default: generated)");
  decode->add_option("--set", o.overrides, "Decoding override key=value (repeatable)");

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a corpus");
  AddCommon(eval, o, false);
  eval->add_option("--checkpoint", checkpoint_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--corpus", corpus_path, "Corpus file (default: generated)");
  eval->add_option("--set", o.overrides, "Decoding override key=value (repeatable)");

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the configured model");
  AddCommon(grad, o);
  grad->add_option("--epsilon", epsilon, "Central-difference step");
  grad->add_option("--param", param_filter, "Regex over parameter names (default: all)");
  grad->add_option("--max-frames", max_frames, "Truncate the probe utterance");

  auto* latency = app.add_subcommand("latency-report", "Latency table in milliseconds");
  AddCommon(latency, o, false);
  latency->add_option("--config", compare_configs, "Config files (default: reference set)")
      ->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare", "Multi-seed comparison table");
  AddCommon(compare, o, false);
  compare->add_option("--config", compare_configs, "Config files")->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--seeds", seeds, "Seeds")->delimiter(',');
  compare->add_option("--set", o.overrides, "Override applied to every config");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    ExperimentConfig c = LoadConfig(o);
    if (o.has_seed) c.corpus_seed = o.seed;
    const Corpus corpus = MakeCorpus(c);
    const fs::path dir = OutDir(o);
    WriteCorpusFile((dir / "corpus.bin").string(), corpus);
    std::ofstream al(dir / "alignments.txt");
    std::vector<std::string> ids;
    std::vector<std::vector<int>> alignments;
    for (const Utterance& u : corpus) {
      ids.push_back(u.id);
      alignments.push_back(u.alignment);
    }
    WriteAlignments(al, ids, alignments);
    std::ostringstream tsv;
    tsv << "id\tframes\ttext\n";
    for (const Utterance& u : corpus) tsv << u.id << '\t' << u.features.frames << '\t' << u.text << '\n';
    WriteFile(dir / ("transcripts" + Extension(o.format)), Render(tsv.str(), o.format));
    std::cout << "wrote " << corpus.size() << " utterances to " << dir.string() << "\n";
    return 0;
  }

  if (train->parsed()) {
    const ExperimentConfig c = LoadConfig(o);
    const fs::path dir = OutDir(o);
    const std::vector<Example> data = LoadData(c, corpus_path);
    AnyModel model(c);
    const std::size_t every = std::max<std::size_t>(1, c.steps / 20);
    const TrainResult r = Train(model, data, [&](std::size_t step, double loss) {
      if (step % every == 0 || step == c.steps) {
        std::cerr << "step " << step << " loss " << loss << "\n";
      }
    });
    SaveModel((dir / "model.ckpt").string(), model);
    WriteFile(dir / "config.txt", SerializeConfig(c));
    WriteFile(dir / ("loss" + Extension(o.format)), Render(LossCurveTsv(r.losses), o.format));
    if (!r.pretrain_losses.empty()) {
      WriteFile(dir / ("pretrain_loss" + Extension(o.format)),
                Render(LossCurveTsv(r.pretrain_losses), o.format));
    }
    std::ostringstream tsv;
    tsv << "name\tsteps\tfinal_loss\tcpu_seconds\tparameters\n"
        << c.name << '\t' << r.losses.size() << '\t' << (r.losses.empty() ? 0.0 : r.losses.back())
        << '\t' << r.seconds << '\t' << CountParameters(model.Parameters()) << '\n';
    std::cout << Render(tsv.str(), o.format);
    return 0;
  }

  if (decode->parsed() || eval->parsed()) {
    const Checkpoint ck = LoadCheckpoint(checkpoint_path);
    ExperimentConfig c = ParseConfig(ck.config);
    for (const std::string& kv : o.overrides) ApplyConfigLine(c, kv);
    c.Validate();
    AnyModel model(c);
    RestoreParameters(model.Parameters(), ck.tensors);
    const std::vector<Example> data = LoadData(c, corpus_path);
    const EvalResult r = Evaluate(model, data);
    if (decode->parsed()) {
      std::ostringstream tsv;
      tsv << "id\thypothesis\tscore\tframes\n";
      for (const UtteranceResult& u : r.utterances) {
        tsv << u.id << '\t' << u.hypothesis << '\t' << u.score << '\t' << FramesString(u.frames)
            << '\n';
      }
      const std::string text = Render(tsv.str(), o.format);
      if (o.out.empty()) {
        std::cout << text;
      } else {
        WriteFile(OutDir(o) / ("hypotheses" + Extension(o.format)), text);
      }
      return 0;
    }
    if (!o.out.empty()) {
      WriteFile(OutDir(o) / ("utterances" + Extension(o.format)), Render(EvalTsv(r), o.format));
    }
    std::cout << Render(EvalSummaryTsv(r), o.format);
    return 0;
  }

  if (grad->parsed()) {
    ExperimentConfig c = LoadConfig(o);
    c.corpus_size = 1;
    std::vector<Example> data = LoadData(c, "");
    Example& ex = data.front();
    const std::size_t frames = std::min(max_frames, ex.features.rows());
    std::vector<double> head(ex.features.values().begin(),
                             ex.features.values().begin() + frames * ex.features.cols());
    ex.features = Tensor::FromValues({frames, ex.features.cols()}, std::move(head));
    if (c.model != ModelFamily::kTransformerAed) {
      // Attention and transducer losses need at least one frame per label.
      ex.tokens.resize(std::min(ex.tokens.size(), std::max<std::size_t>(1, frames / 2)));
    } else {
      ex.tokens.resize(std::min<std::size_t>(ex.tokens.size(), 2));
    }
    AnyModel model(c);
    const std::regex filter(param_filter.empty() ? ".*" : param_filter);
    std::vector<Tensor> params;
    std::vector<std::string> names;
    for (const auto& p : model.Parameters()) {
      if (std::regex_search(p.name, filter)) {
        params.push_back(p.tensor);
        names.push_back(p.name);
      }
    }
    if (params.empty()) throw Error("gradcheck: no parameter matches '" + param_filter + "'");
    const GradCheckResult g =
        FiniteDifferenceCheck([&] { return model.Loss(ex, nullptr); }, params, epsilon);
    std::ostringstream tsv;
    tsv << "model\tcoordinates\tmax_relative_error\tworst_parameter\tworst_index\tanalytic\tnumeric\n"
        << c.name << '\t' << g.coordinates << '\t' << g.max_relative_error << '\t'
        << names[g.worst_param] << '\t' << g.worst_index << '\t' << g.worst_analytic << '\t'
        << g.worst_numeric << '\n';
    std::cout << Render(tsv.str(), o.format);
    return g.max_relative_error <= 1e-4 ? 0 : 2;
  }

  if (latency->parsed()) {
    std::vector<LatencySpec> specs;
    if (compare_configs.empty()) {
      specs = ReferenceLatencySpecs();
    } else {
      for (const std::string& path : compare_configs) specs.push_back(LatencySpecFor(LoadConfigFile(path)));
    }
    const std::string text = Render(LatencyTableTsv(specs), o.format);
    if (!o.out.empty()) WriteFile(OutDir(o) / ("latency" + Extension(o.format)), text);
    std::cout << text;
    return 0;
  }

  if (compare->parsed()) {
    std::vector<ExperimentConfig> configs;
    for (const std::string& path : compare_configs) {
      ExperimentConfig c = LoadConfigFile(path);
      for (const std::string& kv : o.overrides) ApplyConfigLine(c, kv);
      c.Validate();
      configs.push_back(c);
    }
    const auto rows = Compare(configs, seeds, [](const std::string& line) { std::cerr << line << "\n"; });
    const std::string text = Render(CompareTsv(rows), o.format);
    if (!o.out.empty()) WriteFile(OutDir(o) / ("compare" + Extension(o.format)), text);
    std::cout << text;
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "asrlab: error: " << e.what() << "\n";
    return 1;
  }
}
