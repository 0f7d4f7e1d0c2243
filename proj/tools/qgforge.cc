// Copyright 2026 The qgforge Authors
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

/*!
 * \file qgforge.cc
 * \brief Command-line front end. Uses only the C interface of the library.
 *
 * Failures print one JSON record {"error", "message", "line", "column"} on
 * stderr and exit with the numeric status.
 */
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qgforge/qgforge.h"

namespace {

// Thrown after a failed library call; the error record is already stored.
struct CallFailed {
  qg_status status;
};

void Check(qg_status status) {
  if (status != QG_OK) throw CallFailed{status};
}

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { qg_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct KgHandle {
  qg_kg* p = nullptr;
  ~KgHandle() { qg_kg_free(p); }
};

struct ModelHandle {
  qg_model* p = nullptr;
  ~ModelHandle() { qg_model_free(p); }
};

std::string ReadInput(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << R"({"error": "IoError", "message": "cannot open )" << path
              << R"(", "line": 0, "column": 0})" << "\n";
    std::exit(QG_ERR_IO);
  }
  buf << in.rdbuf();
  return buf.str();
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << R"({"error": "IoError", "message": "cannot write )" << path
              << R"(", "line": 0, "column": 0})" << "\n";
    std::exit(QG_ERR_IO);
  }
}

int LogLevelFromEnv() {
  const char* v = std::getenv("QGFORGE_LOG");
  if (!v) return 0;
  std::string s(v);
  if (s == "quiet" || s == "off" || s == "0") return 0;
  if (s == "info" || s == "1") return 1;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void LogToStderr(const char* line, void*) {
  if (qg_log_level() >= 1) std::cerr << line << "\n";
}

void LoadKg(const std::string& path, KgHandle* kg) { Check(qg_kg_load(path.c_str(), &kg->p)); }
void LoadModel(const std::string& path, ModelHandle* m) {
  Check(qg_model_load(path.c_str(), &m->p));
}

}  // namespace

int main(int argc, char** argv) {
  qg_set_log_level(LogLevelFromEnv());
  qg_options opt;
  qg_options_default(&opt);

  CLI::App app{"qgforge: query graph generation for knowledge-graph question answering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qg_version());
  bool no_eg = false;
  app.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  app.add_option("--beam", opt.beam, "Beam width")->capture_default_str();
  app.add_option("--dim", opt.dim, "Hidden size")->capture_default_str();
  app.add_flag("--no-eg", no_eg, "Disable execution guidance");

  // convert
  auto* convert = app.add_subcommand("convert", "Program to query graph JSON (or back)");
  std::string convert_in = "-";
  bool from_graph = false, signals = false;
  int indent = 2;
  convert->add_option("input", convert_in, "Program file, graph file with --from-graph, or -");
  convert->add_flag("--from-graph", from_graph, "Input is graph JSON; print its program");
  convert->add_flag("--signals", signals, "Print the supervision operator sequences instead");
  convert->add_option("--indent", indent, "JSON indentation, -1 for one line");

  // train
  auto* train = app.add_subcommand("train", "Train a checkpoint on a JSON Lines dataset");
  std::string data, kg_path, model_path, out_path;
  train->add_option("--data", data, "Dataset (JSON Lines)")->required();
  train->add_option("--kg", kg_path, "Triple file")->required();
  train->add_option("--out", out_path, "Checkpoint to write")->required();
  train->add_option("--epochs", opt.epochs)->capture_default_str();
  train->add_option("--batch", opt.batch)->capture_default_str();
  train->add_option("--lr", opt.learning_rate)->capture_default_str();
  train->add_option("--eval-every", opt.eval_every)->capture_default_str();
  train->add_option("--ranker-epochs", opt.ranker_epochs)->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  std::string report_path, trace_path;
  bool timing = false;
  eval->add_option("--data", data, "Dataset (JSON Lines)")->required();
  eval->add_option("--kg", kg_path, "Triple file")->required();
  eval->add_option("--model", model_path, "Checkpoint")->required();
  eval->add_option("--report", report_path, "Write the JSON report here (default stdout)");
  eval->add_option("--trace", trace_path, "Write the per-example search trace here");
  eval->add_flag("--timing", timing, "Include wall-clock fields");

  // parse
  auto* parse = app.add_subcommand("parse", "Parse one question");
  std::string question, pool_path, emit = "graph";
  parse->add_option("--question", question)->required();
  parse->add_option("--kg", kg_path, "Triple file")->required();
  parse->add_option("--model", model_path, "Checkpoint")->required();
  parse->add_option("--pool", pool_path, "Candidate pool JSON file")->required();
  parse->add_option("--emit", emit)->check(CLI::IsMember({"graph", "sparql", "trace"}));

  // candidates
  auto* candidates = app.add_subcommand("candidates", "Candidate pool of a question");
  std::string entities, gold;
  candidates->add_option("question", question)->required();
  candidates->add_option("--kg", kg_path, "Triple file")->required();
  candidates->add_option("--model", model_path, "Checkpoint")->required();
  candidates->add_option("--entities", entities, "Comma-separated linked entity ids");
  candidates->add_option("--gold", gold, "Program file whose entities are used as linked");

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset or search-trace diagnostics");
  std::string stats_trace;
  auto* stats_data_opt = stats->add_option("--data", data, "Dataset (JSON Lines)");
  auto* stats_trace_opt = stats->add_option("--trace", stats_trace, "Trace written by eval");
  stats_data_opt->excludes(stats_trace_opt);

  // kg
  auto* kg = app.add_subcommand("kg", "Triple store utilities");
  kg->require_subcommand(1);
  auto* kg_stats = kg->add_subcommand("stats", "Triple store counts");
  std::string kg_file, query_file;
  kg_stats->add_option("file", kg_file)->required();
  auto* kg_query = kg->add_subcommand("query", "Execute a program");
  kg_query->add_option("file", kg_file)->required();
  kg_query->add_option("program", query_file, "Program file or -")->required();

  CLI11_PARSE(app, argc, argv);
  opt.execution_guidance = no_eg ? 0 : 1;
  opt.timing = timing ? 1 : 0;

  try {
    if (*convert) {
      std::string text = ReadInput(convert_in);
      Owned out;
      if (from_graph) {
        Check(qg_to_sparql(text.c_str(), 0, &out.p));
        WriteOutput("", out.str());
      } else if (signals) {
        Check(qg_signals("", text.c_str(), &out.p));
        WriteOutput("", out.str());
      } else {
        Check(qg_convert(text.c_str(), indent, &out.p));
        Owned report;
        Check(qg_validate(out.p, &report.p));
        WriteOutput("", out.str());
        std::cerr << report.str() << "\n";
      }
    } else if (*train) {
      KgHandle k;
      LoadKg(kg_path, &k);
      std::string dataset = ReadInput(data);
      ModelHandle m;
      Check(qg_train(dataset.c_str(), k.p, &opt, LogToStderr, nullptr, &m.p));
      Check(qg_model_save(m.p, out_path.c_str()));
    } else if (*eval) {
      KgHandle k;
      LoadKg(kg_path, &k);
      ModelHandle m;
      LoadModel(model_path, &m);
      std::string dataset = ReadInput(data);
      Owned report, table, trace;
      Check(qg_eval(m.p, dataset.c_str(), k.p, &opt, &report.p, &table.p, &trace.p));
      WriteOutput(report_path, report.str());
      if (!trace_path.empty()) WriteOutput(trace_path, trace.str());
      std::cerr << table.str();
    } else if (*parse) {
      KgHandle k;
      LoadKg(kg_path, &k);
      ModelHandle m;
      LoadModel(model_path, &m);
      std::string pool = ReadInput(pool_path);
      Owned out;
      Check(qg_parse(m.p, k.p, question.c_str(), pool.c_str(), &opt, emit.c_str(), &out.p));
      WriteOutput("", out.str());
    } else if (*candidates) {
      KgHandle k;
      LoadKg(kg_path, &k);
      ModelHandle m;
      LoadModel(model_path, &m);
      std::string ent_lines;
      for (char c : entities) ent_lines.push_back(c == ',' ? '\n' : c);
      std::string gold_text = gold.empty() ? "" : ReadInput(gold);
      Owned out;
      Check(qg_candidates(m.p, k.p, question.c_str(), entities.empty() ? nullptr : ent_lines.c_str(),
                          gold.empty() ? nullptr : gold_text.c_str(), &opt, &out.p));
      WriteOutput("", out.str());
    } else if (*stats) {
      Owned out;
      if (!stats_trace.empty()) {
        std::string text = ReadInput(stats_trace);
        Check(qg_stats_trace(text.c_str(), &out.p));
      } else if (!data.empty()) {
        std::string text = ReadInput(data);
        Check(qg_stats_dataset(text.c_str(), &out.p));
      } else {
        Check(qg_stats_trace("", &out.p));
      }
      WriteOutput("", out.str());
    } else if (*kg) {
      KgHandle k;
      LoadKg(kg_file, &k);
      Owned out;
      if (*kg_stats) {
        Check(qg_kg_stats(k.p, &out.p));
      } else {
        std::string program = ReadInput(query_file);
        Check(qg_kg_query(k.p, program.c_str(), &out.p));
      }
      WriteOutput("", out.str());
    }
  } catch (const CallFailed& f) {
    Owned record;
    if (qg_last_error_json(&record.p) == QG_OK) std::cerr << record.str() << "\n";
    return static_cast<int>(f.status);
  }
  return 0;
}
