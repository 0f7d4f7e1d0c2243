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
 * \file gen_toy_corpus.cc
 * \brief Writes the synthetic film graph and its question sets to a directory:
 * toy_kg.txt, train.jsonl (20 examples) and heldout.jsonl (50 examples).
 */
#include <fstream>
#include <iostream>
#include <string>

#include "common/error.h"
#include "support/corpus.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_toy_corpus <output-dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  try {
    std::string kg_text = qgforge::testing::ToyKgText();
    qgforge::TripleStore kg = qgforge::TripleStore::FromText(kg_text);
    auto train = qgforge::testing::ToyQaCorpus(kg, 20, 11, "train-");
    auto heldout = qgforge::testing::ToyQaCorpus(kg, 50, 23, "heldout-", train);
    auto write = [&](const std::string& name, const std::string& text) {
      std::ofstream out(dir + "/" + name, std::ios::binary);
      out << text;
      if (!out) throw qgforge::Error(qgforge::ErrorCode::kIo, "cannot write " + dir + "/" + name);
    };
    write("toy_kg.txt", kg_text);
    write("train.jsonl", qgforge::DatasetToJsonl(train));
    write("heldout.jsonl", qgforge::DatasetToJsonl(heldout));
  } catch (const qgforge::Error& e) {
    std::cerr << qgforge::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
