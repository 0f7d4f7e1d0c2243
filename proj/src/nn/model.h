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
 * \file nn/model.h
 * \brief The scorer behind outlining and filling.
 *
 * Questions are encoded token by token (embedding, shared linear + tanh);
 * instances reuse that encoder and max-pool over their tokens. Partial graphs
 * are encoded over the vertex/edge incidence graph: nodes start from class,
 * segment and marker embeddings and run three rounds of typed neighbour
 * averaging with a linear + tanh update. The graph vector is the mean of all
 * node vectors.
 *
 * Each decoder stream (outline, vertex fill, edge fill) keeps a recurrent
 * state h' = tanh(U h + V h_in + b). Outline input is
 * h_in = tanh(W_in [h_Q; h_G]) where h_Q attends over question tokens with
 * h_G as key. Fill input is tanh(W_in [h_Q; h_Ga; slot; previous instance])
 * where h_Q attends with the slot vector as key.
 *
 * Operator arguments are scored as bilinear products between a projection of
 * the decoder state and candidate embeddings; illegal arguments are never
 * scored, so every distribution is a softmax over legal candidates only.
 */
#ifndef QGFORGE_NN_MODEL_H_
#define QGFORGE_NN_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "candidates/candidates.h"
#include "grammar/grammar.h"
#include "nn/tape.h"
#include "supervision/supervision.h"

namespace qgforge {
namespace nn {

inline constexpr int kGraphRounds = 3;
inline constexpr int kDefaultDim = 64;

struct ModelConfig {
  int dim = kDefaultDim;
  std::uint64_t seed = 1;
};

class Model;

/*! \brief One tape plus per-tape caches of token and instance encodings. */
struct Session {
  explicit Session(const Model& m) : model(&m) {}
  const Model* model;
  Tape tape;
  std::map<int, Tape::Id> token_cache;
  std::map<std::string, Tape::Id> instance_cache;
  /*! \brief Number of candidate arguments scored. */
  std::uint64_t scored = 0;
};

struct EncodedQuestion {
  std::vector<Tape::Id> tokens;
  Tape::Id pooled = -1;
};

struct GraphEncoding {
  std::vector<Tape::Id> vertices;
  std::vector<Tape::Id> edges;
  Tape::Id graph = -1;
};

enum class FillStream : std::uint8_t { kVertex, kEdge };

class Model {
 public:
  Model() = default;
  Model(std::vector<std::string> vocab, const ModelConfig& config);

  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  Param* param(const std::string& name);
  const Param* param(const std::string& name) const;

  /*! \brief Candidate rankers stored alongside the scorer. */
  Ranker& rel_ranker() { return rel_ranker_; }
  const Ranker& rel_ranker() const { return rel_ranker_; }
  Ranker& type_ranker() { return type_ranker_; }
  const Ranker& type_ranker() const { return type_ranker_; }

  int TokenId(const std::string& token) const;

  /*! \throws Error(kEmptyInput) when the question has no token. */
  EncodedQuestion EncodeQuestion(Session& s, std::string_view question) const;
  /*! \throws Error(kEmptyInput) when the text has no token. */
  Tape::Id EncodeInstance(Session& s, const std::string& text) const;
  GraphEncoding EncodeGraph(Session& s, const Graph& g, std::optional<int> pending = std::nullopt,
                            std::optional<int> selected = std::nullopt) const;
  /*! \brief sum_i softmax_i(key . W q_i) q_i with W the outline or fill attention matrix. */
  Tape::Id Attend(Session& s, Tape::Id key, const EncodedQuestion& q, bool fill) const;

  /*! \brief Advances the outline stream by one step over the graph of \p state. */
  Tape::Id OutlineStep(Session& s, const EncodedQuestion& q, Tape::Id prev,
                       const GraphEncoding& g) const;
  /*! \brief Log-probability of each operator in \p legal (same order). */
  std::vector<Tape::Id> OutlineLogProbs(Session& s, Tape::Id state, const GenerationState& gs,
                                        const GraphEncoding& g,
                                        const std::vector<OutlineOp>& legal) const;

  Tape::Id FillStep(Session& s, FillStream stream, const EncodedQuestion& q, Tape::Id prev,
                    Tape::Id aqg, Tape::Id slot, Tape::Id previous_instance) const;
  /*! \brief Log-probability of each candidate instance text (same order). */
  Tape::Id FillLogProbs(Session& s, FillStream stream, Tape::Id state,
                        const std::vector<std::string>& texts) const;

  /*!
   * \brief Negative log-likelihood of the gold operator sequences.
   * \throws Error(kIllegalOp) when a gold operator is masked,
   * Error(kEmptyPool) when a gold instance is missing from the pool.
   */
  Tape::Id Loss(Session& s, std::string_view question, const SupervisionSequences& signals,
                const CandidatePool& pool) const;

  /*! \brief Binary checkpoint: magic line, JSON header, float32 blocks. */
  void Save(const std::string& path) const;
  std::string Serialize() const;
  static Model Load(const std::string& path);
  static Model Deserialize(const std::string& bytes);

  static constexpr const char* kMagic = "QGFORGE-CHECKPOINT v1\n";

 private:
  void AddParam(const std::string& name, int rows, int cols);
  Tape::Id Token(Session& s, int id) const;
  Param* P(const std::string& name) const;

  int dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::string> vocab_;
  std::map<std::string, int, std::less<>> vocab_index_;
  std::vector<Param> params_;
  std::map<std::string, std::size_t> param_index_;
  Ranker rel_ranker_;
  Ranker type_ranker_;
};

/*!
 * \brief Candidates of the next fill slot that pass CheckFill, in pool order.
 * Empty for Ans/Var slots.
 */
std::vector<std::string> LegalFillCandidates(const GenerationState& state,
                                             const CandidatePool& pool);

/*! \brief Vocabulary for a corpus: <unk>, question tokens and instance tokens. */
std::vector<std::string> BuildVocabulary(const std::vector<std::string>& questions,
                                         const std::vector<std::string>& instance_texts);

}  // namespace nn
}  // namespace qgforge

#endif  // QGFORGE_NN_MODEL_H_
