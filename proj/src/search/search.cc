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

#include "search/search.h"

#include <algorithm>
#include <chrono>

#include "common/error.h"
#include "sparql/bridge.h"

namespace qgforge {

namespace {

using nn::Session;
using nn::Tape;
using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename T>
void StableTopK(std::vector<T>* items, int k) {
  std::stable_sort(items->begin(), items->end(),
                   [](const T& a, const T& b) { return a.score > b.score; });
  if (static_cast<int>(items->size()) > k) items->resize(k);
}

void Track(SearchStats* stats, const Graph& g) {
  stats->max_vertices = std::max(stats->max_vertices, g.num_vertices());
}

struct OutlineEntry {
  GenerationState state;
  double score = 0.0;
  std::vector<double> h;
};

// Scores every continuation of a fill hypothesis at its next slot and appends
// the surviving children to `out`. Slots without a choice pass through
// unscored.
void ExpandFill(const nn::Model& model, std::string_view question, const CandidatePool& pool,
                const FillHypothesis& hyp, int beam, ProbeCache* probes, SearchStats* stats,
                std::vector<FillHypothesis>* out) {
  const GenerationState& gs = hyp.state;
  FillSlot slot = gs.NextFillSlot();
  const int k = slot.kind == FillOpKind::kFillVertex ? 0 : 1;
  auto child = [&](const std::string* instance) {
    FillHypothesis next = hyp;
    FillOp op{slot.kind, slot.slot, instance ? std::optional(*instance) : std::nullopt};
    next.state = ApplyFill(gs, op);
    return next;
  };
  if (k == 0 && !IsInstanceVertexClass(gs.graph.vertices[slot.slot].cls)) {
    out->push_back(child(nullptr));
    return;
  }
  auto start = Clock::now();
  Session s(model);
  Tape& t = s.tape;
  std::optional<std::string> forced = ForcedInstance(gs);
  std::vector<std::string> cands;
  if (forced) {
    if (CheckFill(gs, forced).empty()) cands.push_back(*forced);
  } else {
    cands = nn::LegalFillCandidates(gs, pool);
  }
  if (cands.empty()) {
    stats->inference_ms += MsSince(start);
    return;
  }
  std::vector<FillHypothesis> children;
  if (forced) {
    FillHypothesis next = child(&cands[0]);
    next.previous[k] = t.value(model.EncodeInstance(s, pool.TextOf(cands[0])));
    children.push_back(std::move(next));
  } else {
    nn::EncodedQuestion q = model.EncodeQuestion(s, question);
    nn::GraphEncoding aqg = model.EncodeGraph(s, gs.graph.IsAbstract() ? gs.graph : StripInstances(gs.graph));
    Tape::Id slot_vec = k == 0 ? aqg.vertices[slot.slot] : aqg.edges[slot.slot];
    Tape::Id prev_state = hyp.stream[k].empty() ? q.pooled : t.Const(hyp.stream[k]);
    Tape::Id prev_inst = hyp.previous[k].empty() ? t.Zeros(model.dim()) : t.Const(hyp.previous[k]);
    nn::FillStream stream = k == 0 ? nn::FillStream::kVertex : nn::FillStream::kEdge;
    Tape::Id h = model.FillStep(s, stream, q, prev_state, aqg.graph, slot_vec, prev_inst);
    std::vector<std::string> texts;
    for (const auto& c : cands) texts.push_back(pool.TextOf(c));
    Tape::Id lp = model.FillLogProbs(s, stream, h, texts);
    if (k == 0) {
      stats->vertex_scored += cands.size();
      stats->y_vertex = std::max(stats->y_vertex, static_cast<int>(cands.size()));
    } else {
      stats->edge_scored += cands.size();
      stats->y_edge = std::max(stats->y_edge, static_cast<int>(cands.size()));
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      FillHypothesis next = child(&cands[i]);
      next.score += t.value(lp)[i];
      next.stream[k] = t.value(h);
      next.previous[k] = t.value(model.EncodeInstance(s, texts[i]));
      children.push_back(std::move(next));
    }
  }
  stats->inference_ms += MsSince(start);
  std::vector<FillHypothesis> kept;
  for (auto& c : children) {
    if (k == 1 && probes) {
      ++stats->eta;
      if (!probes->Probe(c.state.graph, stats)) {
        ++stats->probes_pruned;
        continue;
      }
    }
    kept.push_back(std::move(c));
  }
  StableTopK(&kept, beam);
  for (auto& c : kept) out->push_back(std::move(c));
}

}  // namespace

double SearchStats::EtaBound(int beam) const {
  return static_cast<double>(std::max(0, max_vertices - 1)) * beam * y_edge;
}

double SearchStats::ScoringBound(int beam) const {
  return EstimateSearchSpace(max_vertices, beam, y_outline, y_vertex, y_edge);
}

void SearchStats::Merge(const SearchStats& o) {
  outline_scored += o.outline_scored;
  vertex_scored += o.vertex_scored;
  edge_scored += o.edge_scored;
  y_outline = std::max(y_outline, o.y_outline);
  y_vertex = std::max(y_vertex, o.y_vertex);
  y_edge = std::max(y_edge, o.y_edge);
  max_vertices = std::max(max_vertices, o.max_vertices);
  outline_steps = std::max(outline_steps, o.outline_steps);
  eta += o.eta;
  probes_executed += o.probes_executed;
  probes_pruned += o.probes_pruned;
  kg_ms += o.kg_ms;
  inference_ms += o.inference_ms;
}

double EstimateSearchSpace(int n, int beam, double y_outline, double y_vertex, double y_edge) {
  if (n <= 0 || beam <= 0) return 0.0;
  double k = beam;
  return (3.0 * n - 1.0) * k * y_outline + n * k * y_vertex + (n - 1.0) * k * y_edge;
}

sparql::Intent GraphIntent(const Graph& g) {
  for (const Edge& e : g.edges) {
    if (e.cls == EdgeClass::kAgg && e.instance == "ASK") return sparql::Intent::kAsk;
  }
  return sparql::Intent::kSelect;
}

std::vector<ScoredGraph> DecodeOutline(const nn::Model& model, std::string_view question, int beam,
                                       SearchStats* stats) {
  QG_CHECK(beam >= 1, ErrorCode::kInvalidArgument, "beam size must be >= 1");
  SearchStats local;
  if (!stats) stats = &local;
  std::vector<OutlineEntry> live(1);
  live[0].state = GenerationState::Initial();
  std::vector<ScoredGraph> finished;
  const int cap = 3 * kMaxVertices - 1;
  for (int step = 1; step <= cap && !live.empty(); ++step) {
    stats->outline_steps = std::max(stats->outline_steps, step);
    std::vector<OutlineEntry> next;
    std::vector<std::pair<OutlineEntry, bool>> expanded;
    for (const OutlineEntry& entry : live) {
      std::vector<OutlineOp> legal = LegalOutlineOps(entry.state);
      if (legal.empty()) continue;
      auto start = Clock::now();
      Session s(model);
      Tape& t = s.tape;
      nn::EncodedQuestion q = model.EncodeQuestion(s, question);
      OutlineOpKind kind = entry.state.NextOutlineKind();
      std::optional<int> pending, selected;
      if (kind != OutlineOpKind::kAddVertex) pending = entry.state.pending;
      if (kind == OutlineOpKind::kAddEdge) selected = entry.state.selected;
      nn::GraphEncoding g = model.EncodeGraph(s, entry.state.graph, pending, selected);
      Tape::Id prev = entry.h.empty() ? q.pooled : t.Const(entry.h);
      Tape::Id h = model.OutlineStep(s, q, prev, g);
      std::vector<Tape::Id> lps = model.OutlineLogProbs(s, h, entry.state, g, legal);
      stats->inference_ms += MsSince(start);
      stats->outline_scored += legal.size();
      stats->y_outline = std::max(stats->y_outline, static_cast<int>(legal.size()));
      for (std::size_t i = 0; i < legal.size(); ++i) {
        OutlineEntry child;
        child.state = ApplyOutline(entry.state, legal[i]);
        child.score = entry.score + t.scalar(lps[i]);
        child.h = t.value(h);
        Track(stats, child.state.graph);
        bool done = child.state.phase != Phase::kOutlining;
        expanded.emplace_back(std::move(child), done);
      }
    }
    std::stable_sort(expanded.begin(), expanded.end(),
                     [](const auto& a, const auto& b) { return a.first.score > b.first.score; });
    for (auto& [entry, done] : expanded) {
      if (static_cast<int>(next.size()) >= beam) break;
      if (done) {
        finished.push_back(ScoredGraph{entry.state.graph, entry.score});
      } else {
        next.push_back(std::move(entry));
      }
    }
    live = std::move(next);
    StableTopK(&finished, beam);
    if (static_cast<int>(finished.size()) >= beam && !live.empty() &&
        live.front().score <= finished.back().score) {
      break;
    }
  }
  if (finished.empty()) throw Error(ErrorCode::kNoResult, "no outline finished within the step cap");
  return finished;
}

std::vector<FillHypothesis> DecodeFillVertices(const nn::Model& model, std::string_view question,
                                               const CandidatePool& pool,
                                               const std::vector<ScoredGraph>& aqgs, int beam,
                                               SearchStats* stats) {
  QG_CHECK(beam >= 1, ErrorCode::kInvalidArgument, "beam size must be >= 1");
  SearchStats local;
  if (!stats) stats = &local;
  std::vector<FillHypothesis> current;
  for (const ScoredGraph& a : aqgs) {
    FillHypothesis h;
    h.state = GenerationState::ForFilling(a.graph);
    h.score = a.score;
    Track(stats, a.graph);
    current.push_back(std::move(h));
  }
  for (;;) {
    bool pending = false;
    std::vector<FillHypothesis> next;
    for (const FillHypothesis& h : current) {
      if (h.state.phase != Phase::kFillingVertices) {
        next.push_back(h);
        continue;
      }
      pending = true;
      ExpandFill(model, question, pool, h, beam, nullptr, stats, &next);
    }
    if (!pending) break;
    StableTopK(&next, beam);
    current = std::move(next);
    if (current.empty()) throw Error(ErrorCode::kNoResult, "no candidates for the vertex slots");
  }
  return current;
}

namespace {

// Copy of a partially filled graph whose ASK form is implied by every
// completion. A comparison that links a subquery segment is left unfilled
// (and so left out of the program) until that segment is fully filled, since
// an aggregate over a pattern with open relations is not monotone.
Graph RelaxForProbe(const Graph& g) {
  Graph out = g;
  for (Edge& e : out.edges) {
    int a = g.vertices[e.head].segment, b = g.vertices[e.tail].segment;
    if (e.cls != EdgeClass::kCmp || a == b || !e.instance) continue;
    int upper = std::max(a, b);
    bool complete = true;
    for (const Edge& f : g.edges) {
      if (g.vertices[f.head].segment == upper && g.vertices[f.tail].segment == upper &&
          !f.instance) {
        complete = false;
      }
    }
    if (!complete) e.instance.reset();
  }
  return out;
}

}  // namespace

bool ProbeCache::Probe(const Graph& g, SearchStats* stats) {
  std::string text;
  try {
    text = sparql::ToSparql(RelaxForProbe(g), sparql::Intent::kAsk);
  } catch (const Error&) {
    return false;
  }
  auto it = cache_.find(text);
  if (it != cache_.end()) return it->second;
  auto start = Clock::now();
  bool ok = false;
  try {
    EvalOptions options;
    options.strict = false;
    options.step_budget = budget_;
    ok = Ask(*kg_, sparql::Parse(text), options);
  } catch (const Error&) {
    ok = false;
  }
  ++stats->probes_executed;
  stats->kg_ms += MsSince(start);
  cache_[text] = ok;
  return ok;
}

std::vector<FillHypothesis> DecodeFillEdgesBeam(const nn::Model& model, std::string_view question,
                                               const CandidatePool& pool,
                                               const std::vector<FillHypothesis>& start, int beam,
                                               const TripleStore* kg, const SearchOptions& options,
                                               SearchStats* stats) {
  QG_CHECK(beam >= 1, ErrorCode::kInvalidArgument, "beam size must be >= 1");
  SearchStats local;
  if (!stats) stats = &local;
  std::optional<ProbeCache> probes;
  if (kg && options.execution_guidance) probes.emplace(*kg, options.probe_step_budget);
  std::vector<FillHypothesis> current = start;
  for (const FillHypothesis& h : current) {
    Track(stats, h.state.graph);
    QG_CHECK(h.state.phase == Phase::kFillingEdges || h.state.phase == Phase::kDone,
             ErrorCode::kInvalidArgument, "edge filling needs vertex-filled hypotheses");
  }
  for (;;) {
    bool pending = false;
    std::vector<FillHypothesis> next;
    for (const FillHypothesis& h : current) {
      if (h.state.phase == Phase::kDone) {
        next.push_back(h);
        continue;
      }
      pending = true;
      ExpandFill(model, question, pool, h, beam, probes ? &*probes : nullptr, stats, &next);
    }
    if (!pending) break;
    StableTopK(&next, beam);
    current = std::move(next);
    if (current.empty()) break;
  }
  if (current.empty()) throw Error(ErrorCode::kEmptyResult, "every hypothesis was pruned");
  if (probes) {
    // Graphs without edges were never probed; check them so every result executes.
    std::vector<FillHypothesis> kept;
    for (auto& h : current) {
      if (h.state.graph.num_edges() > 0 || probes->Probe(h.state.graph, stats)) kept.push_back(std::move(h));
    }
    current = std::move(kept);
    if (current.empty()) throw Error(ErrorCode::kEmptyResult, "every hypothesis was pruned");
  }
  return current;
}

ScoredGraph DecodeFillEdges(const nn::Model& model, std::string_view question,
                            const CandidatePool& pool, const std::vector<FillHypothesis>& start,
                            int beam, const TripleStore* kg, const SearchOptions& options,
                            SearchStats* stats) {
  std::vector<FillHypothesis> done =
      DecodeFillEdgesBeam(model, question, pool, start, beam, kg, options, stats);
  return ScoredGraph{done.front().state.graph, done.front().score};
}

ScoredGraph Parse(const nn::Model& model, std::string_view question, const CandidatePool& pool,
                  const TripleStore& kg, const SearchOptions& options, SearchStats* stats) {
  SearchStats local;
  if (!stats) stats = &local;
  std::vector<ScoredGraph> aqgs = DecodeOutline(model, question, options.beam, stats);
  std::vector<FillHypothesis> filled =
      DecodeFillVertices(model, question, pool, aqgs, options.beam, stats);
  return DecodeFillEdges(model, question, pool, filled, options.beam, &kg, options, stats);
}

}  // namespace qgforge
