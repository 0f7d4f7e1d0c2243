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

#include "nn/model.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "common/error.h"
#include "common/text.h"

namespace qgforge {
namespace nn {

namespace {

using Json = nlohmann::ordered_json;
using Id = Tape::Id;

int VertexClassIndex(VertexClass c) { return static_cast<int>(c); }
int EdgeArgIndex(EdgeClass c, Direction d) {
  return 2 * static_cast<int>(c) + (d == Direction::kForward ? 0 : 1);
}

std::string StreamPrefix(FillStream s) { return s == FillStream::kVertex ? "fv." : "fe."; }

void AppendFloat(std::string* out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float ReadFloat(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

}  // namespace

Model::Model(std::vector<std::string> vocab, const ModelConfig& config)
    : dim_(config.dim), seed_(config.seed), vocab_(std::move(vocab)) {
  QG_CHECK(dim_ > 0, ErrorCode::kInvalidArgument, "model dimension must be positive");
  if (vocab_.empty() || vocab_[0] != "<unk>") vocab_.insert(vocab_.begin(), "<unk>");
  for (std::size_t i = 0; i < vocab_.size(); ++i) vocab_index_.emplace(vocab_[i], static_cast<int>(i));
  const int d = dim_;
  const int v = static_cast<int>(vocab_.size());
  AddParam("embed", v, d);
  AddParam("enc.W", d, d);
  AddParam("enc.b", 1, d);
  AddParam("vclass", kNumVertexClasses, d);
  AddParam("delta", 2, d);
  AddParam("eclass", 2 * kNumEdgeClasses, d);
  AddParam("copy.none", 2, d);
  AddParam("attn.W", d, d);
  AddParam("fattn.W", d, d);
  AddParam("out.in", d, 2 * d);
  AddParam("out.U", d, d);
  AddParam("out.V", d, d);
  AddParam("out.b", 1, d);
  AddParam("out.av", d, d);
  AddParam("out.delta", d, 2 * d);
  AddParam("out.sv", d, d);
  AddParam("out.ae", d, d);
  AddParam("out.cv", d, 2 * d);
  AddParam("out.ce", d, 2 * d);
  AddParam("genc.vclass", kNumVertexClasses, d);
  AddParam("genc.eclass", kNumEdgeClasses, d);
  AddParam("genc.segment", kMaxVertices, d);
  AddParam("genc.marker", 2, d);
  AddParam("genc.vself", d, d);
  AddParam("genc.vout", d, d);
  AddParam("genc.vin", d, d);
  AddParam("genc.vb", 1, d);
  AddParam("genc.eself", d, d);
  AddParam("genc.ehead", d, d);
  AddParam("genc.etail", d, d);
  AddParam("genc.eb", 1, d);
  for (const char* p : {"fv.", "fe."}) {
    AddParam(std::string(p) + "in", d, 4 * d);
    AddParam(std::string(p) + "U", d, d);
    AddParam(std::string(p) + "V", d, d);
    AddParam(std::string(p) + "b", 1, d);
    AddParam(std::string(p) + "W", d, d);
  }
  std::mt19937_64 rng(seed_);
  std::uniform_real_distribution<double> uniform(-0.1, 0.1);
  for (Param& p : params_) {
    for (double& w : p.w) w = static_cast<float>(uniform(rng));
  }
  rel_ranker_ = Ranker(vocab_, d, seed_ + 1);
  type_ranker_ = Ranker(vocab_, d, seed_ + 2);
}

void Model::AddParam(const std::string& name, int rows, int cols) {
  param_index_[name] = params_.size();
  params_.emplace_back(name, rows, cols);
}

Param* Model::param(const std::string& name) {
  auto it = param_index_.find(name);
  return it == param_index_.end() ? nullptr : &params_[it->second];
}

const Param* Model::param(const std::string& name) const {
  auto it = param_index_.find(name);
  return it == param_index_.end() ? nullptr : &params_[it->second];
}

Param* Model::P(const std::string& name) const {
  auto it = param_index_.find(name);
  QG_CHECK(it != param_index_.end(), ErrorCode::kInvalidArgument, "unknown parameter " + name);
  // Tapes accumulate gradients into the parameters; scoring itself never writes weights.
  return const_cast<Param*>(&params_[it->second]);
}

int Model::TokenId(const std::string& token) const {
  auto it = vocab_index_.find(token);
  return it == vocab_index_.end() ? 0 : it->second;
}

Id Model::Token(Session& s, int id) const {
  auto it = s.token_cache.find(id);
  if (it != s.token_cache.end()) return it->second;
  Tape& t = s.tape;
  Id x = t.Row(P("embed"), id);
  Id h = t.Tanh(t.AddRow(t.MatVec(P("enc.W"), x), P("enc.b")));
  s.token_cache[id] = h;
  return h;
}

EncodedQuestion Model::EncodeQuestion(Session& s, std::string_view question) const {
  std::vector<std::string> tokens = Tokenize(question);
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "question has no tokens");
  EncodedQuestion q;
  for (const auto& tok : tokens) q.tokens.push_back(Token(s, TokenId(tok)));
  q.pooled = s.tape.Mean(q.tokens);
  return q;
}

Id Model::EncodeInstance(Session& s, const std::string& text) const {
  auto it = s.instance_cache.find(text);
  if (it != s.instance_cache.end()) return it->second;
  std::vector<std::string> tokens = InstanceTokens(text);
  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "instance '" + text + "' has no tokens");
  std::vector<Id> parts;
  for (const auto& tok : tokens) parts.push_back(Token(s, TokenId(tok)));
  Id h = parts.size() == 1 ? parts[0] : s.tape.Max(parts);
  s.instance_cache[text] = h;
  return h;
}

GraphEncoding Model::EncodeGraph(Session& s, const Graph& g, std::optional<int> pending,
                                 std::optional<int> selected) const {
  Tape& t = s.tape;
  GraphEncoding out;
  if (g.num_vertices() == 0) {
    out.graph = t.Zeros(dim_);
    return out;
  }
  std::vector<Id> hv, he;
  for (const Vertex& v : g.vertices) {
    Id h = t.Add(t.Row(P("genc.vclass"), VertexClassIndex(v.cls)),
                 t.Row(P("genc.segment"), std::min(v.segment, kMaxVertices - 1)));
    if (pending && *pending == v.id) h = t.Add(h, t.Row(P("genc.marker"), 0));
    if (selected && *selected == v.id) h = t.Add(h, t.Row(P("genc.marker"), 1));
    hv.push_back(h);
  }
  for (const Edge& e : g.edges) he.push_back(t.Row(P("genc.eclass"), static_cast<int>(e.cls)));
  std::vector<std::vector<int>> out_edges(g.num_vertices()), in_edges(g.num_vertices());
  for (const Edge& e : g.edges) {
    out_edges[e.head].push_back(e.id);
    in_edges[e.tail].push_back(e.id);
  }
  for (int round = 0; round < kGraphRounds; ++round) {
    std::vector<Id> nv(hv.size()), ne(he.size());
    for (const Vertex& v : g.vertices) {
      Id acc = t.AddRow(t.MatVec(P("genc.vself"), hv[v.id]), P("genc.vb"));
      auto gather = [&](const std::vector<int>& ids) {
        std::vector<Id> parts;
        for (int e : ids) parts.push_back(he[e]);
        return t.Mean(parts);
      };
      if (!out_edges[v.id].empty()) acc = t.Add(acc, t.MatVec(P("genc.vout"), gather(out_edges[v.id])));
      if (!in_edges[v.id].empty()) acc = t.Add(acc, t.MatVec(P("genc.vin"), gather(in_edges[v.id])));
      nv[v.id] = t.Tanh(acc);
    }
    for (const Edge& e : g.edges) {
      Id acc = t.AddRow(t.MatVec(P("genc.eself"), he[e.id]), P("genc.eb"));
      acc = t.Add(acc, t.MatVec(P("genc.ehead"), hv[e.head]));
      acc = t.Add(acc, t.MatVec(P("genc.etail"), hv[e.tail]));
      ne[e.id] = t.Tanh(acc);
    }
    hv = std::move(nv);
    he = std::move(ne);
  }
  out.vertices = hv;
  out.edges = he;
  std::vector<Id> all = hv;
  all.insert(all.end(), he.begin(), he.end());
  out.graph = t.Mean(all);
  return out;
}

Id Model::Attend(Session& s, Id key, const EncodedQuestion& q, bool fill) const {
  Tape& t = s.tape;
  Param* w = P(fill ? "fattn.W" : "attn.W");
  std::vector<Id> scores;
  for (Id qi : q.tokens) scores.push_back(t.Dot(key, t.MatVec(w, qi)));
  Id weights = t.Exp(t.LogSoftmax(t.Stack(scores)));
  return t.WeightedSum(weights, q.tokens);
}

Id Model::OutlineStep(Session& s, const EncodedQuestion& q, Id prev, const GraphEncoding& g) const {
  Tape& t = s.tape;
  Id hq = Attend(s, g.graph, q, false);
  Id in = t.Tanh(t.MatVec(P("out.in"), t.Concat({hq, g.graph})));
  Id acc = t.Add(t.MatVec(P("out.U"), prev), t.MatVec(P("out.V"), in));
  return t.Tanh(t.AddRow(acc, P("out.b")));
}

std::vector<Id> Model::OutlineLogProbs(Session& s, Id state, const GenerationState& gs,
                                       const GraphEncoding& g,
                                       const std::vector<OutlineOp>& legal) const {
  Tape& t = s.tape;
  s.scored += legal.size();
  if (legal.empty()) throw Error(ErrorCode::kDeadState, "every outline argument is masked");
  std::vector<Id> out(legal.size());
  if (legal.size() == 1) {
    out[0] = t.Const({0.0});
    return out;
  }
  // Log-softmax over the distinct values of `key` among `members`; returns
  // the log-probability node of each member.
  auto factor = [&](const std::vector<std::size_t>& members, auto key, auto score) {
    std::vector<int> keys;
    for (std::size_t m : members) {
      int k = key(legal[m]);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    std::map<std::size_t, Id> lp;
    if (keys.size() == 1) {
      Id zero = t.Const({0.0});
      for (std::size_t m : members) lp[m] = zero;
      return lp;
    }
    std::vector<Id> scores;
    for (int k : keys) scores.push_back(score(k));
    Id dist = t.LogSoftmax(t.Stack(scores));
    for (std::size_t m : members) {
      int pos = static_cast<int>(std::find(keys.begin(), keys.end(), key(legal[m])) - keys.begin());
      lp[m] = t.Pick(dist, pos);
    }
    return lp;
  };
  std::vector<std::size_t> all(legal.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  switch (gs.NextOutlineKind()) {
    case OutlineOpKind::kAddVertex: {
      Id proj = t.MatVec(P("out.av"), state);
      auto by_class = factor(
          all, [](const OutlineOp& op) { return VertexClassIndex(op.vertex_class); },
          [&](int c) { return t.Dot(proj, t.Row(P("vclass"), c)); });
      std::map<int, std::vector<std::size_t>> groups;
      for (std::size_t i : all) groups[VertexClassIndex(legal[i].vertex_class)].push_back(i);
      for (const auto& [c, members] : groups) {
        Id xc = t.Row(P("vclass"), c);
        Id hx = t.Concat({state, xc});
        Id dproj = t.MatVec(P("out.delta"), hx);
        auto by_delta = factor(
            members, [](const OutlineOp& op) { return op.delta; },
            [&](int d) { return t.Dot(dproj, t.Row(P("delta"), d)); });
        std::map<int, std::vector<std::size_t>> sub;
        for (std::size_t i : members) sub[legal[i].delta].push_back(i);
        Id cproj = t.MatVec(P("out.cv"), hx);
        for (const auto& [d, cm] : sub) {
          auto by_copy = factor(
              cm, [](const OutlineOp& op) { return op.copy; },
              [&](int target) {
                Id vec = target < 0 ? t.Row(P("copy.none"), 0) : g.vertices[target];
                return t.Dot(cproj, vec);
              });
          for (std::size_t i : cm) out[i] = t.Sum({by_class[i], by_delta[i], by_copy[i]});
        }
      }
      break;
    }
    case OutlineOpKind::kSelectVertex: {
      Id proj = t.MatVec(P("out.sv"), state);
      auto lp = factor(
          all, [](const OutlineOp& op) { return op.vertex; },
          [&](int u) { return t.Dot(proj, g.vertices[u]); });
      for (std::size_t i : all) out[i] = lp[i];
      break;
    }
    case OutlineOpKind::kAddEdge: {
      Id proj = t.MatVec(P("out.ae"), state);
      auto arg = [](const OutlineOp& op) { return EdgeArgIndex(op.edge_class, op.direction); };
      auto by_class = factor(all, arg, [&](int k) { return t.Dot(proj, t.Row(P("eclass"), k)); });
      std::map<int, std::vector<std::size_t>> groups;
      for (std::size_t i : all) groups[arg(legal[i])].push_back(i);
      for (const auto& [k, members] : groups) {
        Id cproj = t.MatVec(P("out.ce"), t.Concat({state, t.Row(P("eclass"), k)}));
        auto by_copy = factor(
            members, [](const OutlineOp& op) { return op.copy; },
            [&](int target) {
              Id vec = target < 0 ? t.Row(P("copy.none"), 1) : g.edges[target];
              return t.Dot(cproj, vec);
            });
        for (std::size_t i : members) out[i] = t.Sum({by_class[i], by_copy[i]});
      }
      break;
    }
  }
  return out;
}

Id Model::FillStep(Session& s, FillStream stream, const EncodedQuestion& q, Id prev, Id aqg,
                   Id slot, Id previous_instance) const {
  Tape& t = s.tape;
  std::string p = StreamPrefix(stream);
  Id hq = Attend(s, slot, q, true);
  Id in = t.Tanh(t.MatVec(P(p + "in"), t.Concat({hq, aqg, slot, previous_instance})));
  Id acc = t.Add(t.MatVec(P(p + "U"), prev), t.MatVec(P(p + "V"), in));
  return t.Tanh(t.AddRow(acc, P(p + "b")));
}

Id Model::FillLogProbs(Session& s, FillStream stream, Id state,
                       const std::vector<std::string>& texts) const {
  Tape& t = s.tape;
  s.scored += texts.size();
  if (texts.empty()) throw Error(ErrorCode::kEmptyPool, "no candidate for the fill slot");
  Id proj = t.Tanh(t.MatVec(P(StreamPrefix(stream) + "W"), state));
  std::vector<Id> scores;
  for (const auto& text : texts) scores.push_back(t.Dot(proj, EncodeInstance(s, text)));
  return t.LogSoftmax(t.Stack(scores));
}

std::vector<std::string> LegalFillCandidates(const GenerationState& state,
                                             const CandidatePool& pool) {
  FillSlot slot = state.NextFillSlot();
  const std::vector<std::string>* list;
  if (slot.kind == FillOpKind::kFillVertex) {
    VertexClass c = state.graph.vertices[slot.slot].cls;
    if (!IsInstanceVertexClass(c)) return {};
    list = &pool.ForVertex(c);
  } else {
    list = &pool.ForEdge(state.graph.edges[slot.slot].cls);
  }
  std::vector<std::string> out;
  for (const auto& inst : *list) {
    if (CheckFill(state, inst).empty()) out.push_back(inst);
  }
  return out;
}

Id Model::Loss(Session& s, std::string_view question, const SupervisionSequences& signals,
               const CandidatePool& pool) const {
  Tape& t = s.tape;
  EncodedQuestion q = EncodeQuestion(s, question);
  std::vector<Id> terms;
  GenerationState gs = GenerationState::Initial();
  Id h = q.pooled;
  for (const OutlineOp& op : signals.outline) {
    std::vector<OutlineOp> legal = LegalOutlineOps(gs);
    auto it = std::find(legal.begin(), legal.end(), op);
    if (it == legal.end()) {
      throw Error(ErrorCode::kIllegalOp, op.ToString() + " is masked at step " + std::to_string(gs.t));
    }
    OutlineOpKind kind = gs.NextOutlineKind();
    std::optional<int> pending, selected;
    if (kind != OutlineOpKind::kAddVertex) pending = gs.pending;
    if (kind == OutlineOpKind::kAddEdge) selected = gs.selected;
    GraphEncoding genc = EncodeGraph(s, gs.graph, pending, selected);
    h = OutlineStep(s, q, h, genc);
    std::vector<Id> lps = OutlineLogProbs(s, h, gs, genc, legal);
    terms.push_back(lps[it - legal.begin()]);
    gs = ApplyOutline(gs, op);
  }
  QG_CHECK(gs.phase == Phase::kFillingVertices, ErrorCode::kInvalidArgument,
           "outline sequence does not end with End");
  GraphEncoding aqg = EncodeGraph(s, gs.graph);
  Id h_stream[2] = {q.pooled, q.pooled};
  Id prev[2] = {t.Zeros(dim_), t.Zeros(dim_)};
  for (const FillOp& op : signals.FillOps()) {
    FillSlot slot = gs.NextFillSlot();
    int k = slot.kind == FillOpKind::kFillVertex ? 0 : 1;
    FillStream stream = k == 0 ? FillStream::kVertex : FillStream::kEdge;
    bool needs_instance = k == 1 || IsInstanceVertexClass(gs.graph.vertices[slot.slot].cls);
    if (needs_instance && op.instance) {
      if (ForcedInstance(gs)) {
        prev[k] = EncodeInstance(s, pool.TextOf(*op.instance));
      } else {
        std::vector<std::string> cands = LegalFillCandidates(gs, pool);
        auto pos = std::find(cands.begin(), cands.end(), *op.instance);
        if (pos == cands.end()) {
          throw Error(ErrorCode::kEmptyPool, "gold instance " + *op.instance + " is not a legal candidate");
        }
        std::vector<std::string> texts;
        for (const auto& c : cands) texts.push_back(pool.TextOf(c));
        Id slot_vec = k == 0 ? aqg.vertices[slot.slot] : aqg.edges[slot.slot];
        h_stream[k] = FillStep(s, stream, q, h_stream[k], aqg.graph, slot_vec, prev[k]);
        Id lp = FillLogProbs(s, stream, h_stream[k], texts);
        if (cands.size() > 1) terms.push_back(t.Pick(lp, static_cast<int>(pos - cands.begin())));
        prev[k] = EncodeInstance(s, texts[pos - cands.begin()]);
      }
    }
    gs = ApplyFill(gs, op);
  }
  if (terms.empty()) return t.Const({0.0});
  return t.Neg(t.Sum(terms));
}

std::string Model::Serialize() const {
  Json header;
  header["format"] = "qgforge-checkpoint";
  header["version"] = 1;
  header["d"] = dim_;
  header["seed"] = seed_;
  header["vocab"] = vocab_;
  Json blocks = Json::array();
  for (const Param& p : params_) blocks.push_back({{"name", p.name}, {"rows", p.rows}, {"cols", p.cols}});
  int vr = static_cast<int>(vocab_.size());
  blocks.push_back({{"name", "rank.rel"}, {"rows", vr}, {"cols", rel_ranker_.dim()}});
  blocks.push_back({{"name", "rank.type"}, {"rows", vr}, {"cols", type_ranker_.dim()}});
  header["blocks"] = blocks;
  std::string out = kMagic;
  out += header.dump();
  out += '\n';
  for (const Param& p : params_) {
    for (double w : p.w) AppendFloat(&out, static_cast<float>(w));
  }
  for (float w : rel_ranker_.weights()) AppendFloat(&out, w);
  for (float w : type_ranker_.weights()) AppendFloat(&out, w);
  return out;
}

void Model::Save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  std::string bytes = Serialize();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path);
}

Model Model::Deserialize(const std::string& bytes) {
  std::string magic = kMagic;
  if (bytes.compare(0, magic.size(), magic) != 0) {
    throw Error(ErrorCode::kCheckpoint, "not a qgforge checkpoint (bad magic)");
  }
  std::size_t eol = bytes.find('\n', magic.size());
  if (eol == std::string::npos) throw Error(ErrorCode::kCheckpoint, "truncated checkpoint header");
  Json header;
  try {
    header = Json::parse(bytes.substr(magic.size(), eol - magic.size()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpoint, std::string("bad checkpoint header: ") + e.what());
  }
  if (header.value("version", 0) != 1) throw Error(ErrorCode::kCheckpoint, "unsupported checkpoint version");
  ModelConfig config;
  config.dim = header.at("d").get<int>();
  config.seed = header.at("seed").get<std::uint64_t>();
  Model m(header.at("vocab").get<std::vector<std::string>>(), config);
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data()) + eol + 1;
  const unsigned char* end = reinterpret_cast<const unsigned char*>(bytes.data()) + bytes.size();
  for (const Json& b : header.at("blocks")) {
    std::string name = b.at("name").get<std::string>();
    std::size_t count = b.at("rows").get<std::size_t>() * b.at("cols").get<std::size_t>();
    if (static_cast<std::size_t>(end - p) < 4 * count) {
      throw Error(ErrorCode::kCheckpoint, "truncated block " + name);
    }
    if (name == "rank.rel" || name == "rank.type") {
      Ranker& r = name == "rank.rel" ? m.rel_ranker_ : m.type_ranker_;
      if (r.weights().size() != count) throw Error(ErrorCode::kCheckpoint, "shape mismatch in " + name);
      for (std::size_t i = 0; i < count; ++i, p += 4) r.weights()[i] = ReadFloat(p);
      continue;
    }
    Param* param = m.param(name);
    if (!param || param->w.size() != count) {
      throw Error(ErrorCode::kCheckpoint, "unknown or mis-shaped block " + name);
    }
    for (std::size_t i = 0; i < count; ++i, p += 4) param->w[i] = ReadFloat(p);
  }
  if (p != end) throw Error(ErrorCode::kCheckpoint, "trailing bytes after the last block");
  return m;
}

Model Model::Load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return Deserialize(ss.str());
}

std::vector<std::string> BuildVocabulary(const std::vector<std::string>& questions,
                                         const std::vector<std::string>& instance_texts) {
  std::set<std::string> tokens;
  for (const auto& q : questions) {
    for (auto& tok : Tokenize(q)) tokens.insert(std::move(tok));
  }
  for (const auto& text : instance_texts) {
    for (auto& tok : InstanceTokens(text)) tokens.insert(std::move(tok));
  }
  for (const char* kw : {"=", "!=", ">", ">=", "<", "<=", "DURING", "OVERLAP", "ASC", "DESC",
                         "COUNT", "MAX", "MIN", "ASK", "NONE"}) {
    tokens.insert(InstanceTokens(kw)[0]);
  }
  tokens.erase("<unk>");
  std::vector<std::string> vocab = {"<unk>"};
  vocab.insert(vocab.end(), tokens.begin(), tokens.end());
  return vocab;
}

}  // namespace nn
}  // namespace qgforge
