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

// Canonical encoding of tree-shaped graphs.
//
// The undirected skeleton of a valid graph is a tree, so rooting it and
// sorting children by their encoded subtrees (AHU) gives an invariant string.
// Copy-links are the only non-tree relation. Their groups are encoded by the
// preorder positions of their members, minimized over the orderings of tied
// siblings whose subtrees contain a copy-linked slot. Tied siblings without
// such slots are interchangeable and need no enumeration.

#include <algorithm>
#include <numeric>

#include "common/error.h"
#include "graph/graph.h"

namespace qgforge {

namespace {

constexpr std::size_t kMaxOrderings = 50000;

std::string Field(const std::optional<std::string>& instance) {
  if (!instance) return "-";
  return std::to_string(instance->size()) + ":" + *instance;
}

class TreeEncoder {
 public:
  explicit TreeEncoder(const Graph& g) : g_(g), n_(g.num_vertices()), m_(g.num_edges()) {
    adjacency_.resize(n_);
    for (const Edge& e : g.edges) {
      adjacency_[e.head].push_back(e.id);
      adjacency_[e.tail].push_back(e.id);
    }
    // Copy groups over the combined node space: vertices, then edges.
    group_.resize(n_ + m_);
    std::iota(group_.begin(), group_.end(), 0);
    for (auto [src, tgt] : g.copies.vertex) Union(src, tgt);
    for (auto [src, tgt] : g.copies.edge) Union(n_ + src, n_ + tgt);
    std::vector<int> size(n_ + m_, 0);
    for (int i = 0; i < n_ + m_; ++i) ++size[Find(i)];
    involved_.resize(n_ + m_);
    for (int i = 0; i < n_ + m_; ++i) involved_[i] = size[Find(i)] > 1;
  }

  std::string Encode(int root) {
    Sub sub = Build(root, -1);
    std::string best_copies;
    bool first = true;
    for (const auto& order : sub.orders) {
      std::string copies = CopyString(order);
      if (first || copies < best_copies) best_copies = copies;
      first = false;
    }
    return sub.str + "|" + best_copies;
  }

 private:
  struct Sub {
    std::string str;
    bool involved = false;
    std::vector<std::vector<int>> orders;
  };

  int Find(int x) {
    while (group_[x] != x) x = group_[x] = group_[group_[x]];
    return x;
  }
  void Union(int a, int b) { group_[Find(a)] = Find(b); }

  Sub Build(int v, int via_edge) {
    const Vertex& vx = g_.vertices[v];
    struct Child {
      std::string key;
      bool involved;
      std::vector<std::vector<int>> orders;
    };
    std::vector<Child> children;
    for (int eid : adjacency_[v]) {
      if (eid == via_edge) continue;
      const Edge& e = g_.edges[eid];
      int w = e.head == v ? e.tail : e.head;
      Sub sub = Build(w, eid);
      Child child;
      child.key = "[" + std::string(EdgeClassName(e.cls)) + (e.head == v ? ">" : "<") +
                  Field(e.instance) + sub.str + "]";
      child.involved = sub.involved || involved_[n_ + eid];
      for (auto& order : sub.orders) {
        std::vector<int> seq;
        seq.reserve(order.size() + 1);
        seq.push_back(n_ + eid);
        seq.insert(seq.end(), order.begin(), order.end());
        child.orders.push_back(std::move(seq));
      }
      children.push_back(std::move(child));
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.key < b.key; });

    Sub out;
    out.str = "(" + std::string(VertexClassName(vx.cls)) + "@" + std::to_string(vx.segment) +
              Field(vx.instance);
    out.involved = involved_[v];
    for (const Child& c : children) {
      out.str += c.key;
      out.involved = out.involved || c.involved;
    }
    out.str += ")";

    // Expand the admissible child orderings group by group.
    out.orders = {{v}};
    std::size_t i = 0;
    while (i < children.size()) {
      std::size_t j = i;
      while (j < children.size() && children[j].key == children[i].key) ++j;
      std::vector<std::vector<int>> group_orders;
      std::vector<int> perm(j - i);
      std::iota(perm.begin(), perm.end(), static_cast<int>(i));
      bool permute = children[i].involved && j - i > 1;
      do {
        std::vector<std::vector<int>> partial = {{}};
        for (int idx : perm) {
          std::vector<std::vector<int>> next;
          for (const auto& prefix : partial) {
            for (const auto& order : children[idx].orders) {
              std::vector<int> seq = prefix;
              seq.insert(seq.end(), order.begin(), order.end());
              next.push_back(std::move(seq));
            }
          }
          partial = std::move(next);
          QG_CHECK(partial.size() <= kMaxOrderings, ErrorCode::kInvalidArgument,
                   "canonical form search exceeds its ordering budget");
        }
        group_orders.insert(group_orders.end(), partial.begin(), partial.end());
      } while (permute && std::next_permutation(perm.begin(), perm.end()));

      std::vector<std::vector<int>> merged;
      for (const auto& prefix : out.orders) {
        for (const auto& tail : group_orders) {
          std::vector<int> seq = prefix;
          seq.insert(seq.end(), tail.begin(), tail.end());
          merged.push_back(std::move(seq));
        }
      }
      QG_CHECK(merged.size() <= kMaxOrderings, ErrorCode::kInvalidArgument,
               "canonical form search exceeds its ordering budget");
      out.orders = std::move(merged);
      i = j;
    }
    return out;
  }

  std::string CopyString(const std::vector<int>& order) {
    std::vector<int> pos(n_ + m_, -1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> groups(n_ + m_);
    for (int i = 0; i < n_ + m_; ++i) {
      if (involved_[i]) groups[Find(i)].push_back(pos[i]);
    }
    std::vector<std::vector<int>> nonempty;
    for (auto& grp : groups) {
      if (grp.empty()) continue;
      std::sort(grp.begin(), grp.end());
      nonempty.push_back(std::move(grp));
    }
    std::sort(nonempty.begin(), nonempty.end());
    std::string out;
    for (const auto& grp : nonempty) {
      out += "{";
      for (int p : grp) out += std::to_string(p) + ",";
      out += "}";
    }
    return out;
  }

  const Graph& g_;
  int n_;
  int m_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> group_;
  std::vector<bool> involved_;
};

bool IsTree(const Graph& g) {
  const int n = g.num_vertices();
  if (n == 0 || n != g.num_edges() + 1) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges) {
    if (e.head < 0 || e.head >= n || e.tail < 0 || e.tail >= n) return false;
    int a = find(e.head), b = find(e.tail);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

bool CopiesInRange(const Graph& g) {
  for (auto [src, tgt] : g.copies.vertex) {
    if (src < 0 || tgt < 0 || src >= g.num_vertices() || tgt >= g.num_vertices()) return false;
  }
  for (auto [src, tgt] : g.copies.edge) {
    if (src < 0 || tgt < 0 || src >= g.num_edges() || tgt >= g.num_edges()) return false;
  }
  return true;
}

}  // namespace

std::string CanonicalForm(const Graph& g) {
  if (!IsTree(g) || !CopiesInRange(g)) return "RAW|" + GraphToJson(g);
  TreeEncoder encoder(g);
  int ans = g.AnswerVertex();
  if (ans >= 0) return encoder.Encode(ans);
  std::string best;
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::string enc = encoder.Encode(v);
    if (v == 0 || enc < best) best = std::move(enc);
  }
  return best;
}

bool AqgEqual(const AbstractQueryGraph& a, const AbstractQueryGraph& b) {
  return CanonicalForm(a) == CanonicalForm(b);
}

bool QueryGraphEqual(const QueryGraph& a, const QueryGraph& b) {
  // Copy groups of a filled graph follow from its instances.
  QueryGraph x = a, y = b;
  x.copies = CopiesFromInstances(x);
  y.copies = CopiesFromInstances(y);
  return CanonicalForm(x) == CanonicalForm(y);
}

}  // namespace qgforge
