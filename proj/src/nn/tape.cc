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

#include "nn/tape.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace qgforge {
namespace nn {

Tape::Id Tape::Push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::Const(std::vector<double> v) {
  Node n;
  n.value = std::move(v);
  return Push(std::move(n));
}

Tape::Id Tape::Row(Param* p, int r) {
  QG_CHECK(r >= 0 && r < p->rows, ErrorCode::kRange, "row out of range in " + p->name);
  Node n;
  n.op = Op::kRow;
  n.param = p;
  n.index = r;
  n.value.assign(p->row(r), p->row(r) + p->cols);
  return Push(std::move(n));
}

Tape::Id Tape::MatVec(Param* w, Id x) {
  const std::vector<double>& xv = nodes_[x].value;
  QG_CHECK(static_cast<int>(xv.size()) == w->cols, ErrorCode::kInvalidArgument,
           "shape mismatch in " + w->name);
  Node n;
  n.op = Op::kMatVec;
  n.param = w;
  n.in = {x};
  n.value.assign(w->rows, 0.0);
  for (int r = 0; r < w->rows; ++r) {
    const double* row = w->row(r);
    double s = 0.0;
    for (int c = 0; c < w->cols; ++c) s += row[c] * xv[c];
    n.value[r] = s;
  }
  return Push(std::move(n));
}

Tape::Id Tape::Add(Id a, Id b) {
  QG_CHECK(size(a) == size(b), ErrorCode::kInvalidArgument, "shape mismatch in Add");
  Node n;
  n.op = Op::kAdd;
  n.in = {a, b};
  n.value = nodes_[a].value;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] += nodes_[b].value[i];
  return Push(std::move(n));
}

Tape::Id Tape::Tanh(Id a) {
  Node n;
  n.op = Op::kTanh;
  n.in = {a};
  n.value = nodes_[a].value;
  for (double& x : n.value) x = std::tanh(x);
  return Push(std::move(n));
}

Tape::Id Tape::Exp(Id a) {
  Node n;
  n.op = Op::kExp;
  n.in = {a};
  n.value = nodes_[a].value;
  for (double& x : n.value) x = std::exp(x);
  return Push(std::move(n));
}

Tape::Id Tape::Concat(const std::vector<Id>& parts) {
  Node n;
  n.op = Op::kConcat;
  n.in = parts;
  for (Id p : parts) n.value.insert(n.value.end(), nodes_[p].value.begin(), nodes_[p].value.end());
  return Push(std::move(n));
}

Tape::Id Tape::Mean(const std::vector<Id>& parts) {
  QG_CHECK(!parts.empty(), ErrorCode::kInvalidArgument, "mean of nothing");
  Node n;
  n.op = Op::kMean;
  n.in = parts;
  n.value.assign(nodes_[parts[0]].value.size(), 0.0);
  for (Id p : parts) {
    for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] += nodes_[p].value[i];
  }
  for (double& x : n.value) x /= static_cast<double>(parts.size());
  return Push(std::move(n));
}

Tape::Id Tape::Max(const std::vector<Id>& parts) {
  QG_CHECK(!parts.empty(), ErrorCode::kInvalidArgument, "max of nothing");
  Node n;
  n.op = Op::kMax;
  n.in = parts;
  n.value = nodes_[parts[0]].value;
  n.argmax.assign(n.value.size(), 0);
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const std::vector<double>& v = nodes_[parts[k]].value;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > n.value[i]) {
        n.value[i] = v[i];
        n.argmax[i] = static_cast<int>(k);
      }
    }
  }
  return Push(std::move(n));
}

Tape::Id Tape::Dot(Id a, Id b) {
  QG_CHECK(size(a) == size(b), ErrorCode::kInvalidArgument, "shape mismatch in Dot");
  Node n;
  n.op = Op::kDot;
  n.in = {a, b};
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_[a].value.size(); ++i) {
    s += nodes_[a].value[i] * nodes_[b].value[i];
  }
  n.value = {s};
  return Push(std::move(n));
}

Tape::Id Tape::Stack(const std::vector<Id>& scalars) {
  Node n;
  n.op = Op::kStack;
  n.in = scalars;
  for (Id s : scalars) n.value.push_back(nodes_[s].value[0]);
  return Push(std::move(n));
}

Tape::Id Tape::LogSoftmax(Id v) {
  const std::vector<double>& x = nodes_[v].value;
  QG_CHECK(!x.empty(), ErrorCode::kInvalidArgument, "softmax over nothing");
  double m = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double xi : x) z += std::exp(xi - m);
  double lse = m + std::log(z);
  Node n;
  n.op = Op::kLogSoftmax;
  n.in = {v};
  n.value = x;
  for (double& xi : n.value) xi -= lse;
  return Push(std::move(n));
}

Tape::Id Tape::Pick(Id v, int i) {
  QG_CHECK(i >= 0 && i < size(v), ErrorCode::kRange, "pick out of range");
  Node n;
  n.op = Op::kPick;
  n.in = {v};
  n.index = i;
  n.value = {nodes_[v].value[i]};
  return Push(std::move(n));
}

Tape::Id Tape::WeightedSum(Id weights, const std::vector<Id>& parts) {
  QG_CHECK(size(weights) == static_cast<int>(parts.size()) && !parts.empty(),
           ErrorCode::kInvalidArgument, "shape mismatch in WeightedSum");
  Node n;
  n.op = Op::kWeightedSum;
  n.in = parts;
  n.index = weights;
  n.value.assign(nodes_[parts[0]].value.size(), 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    double w = nodes_[weights].value[k];
    const std::vector<double>& v = nodes_[parts[k]].value;
    for (std::size_t i = 0; i < v.size(); ++i) n.value[i] += w * v[i];
  }
  return Push(std::move(n));
}

Tape::Id Tape::Sum(const std::vector<Id>& scalars) {
  Node n;
  n.op = Op::kSum;
  n.in = scalars;
  double s = 0.0;
  for (Id id : scalars) s += nodes_[id].value[0];
  n.value = {s};
  return Push(std::move(n));
}

Tape::Id Tape::Neg(Id a) {
  Node n;
  n.op = Op::kNeg;
  n.in = {a};
  n.value = nodes_[a].value;
  for (double& x : n.value) x = -x;
  return Push(std::move(n));
}

void Tape::Backward(Id root) {
  for (Node& n : nodes_) n.grad.assign(n.value.size(), 0.0);
  nodes_[root].grad.assign(nodes_[root].value.size(), 1.0);
  auto acc = [&](Id id, std::size_t i, double g) { nodes_[id].grad[i] += g; };
  for (Id id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    const std::vector<double>& g = n.grad;
    if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) continue;
    switch (n.op) {
      case Op::kConst: break;
      case Op::kRow: {
        double* pg = &n.param->g[static_cast<std::size_t>(n.index) * n.param->cols];
        for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i];
        break;
      }
      case Op::kMatVec: {
        Param* w = n.param;
        Node& x = nodes_[n.in[0]];
        for (int r = 0; r < w->rows; ++r) {
          if (g[r] == 0.0) continue;
          const double* row = w->row(r);
          double* grow = &w->g[static_cast<std::size_t>(r) * w->cols];
          for (int c = 0; c < w->cols; ++c) {
            grow[c] += g[r] * x.value[c];
            x.grad[c] += g[r] * row[c];
          }
        }
        break;
      }
      case Op::kAdd:
        for (std::size_t i = 0; i < g.size(); ++i) {
          acc(n.in[0], i, g[i]);
          acc(n.in[1], i, g[i]);
        }
        break;
      case Op::kTanh:
        for (std::size_t i = 0; i < g.size(); ++i) acc(n.in[0], i, g[i] * (1.0 - n.value[i] * n.value[i]));
        break;
      case Op::kExp:
        for (std::size_t i = 0; i < g.size(); ++i) acc(n.in[0], i, g[i] * n.value[i]);
        break;
      case Op::kConcat: {
        std::size_t off = 0;
        for (Id p : n.in) {
          for (std::size_t i = 0; i < nodes_[p].value.size(); ++i) acc(p, i, g[off + i]);
          off += nodes_[p].value.size();
        }
        break;
      }
      case Op::kMean: {
        double inv = 1.0 / static_cast<double>(n.in.size());
        for (Id p : n.in) {
          for (std::size_t i = 0; i < g.size(); ++i) acc(p, i, g[i] * inv);
        }
        break;
      }
      case Op::kMax:
        for (std::size_t i = 0; i < g.size(); ++i) acc(n.in[n.argmax[i]], i, g[i]);
        break;
      case Op::kDot: {
        Node& a = nodes_[n.in[0]];
        Node& b = nodes_[n.in[1]];
        for (std::size_t i = 0; i < a.value.size(); ++i) {
          a.grad[i] += g[0] * b.value[i];
          b.grad[i] += g[0] * a.value[i];
        }
        break;
      }
      case Op::kStack:
        for (std::size_t k = 0; k < n.in.size(); ++k) acc(n.in[k], 0, g[k]);
        break;
      case Op::kLogSoftmax: {
        double total = 0.0;
        for (double gi : g) total += gi;
        for (std::size_t i = 0; i < g.size(); ++i) acc(n.in[0], i, g[i] - std::exp(n.value[i]) * total);
        break;
      }
      case Op::kPick: acc(n.in[0], n.index, g[0]); break;
      case Op::kWeightedSum: {
        Node& w = nodes_[n.index];
        for (std::size_t k = 0; k < n.in.size(); ++k) {
          Node& p = nodes_[n.in[k]];
          double dw = 0.0;
          for (std::size_t i = 0; i < g.size(); ++i) {
            dw += g[i] * p.value[i];
            p.grad[i] += g[i] * w.value[k];
          }
          w.grad[k] += dw;
        }
        break;
      }
      case Op::kSum:
        for (Id p : n.in) acc(p, 0, g[0]);
        break;
      case Op::kNeg:
        for (std::size_t i = 0; i < g.size(); ++i) acc(n.in[0], i, -g[i]);
        break;
    }
  }
}

}  // namespace nn
}  // namespace qgforge
