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
 * \file nn/tape.h
 * \brief Parameter blocks and a reverse-mode differentiation tape over vectors.
 *
 * Every tape value is a dense vector of doubles; scalars are vectors of
 * length one. Parameters are row-major matrices whose gradients accumulate in
 * place when Backward runs.
 */
#ifndef QGFORGE_NN_TAPE_H_
#define QGFORGE_NN_TAPE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace qgforge {
namespace nn {

struct Param {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> w;
  std::vector<double> g;

  Param() = default;
  Param(std::string n, int r, int c)
      : name(std::move(n)), rows(r), cols(c), w(static_cast<std::size_t>(r) * c, 0.0),
        g(static_cast<std::size_t>(r) * c, 0.0) {}
  double* row(int r) { return &w[static_cast<std::size_t>(r) * cols]; }
  const double* row(int r) const { return &w[static_cast<std::size_t>(r) * cols]; }
};

class Tape {
 public:
  using Id = int;

  Id Const(std::vector<double> v);
  Id Zeros(int n) { return Const(std::vector<double>(n, 0.0)); }
  /*! \brief Row \p r of a parameter matrix. */
  Id Row(Param* p, int r);
  /*! \brief W x for W of shape rows x cols. */
  Id MatVec(Param* w, Id x);
  Id Add(Id a, Id b);
  Id AddRow(Id a, Param* bias) { return Add(a, Row(bias, 0)); }
  Id Tanh(Id a);
  Id Exp(Id a);
  Id Concat(const std::vector<Id>& parts);
  Id Mean(const std::vector<Id>& parts);
  /*! \brief Coordinate-wise maximum. */
  Id Max(const std::vector<Id>& parts);
  Id Dot(Id a, Id b);
  /*! \brief Vector of scalars. */
  Id Stack(const std::vector<Id>& scalars);
  Id LogSoftmax(Id v);
  /*! \brief Element \p i of a vector, as a scalar. */
  Id Pick(Id v, int i);
  /*! \brief sum_i w[i] * parts[i]. */
  Id WeightedSum(Id weights, const std::vector<Id>& parts);
  /*! \brief Sum of scalars. */
  Id Sum(const std::vector<Id>& scalars);
  Id Neg(Id a);

  const std::vector<double>& value(Id id) const { return nodes_[id].value; }
  double scalar(Id id) const { return nodes_[id].value[0]; }
  int size(Id id) const { return static_cast<int>(nodes_[id].value.size()); }
  std::size_t num_nodes() const { return nodes_.size(); }

  /*! \brief Accumulates d root / d parameter into every touched Param::g. */
  void Backward(Id root);

 private:
  enum class Op : std::uint8_t {
    kConst, kRow, kMatVec, kAdd, kTanh, kExp, kConcat, kMean, kMax, kDot, kStack,
    kLogSoftmax, kPick, kWeightedSum, kSum, kNeg
  };
  struct Node {
    Op op = Op::kConst;
    std::vector<Id> in;
    Param* param = nullptr;
    int index = 0;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<int> argmax;
  };

  Id Push(Node n);

  std::vector<Node> nodes_;
};

}  // namespace nn
}  // namespace qgforge

#endif  // QGFORGE_NN_TAPE_H_
