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

#include "nn/train.h"

#include <cmath>
#include <numeric>
#include <random>

#include "common/error.h"

namespace qgforge {
namespace nn {

double LossAndGradients(Model& model, const std::vector<const TrainExample*>& batch) {
  double total = 0.0;
  for (const TrainExample* ex : batch) {
    Session s(model);
    Tape::Id loss = model.Loss(s, ex->question, ex->signals, ex->pool);
    total += s.tape.scalar(loss);
    s.tape.Backward(loss);
  }
  return total;
}

double BatchLoss(const Model& model, const std::vector<const TrainExample*>& batch) {
  double total = 0.0;
  for (const TrainExample* ex : batch) {
    Session s(model);
    total += s.tape.scalar(model.Loss(s, ex->question, ex->signals, ex->pool));
  }
  return total;
}

std::vector<double> Train(Model& model, const std::vector<TrainExample>& examples,
                          const TrainConfig& config,
                          const std::function<bool(int, double)>& after_epoch) {
  if (examples.empty()) throw Error(ErrorCode::kData, "training corpus is empty");
  QG_CHECK(config.batch_size > 0, ErrorCode::kInvalidArgument, "batch size must be positive");
  std::vector<Param>& params = model.params();
  std::vector<std::vector<double>> m1(params.size()), m2(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m1[i].assign(params[i].w.size(), 0.0);
    m2[i].assign(params[i].w.size(), 0.0);
  }
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;
  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::vector<const TrainExample*> batch;
      for (std::size_t k = start; k < std::min(order.size(), start + config.batch_size); ++k) {
        batch.push_back(&examples[order[k]]);
      }
      for (Param& p : params) std::fill(p.g.begin(), p.g.end(), 0.0);
      total += LossAndGradients(model, batch);
      ++step;
      double scale = 1.0 / static_cast<double>(batch.size());
      double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = params[i];
        for (std::size_t j = 0; j < p.w.size(); ++j) {
          double g = p.g[j] * scale;
          if (g == 0.0 && m1[i][j] == 0.0 && m2[i][j] == 0.0) continue;
          m1[i][j] = config.beta1 * m1[i][j] + (1.0 - config.beta1) * g;
          m2[i][j] = config.beta2 * m2[i][j] + (1.0 - config.beta2) * g * g;
          double update = config.lr * (m1[i][j] / c1) / (std::sqrt(m2[i][j] / c2) + config.epsilon);
          // Weights stay representable in float32 so checkpoints are lossless.
          p.w[j] = static_cast<float>(p.w[j] - update);
        }
      }
    }
    double mean = total / static_cast<double>(examples.size());
    history.push_back(mean);
    if (after_epoch && after_epoch(epoch, mean)) break;
  }
  for (Param& p : params) std::fill(p.g.begin(), p.g.end(), 0.0);
  return history;
}

}  // namespace nn
}  // namespace qgforge
