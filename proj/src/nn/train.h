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
 * \file nn/train.h
 * \brief Teacher-forced training of the scorer.
 */
#ifndef QGFORGE_NN_TRAIN_H_
#define QGFORGE_NN_TRAIN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nn/model.h"

namespace qgforge {
namespace nn {

struct TrainExample {
  std::string id;
  std::string question;
  SupervisionSequences signals;
  CandidatePool pool;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 16;
  /*! \brief Adam step size. */
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
};

/*! \brief Loss and gradients of a batch; gradients land in the model's Param::g. */
double LossAndGradients(Model& model, const std::vector<const TrainExample*>& batch);

/*! \brief Loss of a batch without touching gradients. */
double BatchLoss(const Model& model, const std::vector<const TrainExample*>& batch);

/*!
 * \brief Runs mini-batch Adam over shuffled examples. After every epoch
 * \p after_epoch receives the epoch number (1-based) and the mean example
 * loss; returning true stops training.
 * \return mean example loss per epoch.
 * \throws Error(kData) on an empty corpus.
 */
std::vector<double> Train(Model& model, const std::vector<TrainExample>& examples,
                          const TrainConfig& config,
                          const std::function<bool(int, double)>& after_epoch = nullptr);

}  // namespace nn
}  // namespace qgforge

#endif  // QGFORGE_NN_TRAIN_H_
