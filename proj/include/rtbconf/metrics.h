/*
 * Copyright 2026 The rtbconf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RTBCONF_METRICS_H_
#define RTBCONF_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "rtbconf/cvr_model.h"
#include "rtbconf/dataset.h"

namespace rtbconf {

// Probabilities are clipped to [kLogLossEpsilon, 1 - kLogLossEpsilon] before
// taking logs.
inline constexpr double kLogLossEpsilon = 1e-15;

// -(y log p + (1 - y) log(1 - p)) with clipping.
double LogLossTerm(double p, int label);

// Rows are the true class, columns the predicted class; "positive" means a
// conversion (label 1) and a prediction p >= threshold.
struct ConfusionMatrix {
  std::uint64_t true_positive = 0;   // converted, predicted positive
  std::uint64_t false_negative = 0;  // converted, predicted negative
  std::uint64_t false_positive = 0;  // no conversion, predicted positive
  std::uint64_t true_negative = 0;   // no conversion, predicted negative

  std::uint64_t total() const {
    return true_positive + false_negative + false_positive + true_negative;
  }
};

// Threshold-dependent rates derived from a confusion matrix. A rate whose
// denominator is zero is reported as 0.
struct ConfusionRates {
  double accuracy = 0.0;
  double sensitivity = 0.0;   // TP / (TP + FN), a.k.a. recall
  double specificity = 0.0;   // TN / (TN + FP)
  double precision = 0.0;     // TP / (TP + FP)
  double f1 = 0.0;
  double avg_accuracy = 0.0;  // (sensitivity + specificity) / 2
};
ConfusionRates RatesFrom(const ConfusionMatrix& m);

struct ModelMetrics {
  std::size_t rows = 0;
  double log_loss = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  std::optional<double> auc;  // absent when only one class is present
  double accuracy = 0.0;
  double avg_accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion;
  double threshold = 0.5;
};

// Area under the ROC curve with tied scores counted as half. Exact (rank
// statistic) for up to `exact_limit` rows; above that, the trapezoid rule
// over roughly `roc_points` ROC points taken at score boundaries.
std::optional<double> RocAuc(std::span<const double> scores,
                             std::span<const std::uint8_t> labels,
                             std::size_t exact_limit = 100000,
                             std::size_t roc_points = 1000);

// Throws ArgumentError on mismatched lengths, empty input or a threshold
// outside (0, 1).
ModelMetrics ComputeMetrics(std::span<const double> predictions,
                            std::span<const std::uint8_t> labels,
                            double threshold = 0.5);

ModelMetrics EvaluateModel(const CvrModel& model, const CampaignDataset& data,
                           double threshold = 0.5, int workers = 1);

}  // namespace rtbconf

#endif  // RTBCONF_METRICS_H_
