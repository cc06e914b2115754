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

#include "rtbconf/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rtbconf/errors.h"

namespace rtbconf {
namespace {

__extension__ typedef unsigned __int128 Uint128;

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0
                  : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double LogLossTerm(double p, int label) {
  const double q = std::clamp(p, kLogLossEpsilon, 1.0 - kLogLossEpsilon);
  return label == 1 ? -std::log(q) : -std::log1p(-q);
}

ConfusionRates RatesFrom(const ConfusionMatrix& m) {
  ConfusionRates r;
  r.accuracy = Ratio(m.true_positive + m.true_negative, m.total());
  r.sensitivity = Ratio(m.true_positive, m.true_positive + m.false_negative);
  r.specificity = Ratio(m.true_negative, m.true_negative + m.false_positive);
  r.precision = Ratio(m.true_positive, m.true_positive + m.false_positive);
  r.f1 = r.precision + r.sensitivity == 0.0
             ? 0.0
             : 2.0 * r.precision * r.sensitivity /
                   (r.precision + r.sensitivity);
  r.avg_accuracy = (r.sensitivity + r.specificity) / 2.0;
  return r;
}

std::optional<double> RocAuc(std::span<const double> scores,
                             std::span<const std::uint8_t> labels,
                             std::size_t exact_limit,
                             std::size_t roc_points) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  const auto positives = static_cast<std::uint64_t>(
      std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  const std::uint64_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] > scores[b];
  });

  // Walk thresholds from high to low. Between two emitted ROC points the
  // trapezoid contributes d_fp * (tp_prev + tp) / 2; accumulated doubled
  // in integers so the exact mode is exact.
  const std::size_t stride =
      n <= exact_limit ? 1 : std::max<std::size_t>(1, n / roc_points);
  Uint128 twice_area = 0;
  std::uint64_t tp = 0, fp = 0, tp_prev = 0, fp_prev = 0;
  std::size_t since_point = 0;
  for (std::size_t i = 0; i < n;) {
    const double s = scores[order[i]];
    std::size_t j = i;
    while (j < n && scores[order[j]] == s) {
      if (labels[order[j]]) ++tp; else ++fp;
      ++j;
    }
    since_point += j - i;
    i = j;
    if (since_point >= stride || i == n) {
      twice_area += static_cast<Uint128>(fp - fp_prev) *
                    (tp + tp_prev);
      tp_prev = tp;
      fp_prev = fp;
      since_point = 0;
    }
  }
  return static_cast<double>(twice_area) /
         (2.0 * static_cast<double>(positives) *
          static_cast<double>(negatives));
}

ModelMetrics ComputeMetrics(std::span<const double> predictions,
                            std::span<const std::uint8_t> labels,
                            double threshold) {
  if (predictions.size() != labels.size()) {
    throw ArgumentError("predictions and labels differ in length");
  }
  if (predictions.empty()) throw ArgumentError("no rows to evaluate");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ArgumentError("threshold must be in (0,1)");
  }
  ModelMetrics m;
  m.rows = predictions.size();
  m.threshold = threshold;
  double log_loss = 0.0, abs_err = 0.0, sq_err = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p = predictions[i];
    const int y = labels[i];
    log_loss += LogLossTerm(p, y);
    const double e = p - static_cast<double>(y);
    abs_err += std::abs(e);
    sq_err += e * e;
    const bool predicted = p >= threshold;
    if (y == 1) {
      ++(predicted ? m.confusion.true_positive : m.confusion.false_negative);
    } else {
      ++(predicted ? m.confusion.false_positive : m.confusion.true_negative);
    }
  }
  const auto n = static_cast<double>(m.rows);
  m.log_loss = log_loss / n;
  m.mae = abs_err / n;
  m.mse = sq_err / n;
  m.rmse = std::sqrt(m.mse);
  m.auc = RocAuc(predictions, labels);
  const ConfusionRates r = RatesFrom(m.confusion);
  m.accuracy = r.accuracy;
  m.avg_accuracy = r.avg_accuracy;
  m.sensitivity = r.sensitivity;
  m.specificity = r.specificity;
  m.precision = r.precision;
  m.f1 = r.f1;
  return m;
}

ModelMetrics EvaluateModel(const CvrModel& model, const CampaignDataset& data,
                           double threshold, int workers) {
  const std::vector<double> p = PredictRows(model, data, workers);
  return ComputeMetrics(p, data.conversions(), threshold);
}

}  // namespace rtbconf
