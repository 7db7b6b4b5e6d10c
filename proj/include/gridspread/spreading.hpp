// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridspread/error.hpp"
#include "gridspread/metrics.hpp"
#include "gridspread/records.hpp"
#include "gridspread/rng.hpp"
#include "gridspread/weights.hpp"

namespace gridspread {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// w_ij = exp(-gamma * squared distance between feature rows), w_ii = 0.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> rbf_affinity(const Eigen::MatrixBase<Derived>& features,
                                                   typename Derived::Scalar gamma) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = features.rows();
  DenseMatrix<Scalar> affinity = DenseMatrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d2 = (features.row(i) - features.row(j)).squaredNorm();
      const Scalar w = std::exp(-gamma * d2);
      affinity(i, j) = w;
      affinity(j, i) = w;
    }
  }
  return affinity;
}

/// Directed k-nearest-neighbor adjacency, symmetrized by union: an edge
/// survives when either endpoint selects the other. Distance ties break
/// toward the smaller row index. k is clamped to n - 1.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> knn_affinity(const Eigen::MatrixBase<Derived>& features,
                                                   Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = features.rows();
  k = std::clamp<Eigen::Index>(k, 1, n - 1);
  DenseMatrix<Scalar> directed = DenseMatrix<Scalar>::Zero(n, n);
  std::vector<std::pair<Scalar, Eigen::Index>> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      order.emplace_back((features.row(i) - features.row(j)).squaredNorm(), j);
    }
    std::sort(order.begin(), order.end());
    for (Eigen::Index m = 0; m < k; ++m) directed(i, order[static_cast<std::size_t>(m)].second) = Scalar(1);
  }
  return directed.cwiseMax(directed.transpose().eval());
}

/// S = D^(-1/2) W D^(-1/2) with D the diagonal of row sums. Zero-degree
/// rows come back as zero rows; their count lands in *zero_degree.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> normalize_affinity(
    const Eigen::MatrixBase<Derived>& affinity, Eigen::Index* zero_degree = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = affinity.rows();
  DenseVector<Scalar> inv_sqrt(n);
  Eigen::Index zeros = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar degree = affinity.row(i).sum();
    if (degree > Scalar(0)) {
      inv_sqrt(i) = Scalar(1) / std::sqrt(degree);
    } else {
      inv_sqrt(i) = Scalar(0);
      ++zeros;
    }
  }
  if (zero_degree != nullptr) *zero_degree = zeros;
  return inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal();
}

enum class KernelType { rbf, knn };

const char* to_string(KernelType kernel);
KernelType parse_kernel(std::string_view text);

struct SpreadConfig {
  double alpha = 0.9;   // clamping factor, in (0, 1)
  KernelType kernel = KernelType::rbf;
  double gamma = 0.0;   // rbf width; <= 0 means 1/d
  int k_neighbors = 5;  // knn degree before symmetrization
  double tol = 1e-6;    // max elementwise change declaring convergence
  int max_iter = 1000;
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
};

struct SimilarityBuild {
  DenseMatrix<double> matrix;
  Eigen::Index zero_degree = 0;
};

/// Kernel affinity followed by symmetric normalization. Throws
/// Error(input) on non-finite features.
SimilarityBuild build_similarity(const DenseMatrix<double>& features, const SpreadConfig& cfg);

/// Encoding plan for the demographic and temporal feature block.
/// Categories per field are the sorted distinct values present, with
/// empty or absent values as an explicit trailing missing column. Years
/// min-max scale over [year_min, year_max]; a degenerate range maps to
/// 0.5.
struct AttributeSchema {
  std::vector<std::string> fields;  // categorical attribute names, in column order
  bool include_year = true;
  int year_min = 0;
  int year_max = 0;
};

/// Rows are records, columns are the admin2's proportion row over its
/// support cells, then the one-hot attribute blocks, then scaled year.
/// Throws Error(config) when the layout has zero columns.
DenseMatrix<double> build_features(std::span<const DisplacementRecord> records,
                                   const ProportionRow& row, const AttributeSchema& schema);

struct LabelSpreadProblem {
  DenseMatrix<double> features;            // n x d
  std::vector<std::optional<int>> labels;  // index into candidate_cells, one per row
  std::vector<GridCellId> candidate_cells;
  std::vector<double> spatial_prior;  // aligned with candidate_cells; empty means uniform
  SpreadConfig config;
};

struct Prediction {
  GridCellId cell;
  int class_index = 0;
  double confidence = 0.0;
  bool no_signal = false;  // all-zero score row; confidence is uniform
};

struct SpreadResult {
  DenseMatrix<double> class_scores;  // n x |candidate_cells|
  std::vector<Prediction> predicted;
  int iterations = 0;
  bool converged = false;
  Eigen::Index zero_degree_rows = 0;
};

/// Iterates F <- alpha * S * F + (1 - alpha) * Y from F(0) = Y until the
/// largest elementwise change drops below tol or max_iter is reached.
/// Prediction is the row argmax; exact ties break toward the larger
/// spatial prior, then the smaller cell index. Throws Error(unsolvable)
/// when no row is labeled.
SpreadResult spread(const LabelSpreadProblem& problem);

struct Admin2Problem {
  std::string admin2_id;
  std::vector<LabeledRecord> labeled;
  std::vector<ResolvedRecord> unlabeled;
  ProportionRow row;
  AttributeSchema schema;
  SpreadConfig config;
};

struct ValidationReport {
  bool validated = false;  // false when no validation rows could be held out
  int n_train = 0;
  int n_validation = 0;
  ConfusionTable confusion;  // validation rows, true by predicted
  MetricsValues values;
  double baseline_accuracy = 0.0;  // always predicting the max-prior cell
  int zero_signal = 0;             // no-signal rows in the final fit
  int iterations = 0;
  bool converged = true;
};

struct Admin2Solution {
  std::vector<PlacementResult> placements;  // unlabeled records, sorted by record_id
  ValidationReport report;
};

/// Holds out a seeded validation share of the labeled records, scores
/// the spread against it, then refits on every label to place the
/// unlabeled records. No-signal rows and label-free admin2s fall back to
/// seeded sampling from the proportion row, with fallback set on the
/// placement.
Admin2Solution solve_admin2(const Admin2Problem& problem);

}  // namespace gridspread
