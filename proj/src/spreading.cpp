// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#include "gridspread/spreading.hpp"

#include <set>

#include "gridspread/util.hpp"

namespace gridspread {
namespace {

int sample_index(const std::vector<double>& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

int prior_argmax(const std::vector<double>& prior) {
  int best = 0;
  for (std::size_t i = 1; i < prior.size(); ++i) {
    if (prior[i] > prior[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

const char* to_string(KernelType kernel) {
  switch (kernel) {
    case KernelType::rbf:
      return "rbf";
    case KernelType::knn:
      return "knn";
  }
  return "unknown";
}

KernelType parse_kernel(std::string_view text) {
  if (text == "rbf") return KernelType::rbf;
  if (text == "knn") return KernelType::knn;
  throw Error(ErrorKind::config, "unknown kernel \"" + std::string(text) + "\", expected rbf or knn");
}

SimilarityBuild build_similarity(const DenseMatrix<double>& features, const SpreadConfig& cfg) {
  if (features.rows() < 2) {
    throw Error(ErrorKind::input, "similarity needs at least 2 rows, got " +
                                      std::to_string(features.rows()));
  }
  if (features.cols() < 1) {
    throw Error(ErrorKind::input, "similarity needs at least one feature column");
  }
  if (!features.allFinite()) {
    throw Error(ErrorKind::input, "features contain non-finite values");
  }
  DenseMatrix<double> affinity;
  if (cfg.kernel == KernelType::rbf) {
    const double gamma =
        cfg.gamma > 0.0 ? cfg.gamma : 1.0 / static_cast<double>(features.cols());
    affinity = rbf_affinity(features, gamma);
  } else {
    affinity = knn_affinity(features, cfg.k_neighbors);
  }
  SimilarityBuild build;
  build.matrix = normalize_affinity(affinity, &build.zero_degree);
  return build;
}

DenseMatrix<double> build_features(std::span<const DisplacementRecord> records,
                                   const ProportionRow& row, const AttributeSchema& schema) {
  struct FieldEncoding {
    std::vector<std::string> categories;  // sorted distinct non-empty values
    bool has_missing = false;
  };
  std::vector<FieldEncoding> encodings;
  encodings.reserve(schema.fields.size());
  for (const std::string& field : schema.fields) {
    FieldEncoding enc;
    std::set<std::string> values;
    for (const DisplacementRecord& r : records) {
      auto it = r.attributes.find(field);
      if (it == r.attributes.end() || it->second.empty()) {
        enc.has_missing = true;
      } else {
        values.insert(it->second);
      }
    }
    enc.categories.assign(values.begin(), values.end());
    encodings.push_back(std::move(enc));
  }

  Eigen::Index dim = static_cast<Eigen::Index>(row.values.size());
  for (const FieldEncoding& enc : encodings) {
    dim += static_cast<Eigen::Index>(enc.categories.size()) + (enc.has_missing ? 1 : 0);
  }
  if (schema.include_year) ++dim;
  if (dim == 0) {
    throw Error(ErrorKind::config,
                "feature layout has zero columns: empty proportion row and empty schema");
  }

  DenseMatrix<double> features =
      DenseMatrix<double>::Zero(static_cast<Eigen::Index>(records.size()), dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DisplacementRecord& r = records[i];
    const Eigen::Index ri = static_cast<Eigen::Index>(i);
    Eigen::Index col = 0;
    for (double v : row.values) features(ri, col++) = v;
    for (std::size_t f = 0; f < encodings.size(); ++f) {
      const FieldEncoding& enc = encodings[f];
      const Eigen::Index block = col;
      std::string value;
      if (auto it = r.attributes.find(schema.fields[f]); it != r.attributes.end()) {
        value = it->second;
      }
      if (value.empty()) {
        features(ri, block + static_cast<Eigen::Index>(enc.categories.size())) = 1.0;
      } else {
        auto pos = std::lower_bound(enc.categories.begin(), enc.categories.end(), value);
        features(ri, block + static_cast<Eigen::Index>(pos - enc.categories.begin())) = 1.0;
      }
      col += static_cast<Eigen::Index>(enc.categories.size()) + (enc.has_missing ? 1 : 0);
    }
    if (schema.include_year) {
      double scaled = 0.5;
      if (schema.year_max > schema.year_min) {
        scaled = static_cast<double>(r.year - schema.year_min) /
                 static_cast<double>(schema.year_max - schema.year_min);
        scaled = std::clamp(scaled, 0.0, 1.0);
      }
      features(ri, col) = scaled;
    }
  }
  return features;
}

SpreadResult spread(const LabelSpreadProblem& problem) {
  const Eigen::Index n = problem.features.rows();
  const std::size_t k = problem.candidate_cells.size();
  if (k == 0) {
    throw Error(ErrorKind::config, "candidate cell list is empty");
  }
  if (problem.labels.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::input, "got " + std::to_string(problem.labels.size()) +
                                      " labels for " + std::to_string(n) + " feature rows");
  }
  if (!(problem.config.alpha > 0.0 && problem.config.alpha < 1.0)) {
    throw Error(ErrorKind::config,
                "alpha must lie in (0, 1), got " + format_double(problem.config.alpha));
  }
  if (!(problem.config.tol > 0.0)) {
    throw Error(ErrorKind::config, "tol must be positive");
  }
  if (problem.config.max_iter < 1) {
    throw Error(ErrorKind::config, "max_iter must be at least 1");
  }
  if (!problem.spatial_prior.empty() && problem.spatial_prior.size() != k) {
    throw Error(ErrorKind::config, "spatial prior length " +
                                       std::to_string(problem.spatial_prior.size()) +
                                       " does not match " + std::to_string(k) + " candidates");
  }
  int labeled_rows = 0;
  for (const std::optional<int>& label : problem.labels) {
    if (!label) continue;
    if (*label < 0 || static_cast<std::size_t>(*label) >= k) {
      throw Error(ErrorKind::input, "label index " + std::to_string(*label) +
                                        " outside [0, " + std::to_string(k) + ")");
    }
    ++labeled_rows;
  }
  if (labeled_rows == 0) {
    throw Error(ErrorKind::unsolvable, "label spreading needs at least one labeled row");
  }

  DenseMatrix<double> y = DenseMatrix<double>::Zero(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (problem.labels[static_cast<std::size_t>(i)]) {
      y(i, *problem.labels[static_cast<std::size_t>(i)]) = 1.0;
    }
  }

  SpreadResult result;
  if (n == 1) {
    result.class_scores = y;
    result.converged = true;
  } else {
    const SimilarityBuild sim = build_similarity(problem.features, problem.config);
    result.zero_degree_rows = sim.zero_degree;
    const double alpha = problem.config.alpha;
    DenseMatrix<double> f = y;
    for (int iter = 0; iter < problem.config.max_iter; ++iter) {
      DenseMatrix<double> next = alpha * (sim.matrix * f) + (1.0 - alpha) * y;
      const double delta = (next - f).cwiseAbs().maxCoeff();
      f = std::move(next);
      result.iterations = iter + 1;
      if (delta < problem.config.tol) {
        result.converged = true;
        break;
      }
    }
    result.class_scores = std::move(f);
  }

  auto prior_at = [&](std::size_t j) {
    return problem.spatial_prior.empty() ? 1.0 : problem.spatial_prior[j];
  };
  result.predicted.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      const double score = result.class_scores(i, static_cast<Eigen::Index>(j));
      const double best_score = result.class_scores(i, static_cast<Eigen::Index>(best));
      if (score > best_score || (score == best_score && prior_at(j) > prior_at(best))) {
        best = j;
      }
    }
    Prediction p;
    p.cell = problem.candidate_cells[best];
    p.class_index = static_cast<int>(best);
    const double row_sum = result.class_scores.row(i).sum();
    if (row_sum > 0.0) {
      p.confidence = result.class_scores(i, static_cast<Eigen::Index>(best)) / row_sum;
    } else {
      p.confidence = 1.0 / static_cast<double>(k);
      p.no_signal = true;
    }
    result.predicted.push_back(p);
  }
  return result;
}

Admin2Solution solve_admin2(const Admin2Problem& problem) {
  if (problem.row.cells.empty()) {
    throw Error(ErrorKind::config,
                "admin2 " + problem.admin2_id + " has an empty proportion row");
  }
  const std::size_t n_labeled = problem.labeled.size();
  const std::size_t n_unlabeled = problem.unlabeled.size();

  Rng base(problem.config.seed);
  Rng split_rng = base.fork("split");
  Rng sample_rng = base.fork("sample");

  Admin2Solution solution;
  ValidationReport& report = solution.report;

  if (n_labeled == 0) {
    for (const ResolvedRecord& r : problem.unlabeled) {
      const int idx = sample_index(problem.row.values, sample_rng);
      solution.placements.push_back({r.record.record_id,
                                     problem.row.cells[static_cast<std::size_t>(idx)],
                                     PlacementMethod::modeled,
                                     problem.row.values[static_cast<std::size_t>(idx)], true});
    }
    std::sort(solution.placements.begin(), solution.placements.end(),
              [](const PlacementResult& a, const PlacementResult& b) {
                return a.record_id < b.record_id;
              });
    return solution;
  }

  auto class_of = [&](GridCellId cell) {
    auto it = std::lower_bound(problem.row.cells.begin(), problem.row.cells.end(), cell);
    if (it == problem.row.cells.end() || *it != cell) {
      throw Error(ErrorKind::input, "label cell " + to_string(cell) +
                                        " lies outside the building support of " +
                                        problem.admin2_id);
    }
    return static_cast<int>(it - problem.row.cells.begin());
  };

  std::vector<DisplacementRecord> all_records;
  all_records.reserve(n_labeled + n_unlabeled);
  for (const LabeledRecord& l : problem.labeled) all_records.push_back(l.record.record);
  for (const ResolvedRecord& r : problem.unlabeled) all_records.push_back(r.record);

  LabelSpreadProblem base_problem;
  base_problem.features = build_features(all_records, problem.row, problem.schema);
  base_problem.candidate_cells = problem.row.cells;
  base_problem.spatial_prior = problem.row.values;
  base_problem.config = problem.config;

  // Seeded split: shuffled label indices, validation drawn from the tail.
  std::vector<std::size_t> order(n_labeled);
  for (std::size_t i = 0; i < n_labeled; ++i) order[i] = i;
  shuffle(order, split_rng);
  // The epsilon absorbs float artifacts like (1 - 0.8) * 10 = 1.999...96,
  // which should count as the intended 2 validation rows.
  std::size_t n_val =
      static_cast<std::size_t>(std::floor((1.0 - problem.config.train_fraction) *
                                              static_cast<double>(n_labeled) +
                                          1e-9));
  if (n_labeled >= 5 && n_val == 0) n_val = 1;
  if (n_val >= n_labeled) n_val = n_labeled - 1;
  const std::size_t n_train = n_labeled - n_val;
  report.n_train = static_cast<int>(n_train);
  report.n_validation = static_cast<int>(n_val);

  if (n_val >= 1) {
    LabelSpreadProblem validation = base_problem;
    validation.labels.assign(n_labeled + n_unlabeled, std::nullopt);
    for (std::size_t i = 0; i < n_train; ++i) {
      validation.labels[order[i]] = class_of(problem.labeled[order[i]].cell);
    }
    const SpreadResult run = spread(validation);

    std::vector<GridCellId> truth;
    std::vector<GridCellId> predicted;
    const int baseline = prior_argmax(problem.row.values);
    std::size_t baseline_hits = 0;
    for (std::size_t i = n_train; i < n_labeled; ++i) {
      const std::size_t row_index = order[i];
      truth.push_back(problem.labeled[row_index].cell);
      predicted.push_back(run.predicted[row_index].cell);
      if (class_of(problem.labeled[row_index].cell) == baseline) ++baseline_hits;
    }
    report.validated = true;
    report.confusion = confusion(truth, predicted);
    report.values = metrics(report.confusion);
    report.baseline_accuracy =
        static_cast<double>(baseline_hits) / static_cast<double>(n_val);
    report.iterations = run.iterations;
    report.converged = run.converged;
  }

  if (n_unlabeled > 0) {
    LabelSpreadProblem refit = base_problem;
    refit.labels.assign(n_labeled + n_unlabeled, std::nullopt);
    for (std::size_t i = 0; i < n_labeled; ++i) {
      refit.labels[i] = class_of(problem.labeled[i].cell);
    }
    const SpreadResult run = spread(refit);
    report.iterations = run.iterations;
    report.converged = run.converged;
    for (std::size_t j = 0; j < n_unlabeled; ++j) {
      const Prediction& p = run.predicted[n_labeled + j];
      const std::string& record_id = problem.unlabeled[j].record.record_id;
      if (p.no_signal) {
        const int idx = sample_index(problem.row.values, sample_rng);
        solution.placements.push_back({record_id,
                                       problem.row.cells[static_cast<std::size_t>(idx)],
                                       PlacementMethod::modeled,
                                       problem.row.values[static_cast<std::size_t>(idx)], true});
        ++report.zero_signal;
      } else {
        solution.placements.push_back(
            {record_id, p.cell, PlacementMethod::modeled, p.confidence, false});
      }
    }
  }

  std::sort(solution.placements.begin(), solution.placements.end(),
            [](const PlacementResult& a, const PlacementResult& b) {
              return a.record_id < b.record_id;
            });
  return solution;
}

}  // namespace gridspread
