#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hypertune/space.hpp"

namespace hypertune::text {

/// Tokenized two-class corpus. Docs are pre-lowercased, whitespace-split
/// token lists; labels are -1 or +1.
struct Corpus {
  std::vector<std::vector<std::string>> docs;
  std::vector<int> labels;

  std::size_t size() const { return docs.size(); }
};

/// n-gram vocabulary with dense lexicographic indices. Every entry's
/// document-frequency fraction lies in [min_df_frac, max_df_frac].
struct NgramVocab {
  std::unordered_map<std::string, int> entries;
  int n_min = 1;
  int n_max = 1;
  double min_df_frac = 0.0;
  double max_df_frac = 1.0;

  int size() const { return static_cast<int>(entries.size()); }
};

/// Sparse bag-of-words counts, (index, count) sorted by index.
struct BowVector {
  std::vector<std::pair<int, int>> counts;
};

/// Logistic-regression parameters; the intercept is never penalized.
struct LrParams {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

/// A vectorized corpus slice ready for training or scoring.
struct BowDataset {
  std::vector<BowVector> x;
  std::vector<int> y;
  int dim = 0;
};

/// The benchmark's tunable configuration. n-gram range and document
/// frequency window are parameterized in offset form so every point of the
/// box is feasible (n_max >= n_min, max_df >= min_df by construction).
struct TextSpaceConfig {
  std::int64_t min_n_gram = 1;
  std::int64_t ngram_offset = 0;
  double log_min_df = -4.0;  // base-10 exponent of the df fraction
  double df_offset = 0.9;
  double log_alpha = -4.0;   // base-10 exponent of the elastic-net scale
  double rho = 0.15;

  int n_max() const { return static_cast<int>(min_n_gram + ngram_offset); }
  double min_df() const { return std::pow(10.0, log_min_df); }
  double max_df() const { return std::min(1.0, min_df() + df_offset); }
  double alpha() const { return std::pow(10.0, log_alpha); }
};

/// Contiguous n-grams with tokens joined by "_", order preserved. Returns
/// max(0, |tokens| - n + 1) strings.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int n);

/// Vocabulary over all n-grams with n in [n_min, n_max] whose document
/// frequency fraction lies in [min_df_frac, max_df_frac]; indices follow
/// lexicographic n-gram order. Throws ObjectiveFailure "vocabulary empty"
/// when nothing survives the filter.
NgramVocab build_vocab(const Corpus& corpus, int n_min, int n_max,
                       double min_df_frac, double max_df_frac);

BowVector vectorize(const NgramVocab& vocab,
                    const std::vector<std::string>& tokens);

BowDataset vectorize_corpus(const NgramVocab& vocab, const Corpus& corpus);

/// Elastic-net logistic objective:
///   E = (1/M) sum log(1 + exp(-y_i (w.x_i + b)))
///       + alpha ((1-rho)/2 ||w||_2^2 + rho ||w||_1).
double lr_objective_value(const LrParams& params, const BowDataset& data,
                          double alpha, double rho);

/// Analytic full-batch gradient of E; the L1 term uses the sign subgradient
/// (0 at 0). Returns (d/dw, d/db).
std::pair<Eigen::VectorXd, double> lr_gradient(const LrParams& params,
                                               const BowDataset& data,
                                               double alpha, double rho);

/// Per-example SGD on E with per-epoch seeded shuffling and learning rate
/// eta_t = eta0 / (1 + t/M), t counting examples processed from 0.
LrParams train_sgd(const BowDataset& data, double alpha, double rho,
                   int epochs, double eta0, std::uint64_t seed);

double accuracy(const LrParams& params, const BowDataset& data);

/// Monte Carlo cross-validation objective: k seeded random
/// train_frac/(1-train_frac) splits; per split the vocabulary is rebuilt
/// from the training docs only, a model is trained, and validation accuracy
/// recorded; returns the mean over splits in fold order.
double cv_objective(const Corpus& corpus, const TextSpaceConfig& config,
                    std::uint64_t seed, int k = 5, double train_frac = 0.7);

/// Balanced synthetic corpus built from matched token pairs whose within-pair
/// order is class-dependent with probability (1+class_skew)/2. Unigram
/// frequencies are identical across classes by construction, so only n >= 2
/// features separate the classes; class_skew = 0 makes the classes
/// indistinguishable.
Corpus make_synthetic_corpus(std::uint64_t seed, int n_docs, int vocab_size,
                             int doc_len, double class_skew);

/// TSV corpus IO: one document per line, `<label>\t<text>`, label in {-1,1}.
Corpus load_corpus(const std::string& path);
void save_corpus(const std::string& path, const Corpus& corpus);

ParamSpace tunable_space();
Configuration default_configuration();
TextSpaceConfig config_from(const Configuration& config);

}  // namespace hypertune::text
