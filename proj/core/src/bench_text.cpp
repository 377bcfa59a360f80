#include "hypertune/bench_text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hypertune/error.hpp"

namespace hypertune::text {

namespace {

// SGD schedule constants used by cv_objective. Calibrated once for the
// desk-scale corpora; not part of the tunable space.
constexpr int kCvEpochs = 6;
constexpr double kCvEta0 = 0.5;

double softplus(double t) {
  // log(1 + e^t) without overflow
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

// d/dmargin log(1 + exp(-y * margin)) = -y / (1 + exp(y * margin))
double logistic_slope(int y, double margin) {
  const double ym = static_cast<double>(y) * margin;
  if (ym > 0.0) {
    const double e = std::exp(-ym);
    return -static_cast<double>(y) * e / (1.0 + e);
  }
  return -static_cast<double>(y) / (1.0 + std::exp(ym));
}

double sparse_margin(const LrParams& params, const BowVector& x) {
  double m = params.intercept;
  for (const auto& [idx, count] : x.counts) {
    m += params.weights[idx] * static_cast<double>(count);
  }
  return m;
}

Corpus subset(const Corpus& corpus, const std::vector<std::size_t>& indices) {
  Corpus out;
  out.docs.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (const auto i : indices) {
    out.docs.push_back(corpus.docs[i]);
    out.labels.push_back(corpus.labels[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int n) {
  if (n < 1) throw Error("extract_ngrams: n must be >= 1");
  std::vector<std::string> out;
  if (tokens.size() < static_cast<std::size_t>(n)) return out;
  out.reserve(tokens.size() - static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size();
       ++i) {
    std::string gram = tokens[i];
    for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
      gram += '_';
      gram += tokens[i + j];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

NgramVocab build_vocab(const Corpus& corpus, int n_min, int n_max,
                       double min_df_frac, double max_df_frac) {
  if (!(0.0 < min_df_frac && min_df_frac <= max_df_frac &&
        max_df_frac <= 1.0)) {
    throw Error("build_vocab: need 0 < min_df_frac <= max_df_frac <= 1");
  }
  if (n_min < 1 || n_min > n_max) {
    throw Error("build_vocab: need 1 <= n_min <= n_max");
  }
  std::unordered_map<std::string, int> df;
  for (const auto& doc : corpus.docs) {
    std::set<std::string> seen;
    for (int n = n_min; n <= n_max; ++n) {
      for (auto& gram : extract_ngrams(doc, n)) {
        seen.insert(std::move(gram));
      }
    }
    for (const auto& gram : seen) ++df[gram];
  }

  const double n_docs = static_cast<double>(corpus.docs.size());
  std::vector<std::string> kept;
  for (const auto& [gram, count] : df) {
    const double frac = static_cast<double>(count) / n_docs;
    if (frac >= min_df_frac && frac <= max_df_frac) kept.push_back(gram);
  }
  if (kept.empty()) throw ObjectiveFailure("vocabulary empty");
  std::sort(kept.begin(), kept.end());

  NgramVocab vocab;
  vocab.n_min = n_min;
  vocab.n_max = n_max;
  vocab.min_df_frac = min_df_frac;
  vocab.max_df_frac = max_df_frac;
  vocab.entries.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    vocab.entries.emplace(kept[i], static_cast<int>(i));
  }
  return vocab;
}

BowVector vectorize(const NgramVocab& vocab,
                    const std::vector<std::string>& tokens) {
  std::map<int, int> counts;
  for (int n = vocab.n_min; n <= vocab.n_max; ++n) {
    for (const auto& gram : extract_ngrams(tokens, n)) {
      auto it = vocab.entries.find(gram);
      if (it != vocab.entries.end()) ++counts[it->second];
    }
  }
  BowVector out;
  out.counts.assign(counts.begin(), counts.end());
  return out;
}

BowDataset vectorize_corpus(const NgramVocab& vocab, const Corpus& corpus) {
  BowDataset out;
  out.dim = vocab.size();
  out.x.reserve(corpus.size());
  for (const auto& doc : corpus.docs) out.x.push_back(vectorize(vocab, doc));
  out.y = corpus.labels;
  return out;
}

double lr_objective_value(const LrParams& params, const BowDataset& data,
                          double alpha, double rho) {
  if (data.x.empty()) throw Error("lr_objective_value: empty dataset");
  double loss = 0.0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double margin = sparse_margin(params, data.x[i]);
    loss += softplus(-static_cast<double>(data.y[i]) * margin);
  }
  loss /= static_cast<double>(data.x.size());
  const double l2 = params.weights.squaredNorm();
  const double l1 = params.weights.lpNorm<1>();
  return loss + alpha * ((1.0 - rho) / 2.0 * l2 + rho * l1);
}

std::pair<Eigen::VectorXd, double> lr_gradient(const LrParams& params,
                                               const BowDataset& data,
                                               double alpha, double rho) {
  if (data.x.empty()) throw Error("lr_gradient: empty dataset");
  const double inv_m = 1.0 / static_cast<double>(data.x.size());
  Eigen::VectorXd gw =
      alpha * ((1.0 - rho) * params.weights +
               rho * params.weights.array().sign().matrix());
  double gb = 0.0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const double margin = sparse_margin(params, data.x[i]);
    const double s = logistic_slope(data.y[i], margin) * inv_m;
    for (const auto& [idx, count] : data.x[i].counts) {
      gw[idx] += s * static_cast<double>(count);
    }
    gb += s;
  }
  return {std::move(gw), gb};
}

LrParams train_sgd(const BowDataset& data, double alpha, double rho,
                   int epochs, double eta0, std::uint64_t seed) {
  if (epochs < 1) throw Error("train_sgd: epochs must be >= 1");
  if (data.x.empty()) throw Error("train_sgd: empty dataset");
  LrParams params;
  params.weights = Eigen::VectorXd::Zero(data.dim);
  params.intercept = 0.0;

  Rng rng(seed);
  const double m = static_cast<double>(data.x.size());
  std::vector<std::size_t> order(data.x.size());
  std::iota(order.begin(), order.end(), 0);
  double t = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (const auto i : order) {
      const double eta = eta0 / (1.0 + t / m);
      const double margin = sparse_margin(params, data.x[i]);
      const double s = logistic_slope(data.y[i], margin);
      // Simultaneous subgradient step: both penalty terms read the current
      // weights before the data term lands (the data term is w-independent).
      if (alpha > 0.0) {
        const double decay = 1.0 - eta * alpha * (1.0 - rho);
        const double l1_step = eta * alpha * rho;
        params.weights =
            decay * params.weights -
            l1_step * params.weights.array().sign().matrix();
      }
      for (const auto& [idx, count] : data.x[i].counts) {
        params.weights[idx] -= eta * s * static_cast<double>(count);
      }
      params.intercept -= eta * s;
      t += 1.0;
    }
  }
  return params;
}

double accuracy(const LrParams& params, const BowDataset& data) {
  if (data.x.empty()) throw Error("accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    const int predicted = sparse_margin(params, data.x[i]) > 0.0 ? 1 : -1;
    if (predicted == data.y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.x.size());
}

double cv_objective(const Corpus& corpus, const TextSpaceConfig& config,
                    std::uint64_t seed, int k, double train_frac) {
  if (corpus.size() < 10) throw Error("cv_objective: corpus needs >= 10 docs");
  if (k < 1) throw Error("cv_objective: k must be >= 1");
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error("cv_objective: train_frac must be in (0, 1)");
  }

  const auto n = corpus.size();
  auto n_train = static_cast<std::size_t>(
      std::llround(train_frac * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  double total = 0.0;
  for (int fold = 0; fold < k; ++fold) {
    Rng fold_rng(mix_seed(seed, static_cast<std::uint64_t>(fold)));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    fold_rng.shuffle(perm);
    const std::vector<std::size_t> train_idx(perm.begin(),
                                             perm.begin() + n_train);
    const std::vector<std::size_t> valid_idx(perm.begin() + n_train,
                                             perm.end());

    const Corpus train = subset(corpus, train_idx);
    const Corpus valid = subset(corpus, valid_idx);
    const NgramVocab vocab =
        build_vocab(train, static_cast<int>(config.min_n_gram),
                    config.n_max(), config.min_df(), config.max_df());
    const BowDataset train_ds = vectorize_corpus(vocab, train);
    const BowDataset valid_ds = vectorize_corpus(vocab, valid);
    const LrParams params = train_sgd(
        train_ds, config.alpha(), config.rho, kCvEpochs, kCvEta0,
        mix_seed(seed, 1000 + static_cast<std::uint64_t>(fold)));
    total += accuracy(params, valid_ds);
  }
  return total / static_cast<double>(k);
}

Corpus make_synthetic_corpus(std::uint64_t seed, int n_docs, int vocab_size,
                             int doc_len, double class_skew) {
  if (n_docs < 2) throw Error("make_synthetic_corpus: n_docs must be >= 2");
  if (vocab_size < 4 || vocab_size % 2 != 0) {
    throw Error("make_synthetic_corpus: vocab_size must be even and >= 4");
  }
  if (doc_len < 2) throw Error("make_synthetic_corpus: doc_len must be >= 2");
  if (class_skew < 0.0 || class_skew > 1.0) {
    throw Error("make_synthetic_corpus: class_skew must be in [0, 1]");
  }

  const int half = vocab_size / 2;
  std::vector<std::string> first(half), second(half);
  for (int j = 0; j < half; ++j) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%03d", j);
    first[j] = buf;
    std::snprintf(buf, sizeof(buf), "t%03d", half + j);
    second[j] = buf;
  }

  Rng rng(seed);
  const int pairs_per_doc = std::max(1, doc_len / 2);
  const double p_marked = 0.5 * (1.0 + class_skew);
  Corpus corpus;
  corpus.docs.reserve(static_cast<std::size_t>(n_docs));
  corpus.labels.reserve(static_cast<std::size_t>(n_docs));
  for (int d = 0; d < n_docs; ++d) {
    const int label = d % 2 == 0 ? 1 : -1;
    std::vector<std::string> doc;
    doc.reserve(static_cast<std::size_t>(2 * pairs_per_doc));
    for (int p = 0; p < pairs_per_doc; ++p) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, half - 1));
      // Class +1 prefers first_j before second_j; class -1 prefers the
      // reverse. Each pair emits both tokens regardless, so unigram counts
      // carry no class signal.
      const bool marked_order = rng.uniform() < p_marked;
      const bool first_leads = label == 1 ? marked_order : !marked_order;
      if (first_leads) {
        doc.push_back(first[j]);
        doc.push_back(second[j]);
      } else {
        doc.push_back(second[j]);
        doc.push_back(first[j]);
      }
    }
    corpus.docs.push_back(std::move(doc));
    corpus.labels.push_back(label);
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("corpus line " + std::to_string(line_no) +
                  ": expected <label>\\t<text>");
    }
    const std::string label_str = line.substr(0, tab);
    int label = 0;
    if (label_str == "1" || label_str == "+1") {
      label = 1;
    } else if (label_str == "-1") {
      label = -1;
    } else {
      throw Error("corpus line " + std::to_string(line_no) +
                  ": label must be -1 or 1, got: " + label_str);
    }
    std::istringstream text(line.substr(tab + 1));
    std::vector<std::string> tokens;
    std::string token;
    while (text >> token) {
      for (auto& ch : token) {
        ch = static_cast<char>(
            std::tolower(static_cast<unsigned char>(ch)));
      }
      tokens.push_back(token);
    }
    if (tokens.empty()) {
      throw Error("corpus line " + std::to_string(line_no) + ": empty text");
    }
    corpus.docs.push_back(std::move(tokens));
    corpus.labels.push_back(label);
  }
  if (corpus.docs.empty()) throw Error("corpus file is empty: " + path);
  return corpus;
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out << corpus.labels[i] << '\t';
    for (std::size_t t = 0; t < corpus.docs[i].size(); ++t) {
      if (t > 0) out << ' ';
      out << corpus.docs[i][t];
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

ParamSpace tunable_space() {
  return ParamSpace({
      integer_param("min_n_gram", 1, 2),
      integer_param("ngram_offset", 0, 2),
      continuous_param("log_min_df", -4.0, -1.0),
      continuous_param("df_offset", 0.05, 0.9),
      continuous_param("log_alpha", -6.0, -1.0),
      continuous_param("rho", 0.0, 1.0),
  });
}

Configuration default_configuration() {
  // Untuned baseline: unigrams, permissive df window, common off-the-shelf
  // elastic-net settings.
  Configuration c;
  c.values["min_n_gram"] = std::int64_t{1};
  c.values["ngram_offset"] = std::int64_t{0};
  c.values["log_min_df"] = -4.0;
  c.values["df_offset"] = 0.9;
  c.values["log_alpha"] = -4.0;
  c.values["rho"] = 0.15;
  return c;
}

TextSpaceConfig config_from(const Configuration& config) {
  require_valid(tunable_space(), config, "text configuration");
  TextSpaceConfig out;
  out.min_n_gram = config.integer("min_n_gram");
  out.ngram_offset = config.integer("ngram_offset");
  out.log_min_df = config.real("log_min_df");
  out.df_offset = config.real("df_offset");
  out.log_alpha = config.real("log_alpha");
  out.rho = config.real("rho");
  return out;
}

}  // namespace hypertune::text
