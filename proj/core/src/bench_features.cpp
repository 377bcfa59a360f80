#include "hypertune/bench_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hypertune/error.hpp"
#include "hypertune/evalstat.hpp"
#include "hypertune/rng.hpp"

namespace hypertune::features {

namespace {

constexpr int kKmeansIters = 50;

double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

void check_unsup(const UnsupConfig& cfg, int n) {
  if (!(1 <= cfg.s && cfg.s <= cfg.w && cfg.w <= n)) {
    throw Error("unsup config requires 1 <= s <= w <= n");
  }
  if (cfg.k < 2) throw Error("unsup config requires K >= 2");
  if (cfg.sparse_p < 50.0 || cfg.sparse_p > 100.0) {
    throw Error("unsup config requires sparse_p in [50, 100]");
  }
}

}  // namespace

int patch_grid_dim(int n, int w, int s) {
  if (w > n) throw Error("extract_patches: w > n");
  if (s < 1) throw Error("extract_patches: stride must be >= 1");
  return (n - w) / s + 1;
}

Eigen::MatrixXd extract_patches(const Eigen::MatrixXd& image, int w, int s) {
  if (image.rows() != image.cols()) {
    throw Error("extract_patches: image must be square");
  }
  const int n = static_cast<int>(image.rows());
  const int g = patch_grid_dim(n, w, s);
  Eigen::MatrixXd patches(g * g, w * w);
  for (int pr = 0; pr < g; ++pr) {
    for (int pc = 0; pc < g; ++pc) {
      const auto block = image.block(pr * s, pc * s, w, w);
      Eigen::Index col = 0;
      for (int r = 0; r < w; ++r) {
        for (int c = 0; c < w; ++c) {
          patches(pr * g + pc, col++) = block(r, c);
        }
      }
    }
  }
  return patches;
}

ZcaTransform fit_zca(const Eigen::MatrixXd& patches, double eps) {
  if (patches.rows() < 2) throw Error("fit_zca: need at least 2 patches");
  if (eps < 0.0) throw Error("fit_zca: eps must be >= 0");
  ZcaTransform zca;
  zca.eps = eps;
  zca.mu = patches.colwise().mean();
  const Eigen::MatrixXd centered = patches.rowwise() - zca.mu.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered /
      static_cast<double>(patches.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error("fit_zca: eigendecomposition failed");
  }
  // Eigen returns ascending order; store descending, clamping tiny negative
  // eigenvalues from roundoff to zero.
  const Eigen::Index d = cov.rows();
  zca.u.resize(d, d);
  zca.lambda_diag.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    zca.u.col(i) = solver.eigenvectors().col(d - 1 - i);
    zca.lambda_diag[i] = std::max(solver.eigenvalues()[d - 1 - i], 0.0);
  }
  return zca;
}

Eigen::MatrixXd apply_zca(const ZcaTransform& zca,
                          const Eigen::MatrixXd& patches) {
  if (patches.cols() != zca.mu.size()) {
    throw Error("apply_zca: patch dimension mismatch");
  }
  const Eigen::Index d = zca.mu.size();
  Eigen::VectorXd scale(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = zca.lambda_diag[i] + zca.eps;
    // Exact whitening (eps = 0) of a singular covariance projects the null
    // directions out instead of dividing by zero.
    scale[i] = v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
  }
  const Eigen::MatrixXd centered = patches.rowwise() - zca.mu.transpose();
  return centered * zca.u * scale.asDiagonal() * zca.u.transpose();
}

Codebook kmeans_fit(const Eigen::MatrixXd& points, int k, int iters,
                    std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw Error("kmeans_fit: k must be >= 1");
  if (n < k) throw Error("kmeans_fit: fewer points than centroids");
  Rng rng(seed);

  // k-means++ seeding.
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<double> dist2(static_cast<std::size_t>(n),
                            std::numeric_limits<double>::infinity());
  const auto first = rng.uniform_int(0, static_cast<std::int64_t>(n) - 1);
  centroids.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 =
          (points.row(i) - centroids.row(c - 1)).squaredNorm();
      auto& best = dist2[static_cast<std::size_t>(i)];
      best = std::min(best, d2);
      total += best;
    }
    Eigen::Index chosen = -1;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2[static_cast<std::size_t>(i)];
        if (acc > r) {
          chosen = i;
          break;
        }
      }
    }
    if (chosen < 0) {
      chosen = rng.uniform_int(0, static_cast<std::int64_t>(n) - 1);
    }
    centroids.row(c) = points.row(chosen);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 =
          (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d2 = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(
          assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed an emptied cluster to the point farthest from its current
        // centroid so it captures mass next iteration.
        Eigen::Index farthest = 0;
        double far_d2 = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d2 =
              (points.row(i) -
               centroids.row(assign[static_cast<std::size_t>(i)]))
                  .squaredNorm();
          if (d2 > far_d2) {
            far_d2 = d2;
            farthest = i;
          }
        }
        centroids.row(c) = points.row(farthest);
      }
    }
  }
  return Codebook{std::move(centroids)};
}

Eigen::VectorXd encode_sparse(const Eigen::VectorXd& patch,
                              const Codebook& codebook, double sparse_p) {
  if (sparse_p < 50.0 || sparse_p > 100.0) {
    throw Error("encode_sparse: sparse_p must be in [50, 100]");
  }
  const Eigen::Index k = codebook.centroids.rows();
  Eigen::VectorXd distances(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    distances[c] = (codebook.centroids.row(c).transpose() - patch).norm();
  }
  std::vector<double> sorted(distances.data(), distances.data() + k);
  const double threshold = stats::quantile(std::move(sorted), sparse_p / 100.0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (distances[c] <= threshold) out[c] = distances[c];
  }
  return out;
}

Eigen::VectorXd featurize_image(const Eigen::MatrixXd& image,
                                const UnsupConfig& config,
                                const ZcaTransform& zca,
                                const Codebook& codebook) {
  const int g = patch_grid_dim(static_cast<int>(image.rows()),
                               static_cast<int>(config.w),
                               static_cast<int>(config.s));
  const Eigen::MatrixXd whitened = apply_zca(
      zca, extract_patches(image, static_cast<int>(config.w),
                           static_cast<int>(config.s)));
  const Eigen::Index k = codebook.centroids.rows();
  const int half = (g + 1) / 2;  // ceil split for odd grids
  Eigen::VectorXd features =
      Eigen::VectorXd::Zero(k * UnsupConfig::pool_r * UnsupConfig::pool_r);
  for (int pr = 0; pr < g; ++pr) {
    for (int pc = 0; pc < g; ++pc) {
      const Eigen::VectorXd code =
          encode_sparse(whitened.row(pr * g + pc).transpose(), codebook,
                        config.sparse_p);
      const int quadrant = (pr < half ? 0 : 1) * UnsupConfig::pool_r +
                           (pc < half ? 0 : 1);
      features.segment(quadrant * k, k) += code;
    }
  }
  return features;
}

double RegressionTree::predict(const Eigen::VectorXd& x) const {
  if (nodes.empty()) throw Error("RegressionTree: empty tree");
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].leaf) {
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double subset_sse(const Eigen::VectorXd& y, const std::vector<int>& idx) {
  double sum = 0.0;
  for (const int i : idx) sum += y[i];
  const double mean = sum / static_cast<double>(idx.size());
  double sse = 0.0;
  for (const int i : idx) sse += (y[i] - mean) * (y[i] - mean);
  return sse;
}

SplitChoice best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const std::vector<int>& idx, int min_leaf) {
  SplitChoice best;
  const auto n = idx.size();
  if (n < 2 * static_cast<std::size_t>(min_leaf)) return best;
  const double parent_sse = subset_sse(y, idx);

  std::vector<int> order(idx);
  for (int feature = 0; feature < x.cols(); ++feature) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return x(a, feature) < x(b, feature);
    });
    // Prefix sums let every split position evaluate in O(1):
    // SSE = sum(y^2) - (sum y)^2 / n on each side.
    double left_sum = 0.0, left_sq = 0.0;
    double total_sum = 0.0, total_sq = 0.0;
    for (const int i : order) {
      total_sum += y[i];
      total_sq += y[i] * y[i];
    }
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
      const int i = order[pos];
      left_sum += y[i];
      left_sq += y[i] * y[i];
      const double lo = x(i, feature);
      const double hi = x(order[pos + 1], feature);
      if (lo == hi) continue;  // not a boundary between distinct values
      const auto left_n = pos + 1;
      const auto right_n = n - left_n;
      if (left_n < static_cast<std::size_t>(min_leaf) ||
          right_n < static_cast<std::size_t>(min_leaf)) {
        continue;
      }
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double left_sse =
          left_sq - left_sum * left_sum / static_cast<double>(left_n);
      const double right_sse =
          right_sq - right_sum * right_sum / static_cast<double>(right_n);
      const double gain = parent_sse - left_sse - right_sse;
      if (gain > best.gain + 1e-12) {
        best.found = true;
        best.gain = gain;
        best.feature = feature;
        best.threshold = 0.5 * (lo + hi);
      }
    }
  }
  return best;
}

int build_node(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               const std::vector<int>& idx, int depth, int max_depth,
               int min_leaf, std::vector<TreeNode>& nodes) {
  const int node_id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  double sum = 0.0;
  for (const int i : idx) sum += y[i];
  nodes[static_cast<std::size_t>(node_id)].value =
      sum / static_cast<double>(idx.size());

  if (depth >= max_depth) return node_id;
  const SplitChoice split = best_split(x, y, idx, min_leaf);
  if (!split.found) return node_id;

  std::vector<int> left_idx, right_idx;
  left_idx.reserve(idx.size());
  right_idx.reserve(idx.size());
  for (const int i : idx) {
    (x(i, split.feature) <= split.threshold ? left_idx : right_idx)
        .push_back(i);
  }
  const int left = build_node(x, y, left_idx, depth + 1, max_depth, min_leaf,
                              nodes);
  const int right = build_node(x, y, right_idx, depth + 1, max_depth,
                               min_leaf, nodes);
  auto& node = nodes[static_cast<std::size_t>(node_id)];
  node.leaf = false;
  node.feature = split.feature;
  node.threshold = split.threshold;
  node.left = left;
  node.right = right;
  return node_id;
}

}  // namespace

RegressionTree fit_regression_tree(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y, int max_depth,
                                   int min_leaf) {
  if (x.rows() != y.size() || x.rows() < 1) {
    throw Error("fit_regression_tree: shape mismatch or empty data");
  }
  if (max_depth < 0) throw Error("fit_regression_tree: max_depth < 0");
  if (min_leaf < 1) throw Error("fit_regression_tree: min_leaf < 1");
  RegressionTree tree;
  std::vector<int> idx(static_cast<std::size_t>(x.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  build_node(x, y, idx, 0, max_depth, min_leaf, tree.nodes);
  return tree;
}

double boost_loss(const std::vector<double>& margins,
                  const std::vector<int>& labels) {
  if (margins.size() != labels.size() || margins.empty()) {
    throw Error("boost_loss: shape mismatch or empty data");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    loss += softplus(-static_cast<double>(labels[i]) * margins[i]);
  }
  return loss;
}

BoostedEnsemble boost_fit(const Eigen::MatrixXd& x,
                          const std::vector<int>& labels,
                          const SupConfig& config) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (labels.size() != n || n < 2) {
    throw Error("boost_fit: need >= 2 labeled samples");
  }
  std::size_t n_pos = 0;
  for (const int y : labels) {
    if (y == 1) {
      ++n_pos;
    } else if (y != -1) {
      throw Error("boost_fit: labels must be -1 or +1");
    }
  }
  if (n_pos == 0 || n_pos == n) {
    throw Error("boost_fit: single-class input");
  }
  if (config.m < 0) throw Error("boost_fit: M must be >= 0");

  BoostedEnsemble ensemble;
  ensemble.f0 = 0.5 * std::log(static_cast<double>(n_pos) /
                               static_cast<double>(n - n_pos));
  ensemble.shrinkage = config.gamma;

  std::vector<double> margins(n, ensemble.f0);
  Eigen::VectorXd residuals(static_cast<Eigen::Index>(n));
  for (std::int64_t m = 0; m < config.m; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double y = static_cast<double>(labels[i]);
      residuals[static_cast<Eigen::Index>(i)] =
          y / (1.0 + std::exp(y * margins[i]));
    }
    RegressionTree tree =
        fit_regression_tree(x, residuals, static_cast<int>(config.max_depth),
                            static_cast<int>(config.min_leaf));
    std::vector<double> direction(n);
    for (std::size_t i = 0; i < n; ++i) {
      direction[i] = tree.predict(x.row(static_cast<Eigen::Index>(i))
                                      .transpose());
    }

    auto line_loss = [&](double rho) {
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        loss += softplus(-static_cast<double>(labels[i]) *
                         (margins[i] + rho * direction[i]));
      }
      return loss;
    };
    // Golden-section minimization of the unshrunk step length on [0, 10].
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 10.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = line_loss(c);
    double fd = line_loss(d);
    for (int step = 0; step < 20; ++step) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = line_loss(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = line_loss(d);
      }
    }
    double rho = 0.5 * (a + b);
    if (line_loss(rho) > line_loss(0.0)) rho = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += config.gamma * rho * direction[i];
    }
    ensemble.stages.emplace_back(rho, std::move(tree));
  }
  return ensemble;
}

double ensemble_predict(const BoostedEnsemble& ensemble,
                        const Eigen::VectorXd& x) {
  double margin = ensemble.f0;
  for (const auto& [rho, tree] : ensemble.stages) {
    margin += ensemble.shrinkage * rho * tree.predict(x);
  }
  return margin;
}

double pipeline_objective(const ImageSet& images, const UnsupConfig& unsup,
                          const SupConfig& sup, std::uint64_t seed) {
  if (images.size() < 8) {
    throw Error("pipeline_objective: need at least 8 images");
  }
  check_unsup(unsup, images.n);

  Rng rng(seed);
  std::vector<std::size_t> perm(images.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  const std::size_t n_unlabeled = images.size() / 2;

  // Unlabeled pool: ZCA + codebook only, labels never touched.
  std::vector<Eigen::MatrixXd> pool_patches;
  pool_patches.reserve(n_unlabeled);
  Eigen::Index total_rows = 0;
  for (std::size_t i = 0; i < n_unlabeled; ++i) {
    pool_patches.push_back(extract_patches(images.images[perm[i]],
                                           static_cast<int>(unsup.w),
                                           static_cast<int>(unsup.s)));
    total_rows += pool_patches.back().rows();
  }
  Eigen::MatrixXd pool(total_rows, unsup.w * unsup.w);
  Eigen::Index row = 0;
  for (const auto& p : pool_patches) {
    pool.middleRows(row, p.rows()) = p;
    row += p.rows();
  }
  const ZcaTransform zca = fit_zca(pool, unsup.eps_zca());
  const Codebook codebook =
      kmeans_fit(apply_zca(zca, pool), static_cast<int>(unsup.k),
                 kKmeansIters, mix_seed(seed, 1));

  const std::size_t n_labeled = images.size() - n_unlabeled;
  Eigen::MatrixXd features(n_labeled,
                           unsup.k * UnsupConfig::pool_r * UnsupConfig::pool_r);
  std::vector<int> labels(n_labeled);
  for (std::size_t i = 0; i < n_labeled; ++i) {
    const std::size_t img = perm[n_unlabeled + i];
    features.row(static_cast<Eigen::Index>(i)) =
        featurize_image(images.images[img], unsup, zca, codebook).transpose();
    labels[i] = images.labels[img];
  }

  std::vector<std::size_t> order(n_labeled);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  auto n_train = static_cast<std::size_t>(
      std::llround(0.8 * static_cast<double>(n_labeled)));
  n_train = std::clamp<std::size_t>(n_train, 1, n_labeled - 1);

  Eigen::MatrixXd train_x(n_train, features.cols());
  std::vector<int> train_y(n_train);
  for (std::size_t i = 0; i < n_train; ++i) {
    train_x.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(order[i]));
    train_y[i] = labels[order[i]];
  }
  const BoostedEnsemble ensemble = boost_fit(train_x, train_y, sup);

  std::size_t correct = 0;
  const std::size_t n_valid = n_labeled - n_train;
  for (std::size_t i = 0; i < n_valid; ++i) {
    const std::size_t idx = order[n_train + i];
    const double margin = ensemble_predict(
        ensemble, features.row(static_cast<Eigen::Index>(idx)).transpose());
    const int predicted = margin > 0.0 ? 1 : -1;
    if (predicted == labels[idx]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_valid);
}

ImageSet make_synthetic_images(std::uint64_t seed, int count, int n,
                               double contrast) {
  if (count < 2) throw Error("make_synthetic_images: count must be >= 2");
  if (n < 4) throw Error("make_synthetic_images: n must be >= 4");
  if (contrast < 0.0 || contrast > 1.0) {
    throw Error("make_synthetic_images: contrast must be in [0, 1]");
  }
  Rng rng(seed);
  ImageSet set;
  set.n = n;
  set.images.reserve(static_cast<std::size_t>(count));
  set.labels.reserve(static_cast<std::size_t>(count));
  constexpr double kNoiseSd = 0.1;
  constexpr double kAmplitude = 0.35;
  for (int img = 0; img < count; ++img) {
    const int label = img % 2 == 0 ? 1 : -1;
    Eigen::MatrixXd image(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        // Class +1 tiles a diagonal 2x2 motif, class -1 the anti-diagonal.
        const bool on_diagonal = (r % 2) == (c % 2);
        const double motif = (label == 1) == on_diagonal ? 1.0 : -1.0;
        const double value =
            0.5 + contrast * kAmplitude * motif + kNoiseSd * rng.normal();
        image(r, c) = std::clamp(value, 0.0, 1.0);
      }
    }
    set.images.push_back(std::move(image));
    set.labels.push_back(label);
  }
  return set;
}

ImageSet load_images(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open image file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("image file is empty: " + path);
  // header "label,p0,...": infer n from the column count
  std::size_t cols = 1;
  for (const char ch : line) {
    if (ch == ',') ++cols;
  }
  const auto pixels = static_cast<int>(cols) - 1;
  const int n = static_cast<int>(std::lround(std::sqrt(pixels)));
  if (pixels < 1 || n * n != pixels) {
    throw Error("image file header implies non-square images: " + path);
  }

  ImageSet set;
  set.n = n;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) {
      throw Error("image line " + std::to_string(line_no) + ": no label");
    }
    const int label = std::stoi(cell);
    if (label != 1 && label != -1) {
      throw Error("image line " + std::to_string(line_no) +
                  ": label must be -1 or 1");
    }
    Eigen::MatrixXd image(n, n);
    for (int p = 0; p < pixels; ++p) {
      if (!std::getline(row, cell, ',')) {
        throw Error("image line " + std::to_string(line_no) +
                    ": expected " + std::to_string(pixels) + " pixels");
      }
      image(p / n, p % n) = std::clamp(std::stod(cell), 0.0, 1.0);
    }
    set.images.push_back(std::move(image));
    set.labels.push_back(label);
  }
  if (set.images.empty()) throw Error("image file has no rows: " + path);
  return set;
}

void save_images(const std::string& path, const ImageSet& images) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write image file: " + path);
  out << "label";
  for (int p = 0; p < images.n * images.n; ++p) out << ",p" << p;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < images.size(); ++i) {
    out << images.labels[i];
    const auto& img = images.images[i];
    for (int r = 0; r < images.n; ++r) {
      for (int c = 0; c < images.n; ++c) {
        out << ',' << img(r, c);
      }
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

ParamSpace tunable_space() {
  return ParamSpace({
      integer_param("w", 3, 6),
      integer_param("s", 1, 3),
      integer_param("K", 4, 32),
      continuous_param("log_eps_zca", -6.0, 0.0),
      continuous_param("sparse_p", 50.0, 100.0),
      integer_param("M", 10, 200),
      continuous_param("gamma", 0.01, 0.5),
      integer_param("max_depth", 1, 6),
      integer_param("min_leaf", 1, 20),
  });
}

Configuration default_configuration() {
  Configuration c;
  c.values["w"] = std::int64_t{4};
  c.values["s"] = std::int64_t{2};
  c.values["K"] = std::int64_t{16};
  c.values["log_eps_zca"] = -2.0;
  c.values["sparse_p"] = 90.0;
  c.values["M"] = std::int64_t{50};
  c.values["gamma"] = 0.1;
  c.values["max_depth"] = std::int64_t{3};
  c.values["min_leaf"] = std::int64_t{5};
  return c;
}

std::pair<UnsupConfig, SupConfig> configs_from(const Configuration& config) {
  require_valid(tunable_space(), config, "features configuration");
  UnsupConfig unsup;
  unsup.w = config.integer("w");
  unsup.s = config.integer("s");
  unsup.k = config.integer("K");
  unsup.log_eps_zca = config.real("log_eps_zca");
  unsup.sparse_p = config.real("sparse_p");
  SupConfig sup;
  sup.m = config.integer("M");
  sup.gamma = config.real("gamma");
  sup.max_depth = config.integer("max_depth");
  sup.min_leaf = config.integer("min_leaf");
  return {unsup, sup};
}

}  // namespace hypertune::features
