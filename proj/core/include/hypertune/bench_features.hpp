#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hypertune/space.hpp"

namespace hypertune::features {

/// Square grayscale images with pixel values in [0, 1], labels in {-1, +1}.
struct ImageSet {
  std::vector<Eigen::MatrixXd> images;
  std::vector<int> labels;
  int n = 0;  // side length shared by all images

  std::size_t size() const { return images.size(); }
};

/// Unsupervised half of the tunable configuration. pool_r is fixed at 2.
struct UnsupConfig {
  std::int64_t w = 4;  // patch width
  std::int64_t s = 2;  // stride
  std::int64_t k = 16; // codebook size
  double log_eps_zca = -2.0;  // base-10 exponent
  double sparse_p = 90.0;     // percentile in [50, 100]
  static constexpr int pool_r = 2;

  double eps_zca() const { return std::pow(10.0, log_eps_zca); }
};

/// Supervised half: gradient-boosting parameters.
struct SupConfig {
  std::int64_t m = 50;        // boosting iterations
  double gamma = 0.1;         // shrinkage
  std::int64_t max_depth = 3;
  std::int64_t min_leaf = 5;
};

/// ZCA whitening transform learned from a patch matrix. Eigenvalues are
/// stored descending, clamped at 0.
struct ZcaTransform {
  Eigen::VectorXd mu;
  Eigen::MatrixXd u;
  Eigen::VectorXd lambda_diag;
  double eps = 0.0;
};

struct Codebook {
  Eigen::MatrixXd centroids;  // K x w^2, in whitened space
};

struct TreeNode {
  bool leaf = true;
  double value = 0.0;   // leaf mean
  int feature = -1;
  double threshold = 0.0;
  int left = -1;   // indices into RegressionTree::nodes
  int right = -1;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::VectorXd& x) const;
};

/// Additive ensemble F(x) = f0 + shrinkage * sum_m rho_m * tree_m(x).
struct BoostedEnsemble {
  double f0 = 0.0;
  double shrinkage = 1.0;
  std::vector<std::pair<double, RegressionTree>> stages;  // (rho_m, tree)
};

int patch_grid_dim(int n, int w, int s);

/// All w-by-w patches at stride s, row-major grid order; each row of the
/// result is one patch flattened row-major. g = floor((n-w)/s) + 1 per axis.
Eigen::MatrixXd extract_patches(const Eigen::MatrixXd& image, int w, int s);

/// Whitening fit: covariance with 1/(N-1) normalization, symmetric
/// eigendecomposition. eps = 0 selects exact whitening.
ZcaTransform fit_zca(const Eigen::MatrixXd& patches, double eps);

/// (X - 1 mu^T) U (Lambda + eps I)^{-1/2} U^T. Zero eigendirections with
/// eps = 0 are projected out rather than divided by zero.
Eigen::MatrixXd apply_zca(const ZcaTransform& zca,
                          const Eigen::MatrixXd& patches);

/// k-means++ seeding followed by Lloyd iterations until the assignment
/// fixpoint or `iters`. An emptied cluster is re-seeded to the point
/// farthest from its assigned centroid. Deterministic per seed.
Codebook kmeans_fit(const Eigen::MatrixXd& points, int k, int iters,
                    std::uint64_t seed);

/// Distances to all centroids with everything above the sparse_p-th
/// percentile (linear interpolation, kept inclusive) zeroed.
Eigen::VectorXd encode_sparse(const Eigen::VectorXd& patch,
                              const Codebook& codebook, double sparse_p);

/// Encodes every patch of the image and sums encodings over the four
/// spatial quadrants of the patch grid (ceil split when g is odd), giving
/// J = K * pool_r^2 features in row-major quadrant order.
Eigen::VectorXd featurize_image(const Eigen::MatrixXd& image,
                                const UnsupConfig& config,
                                const ZcaTransform& zca,
                                const Codebook& codebook);

/// Greedy variance-reduction regression tree. Thresholds scan midpoints of
/// sorted unique feature values; ties prefer the lowest feature index, then
/// the lowest threshold; children keep at least min_leaf samples.
RegressionTree fit_regression_tree(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& y, int max_depth,
                                   int min_leaf);

/// Gradient boosting with logistic loss L(y, F) = log(1 + exp(-y F)).
/// f0 is the closed-form prior log-odds; each stage fits a tree to the
/// pseudo-residuals d_i = y_i / (1 + exp(y_i F_i)) and line-searches
/// rho_m on [0, 10] by 20 golden-section steps, falling back to rho_m = 0
/// if no step improves the loss.
BoostedEnsemble boost_fit(const Eigen::MatrixXd& x,
                          const std::vector<int>& labels,
                          const SupConfig& config);

double ensemble_predict(const BoostedEnsemble& ensemble,
                        const Eigen::VectorXd& x);

/// Training loss of the ensemble state F over the dataset; exposed for the
/// monotonicity checks.
double boost_loss(const std::vector<double>& margins,
                  const std::vector<int>& labels);

/// End-to-end coupled objective: fit ZCA and codebook on an unlabeled pool
/// (half the images, labels unused), featurize the rest, train boosting on
/// a seeded 80/20 split, return validation accuracy.
double pipeline_objective(const ImageSet& images, const UnsupConfig& unsup,
                          const SupConfig& sup, std::uint64_t seed);

/// Two texture classes built from opposing 2x2 motifs plus Gaussian noise;
/// `contrast` in [0, 1] scales the motif amplitude (0 = classes identical
/// in distribution). Balanced labels, deterministic per seed.
ImageSet make_synthetic_images(std::uint64_t seed, int count, int n,
                               double contrast);

/// CSV image IO: header "label,p0,...,p{n^2-1}", one image per row,
/// pixels row-major.
ImageSet load_images(const std::string& path);
void save_images(const std::string& path, const ImageSet& images);

ParamSpace tunable_space();
Configuration default_configuration();
std::pair<UnsupConfig, SupConfig> configs_from(const Configuration& config);

}  // namespace hypertune::features
