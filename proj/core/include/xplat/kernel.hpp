#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "xplat/estimators.hpp"
#include "xplat/ising.hpp"
#include "xplat/qsim.hpp"

namespace xplat {

// ---------------------------------------------------------------- data set

struct PhaseDataset {
  IsingSpec spec;
  std::vector<double> h;
  std::vector<double> y;                     // phase_label of the exact ground state
  std::vector<QuantumState> ground_states;   // exact diagonalization
  std::vector<VqeResult> vqe;                // empty when built without VQE
  Ansatz ansatz;

  std::size_t size() const { return h.size(); }
  /// Cut-compatible circuits of point i (needs VQE).
  PartCircuits circuits(std::size_t i) const;
};

/// Exact ground states and labels on `grid`; runs a warm-started VQE sweep when `vqe` is set.
PhaseDataset build_phase_dataset(const std::vector<double>& grid, const IsingSpec& base, const VqeOptions* vqe);

/// Rows "h,y,split" with split "train" or "test".
void write_dataset_csv(std::ostream& out, const PhaseDataset& data, std::span<const int> train);

// ---------------------------------------------------------------- kernel matrices

struct KernelEntrySource {
  bool estimated = false;
  EstimationBudget budget;  // meaningful when estimated
};

struct KernelMatrix {
  RMatrix values;
  RMatrix std_errors;                     // zero for exact entries
  std::vector<KernelEntrySource> source;  // row-major, size R*R

  Eigen::Index size() const { return values.rows(); }
  const KernelEntrySource& entry_source(Eigen::Index i, Eigen::Index j) const {
    return source[static_cast<std::size_t>(i * values.cols() + j)];
  }
};

/// K_ij = tr(rho_i rho_j).
KernelMatrix exact_kernel(std::span<const QuantumState> states);

struct FederatedKernelOptions {
  std::uint64_t shots = 1000;       // snapshots per circuit setting
  std::uint64_t master_seed = 0;
  bool distributed = true;          // false = in-process records (same results)
  int timeout_ms = 60000;
};

struct FederatedKernelResult {
  KernelMatrix kernel;
  std::size_t sessions = 0;
  std::size_t transcript_lines = 0;
  std::size_t transcript_violations = 0;
};

/// Estimates every entry i <= j with the exhaustive-ensemble cut estimator,
/// state i on platform 1 and state j on platform 2, each pair under its own
/// seed derived from the master seed. Entries are clipped to [0, 1] and the
/// matrix is filled symmetrically. `transcript`, when given, receives every
/// protocol line.
FederatedKernelResult federated_kernel(const CutPlan& plan, std::span<const PartCircuits> circuits,
                                       const FederatedKernelOptions& options,
                                       std::vector<std::string>* transcript = nullptr);

/// Seed of the (i, j) session.
std::uint64_t kernel_pair_seed(std::uint64_t master_seed, std::size_t i, std::size_t j);

/// Symmetrizes and clips negative eigenvalues to zero.
RMatrix project_psd(const RMatrix& k);

// ---------------------------------------------------------------- regression

struct SvrParams {
  double C = 10.0;
  double epsilon = 0.01;    // tube width
  double tolerance = 1e-8;  // KKT violation stop
  int max_iterations = 1000000;
};

struct SvrModel {
  std::vector<double> coef;  // alpha_i - alpha_i^*
  double rho = 0.0;
  int iterations = 0;

  /// f(x) = sum_i coef_i k_i - rho for each column of `k_cross` (train x test).
  std::vector<double> predict(const RMatrix& k_cross) const;
};

/// epsilon-SVR on a precomputed kernel, solved by SMO with second-order
/// working-set selection. The kernel is projected to PSD first. Throws
/// EstimationError if every row of the kernel is identical.
SvrModel svr_train(const RMatrix& k_train, std::span<const double> y, const SvrParams& params = {});

std::vector<double> svr_train_predict(const RMatrix& k_train, std::span<const double> y, const RMatrix& k_cross,
                                      const SvrParams& params = {});

/// Kernel ridge regression on centered labels, (K + lambda I) a = y - mean(y).
std::vector<double> kernel_ridge_predict(const RMatrix& k_train, std::span<const double> y, const RMatrix& k_cross,
                                         double lambda = 1e-3);

struct LooSelection {
  SvrParams params;
  double loo_mse = 0.0;  // mean leave-one-out squared error of the chosen pair
};

/// Grid search over (C, epsilon) by leave-one-out error on `kernel`.
LooSelection select_svr_params_loo(const RMatrix& kernel, std::span<const double> y, std::span<const double> c_grid,
                                   std::span<const double> epsilon_grid);

// ---------------------------------------------------------------- metrics

/// <HKH, HLH>_F / (||HKH||_F ||HLH||_F) with H = I - 11^T / R.
double centered_kernel_alignment(const RMatrix& k, const RMatrix& l);

struct MseReport {
  double sum = 0.0;
  double mean = 0.0;
};
MseReport mean_squared_error(std::span<const double> predicted, std::span<const double> reference);

struct KernelMetrics {
  double cka = 0.0;
  MseReport mse;
};
KernelMetrics kernel_metrics(const RMatrix& k, const RMatrix& l_ref, std::span<const double> y,
                             std::span<const double> y_ref);

// ---------------------------------------------------------------- training splits

/// `train_size` distinct indices out of `total`, sorted, from stream (kTrainingSplit, split).
std::vector<int> training_split(int total, int train_size, std::uint64_t seed, std::uint32_t split);

struct SplitEvaluation {
  std::vector<int> train;
  std::vector<double> predictions;  // on every point
  MseReport mse;                    // over every point
  MseReport heldout_mse;            // over the points not trained on
};

struct LearningReport {
  std::vector<SplitEvaluation> splits;
  double mean_mse = 0.0;          // mean over splits of mse.mean
  double mean_mse_sum = 0.0;      // mean over splits of mse.sum
  double mean_heldout_mse = 0.0;
};

/// Trains SVR on `splits` random training sets and tests on every point.
LearningReport evaluate_learning(const RMatrix& kernel, std::span<const double> y, int train_size, int splits,
                                 std::uint64_t seed, const SvrParams& params = {});

}  // namespace xplat
