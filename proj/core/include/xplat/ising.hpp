#pragma once

#include <string>
#include <vector>

#include "xplat/qsim.hpp"
#include "xplat/rng.hpp"
#include "xplat/wirecut.hpp"

namespace xplat {

struct IsingSpec {
  int n = 5;
  double J = 0.5;
  double h = 0.0;
};

/// The 21 field values of the phase-learning data set.
const std::vector<double>& phase_h_grid();

/// H = -J sum Z_j Z_{j+1} - h sum X_j on an open chain (real symmetric).
RMatrix ising_hamiltonian(const IsingSpec& spec);

struct GroundState {
  QuantumState state;
  double energy = 0.0;
};

/// Lowest eigenvector. A degenerate ground space is resolved to the state
/// that is even under the global flip X...X. The sign is fixed so the
/// largest-magnitude amplitude is positive.
GroundState exact_ground_state(const RMatrix& hamiltonian, int n);

/// <(sum_j Z_j / n)^2>.
double phase_label(const QuantumState& state);

/// Expected eigenvalue of X...X for the ground state at field h (n odd flips the sign for h < 0).
int ground_parity(const IsingSpec& spec);

// ---------------------------------------------------------------- ansatz and VQE

/// Cut-compatible ansatz on chain_plan({a, b}): each part runs `layers` blocks of
/// Rx, Rz on every wire followed by a CZ chain, then a final Rx, Rz layer.
struct Ansatz {
  std::vector<int> part_sizes{3, 3};
  int layers = 3;

  CutPlan plan() const;
  int num_parameters() const;
  PartCircuits circuits(const std::vector<double>& params) const;
  QuantumState state(const std::vector<double>& params) const;
};

struct VqeOptions {
  Ansatz ansatz;
  int restarts = 2;
  int max_iterations = 400;
  double tolerance = 1e-6;      // gradient-norm stop
  double parity_weight = 1.0;   // weight of (1 - s <X...X>) / 2
  std::uint64_t seed = 0;
};

struct VqeResult {
  std::vector<double> params;
  double energy = 0.0;        // <H> without the parity term
  double exact_energy = 0.0;
  double fidelity = 0.0;      // |<exact|ansatz>|^2
  int iterations = 0;
  bool converged = false;
  std::string status;
};

/// Minimizes <H> + parity penalty with GSL's BFGS and parameter-shift gradients.
/// Starts from `warm_start` (if non-empty) plus `restarts` random points and
/// keeps the best.
VqeResult vqe_optimize(const IsingSpec& spec, const VqeOptions& options, const std::vector<double>& warm_start = {});

/// VQE over the whole grid in order, warm-starting each point from the previous one.
std::vector<VqeResult> vqe_sweep(const std::vector<double>& h_grid, const IsingSpec& base, const VqeOptions& options);

}  // namespace xplat
