#include "xplat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "xplat/harness.hpp"
#include "xplat/platform.hpp"
#include "xplat/protocol.hpp"

namespace xplat {

// ---------------------------------------------------------------- data set

PartCircuits PhaseDataset::circuits(std::size_t i) const {
  if (i >= vqe.size()) throw InvalidArgument("data set has no VQE circuits for this point");
  return ansatz.circuits(vqe[i].params);
}

PhaseDataset build_phase_dataset(const std::vector<double>& grid, const IsingSpec& base, const VqeOptions* vqe) {
  if (grid.empty()) throw InvalidArgument("empty field grid");
  PhaseDataset data;
  data.spec = base;
  data.h = grid;
  for (double h : grid) {
    IsingSpec spec = base;
    spec.h = h;
    GroundState g = exact_ground_state(ising_hamiltonian(spec), spec.n);
    data.y.push_back(phase_label(g.state));
    data.ground_states.push_back(std::move(g.state));
  }
  if (vqe != nullptr) {
    data.ansatz = vqe->ansatz;
    data.vqe = vqe_sweep(grid, base, *vqe);
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const PhaseDataset& data, std::span<const int> train) {
  out << "h,y,split\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool is_train = std::find(train.begin(), train.end(), static_cast<int>(i)) != train.end();
    out << data.h[i] << ',' << data.y[i] << ',' << (is_train ? "train" : "test") << '\n';
  }
  out.precision(old);
}

// ---------------------------------------------------------------- kernel matrices

KernelMatrix exact_kernel(std::span<const QuantumState> states) {
  const auto r = static_cast<Eigen::Index>(states.size());
  KernelMatrix k;
  k.values = RMatrix::Zero(r, r);
  k.std_errors = RMatrix::Zero(r, r);
  k.source.assign(static_cast<std::size_t>(r * r), KernelEntrySource{});
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i; j < r; ++j)
      k.values(i, j) = k.values(j, i) =
          overlap_trace(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]);
  return k;
}

std::uint64_t kernel_pair_seed(std::uint64_t master_seed, std::size_t i, std::size_t j) {
  return derive_seed(master_seed, StreamKey{0, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0,
                                            StreamPurpose::kRepetition, 0});
}

FederatedKernelResult federated_kernel(const CutPlan& plan, std::span<const PartCircuits> circuits,
                                       const FederatedKernelOptions& options, std::vector<std::string>* transcript) {
  if (options.shots == 0) throw InvalidArgument("federated kernel needs at least one shot per setting");
  const CutConfigTable table = cut_config_table();
  const std::vector<GlobalConfig> configs = enumerate_global_configs(plan, table);
  const SchemeSpec spec{plan.output_sizes(), 1, options.master_seed, "exhaustive"};
  const MeasurementScheme scheme = spec.build();
  const std::vector<Job> jobs = plan_jobs(required_settings(plan, configs), scheme, options.shots);

  const auto r = static_cast<Eigen::Index>(circuits.size());
  FederatedKernelResult out;
  KernelMatrix& k = out.kernel;
  k.values = RMatrix::Zero(r, r);
  k.std_errors = RMatrix::Zero(r, r);
  k.source.assign(static_cast<std::size_t>(r * r), KernelEntrySource{});

  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i; j < r; ++j) {
      const std::uint64_t seed = kernel_pair_seed(options.master_seed, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const PlatformProgram p1{plan, circuits[static_cast<std::size_t>(i)], {}, {}};
      const PlatformProgram p2{plan, circuits[static_cast<std::size_t>(j)], {}, {}};
      RecordSet r1, r2;
      if (options.distributed) {
        SessionOptions session;
        session.master_seed = seed;
        session.scheme = spec;
        session.timeout_ms = options.timeout_ms;
        SessionResult s1 = run_platform_session(p1, 1, jobs, session);
        SessionResult s2 = run_platform_session(p2, 2, jobs, session);
        out.sessions += 2;
        for (SessionResult* s : {&s1, &s2}) {
          out.transcript_lines += s->transcript.size();
          out.transcript_violations += transcript_violations(s->transcript);
          if (transcript != nullptr)
            transcript->insert(transcript->end(), std::make_move_iterator(s->transcript.begin()),
                               std::make_move_iterator(s->transcript.end()));
        }
        r1 = std::move(s1.records);
        r2 = std::move(s2.records);
      } else {
        r1 = collect_records(p1, scheme, 1, jobs, seed);
        r2 = collect_records(p2, scheme, 2, jobs, seed);
      }
      const EstimateReport e = multi_cut_estimate(r1, r2, plan, table, scheme.ensemble, configs, configs);
      k.values(i, j) = k.values(j, i) = std::clamp(e.value, 0.0, 1.0);
      k.std_errors(i, j) = k.std_errors(j, i) = e.std_error;
      const KernelEntrySource src{true, e.budget};
      k.source[static_cast<std::size_t>(i * r + j)] = src;
      k.source[static_cast<std::size_t>(j * r + i)] = src;
    }
  }
  return out;
}

RMatrix project_psd(const RMatrix& k) {
  if (k.rows() != k.cols()) throw DimensionError("kernel must be square");
  const RMatrix sym = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(sym);
  const RVector clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

// ---------------------------------------------------------------- regression

namespace {

void check_training(const RMatrix& k_train, std::span<const double> y) {
  if (k_train.rows() != k_train.cols()) throw DimensionError("training kernel must be square");
  if (static_cast<std::size_t>(k_train.rows()) != y.size()) throw DimensionError("label count differs from kernel size");
  if (y.empty()) throw InvalidArgument("no training points");
}

bool all_rows_equal(const RMatrix& k) {
  for (Eigen::Index i = 1; i < k.rows(); ++i)
    if ((k.row(i) - k.row(0)).cwiseAbs().maxCoeff() > 1e-12) return false;
  return true;
}

}  // namespace

std::vector<double> SvrModel::predict(const RMatrix& k_cross) const {
  if (static_cast<std::size_t>(k_cross.rows()) != coef.size()) throw DimensionError("cross kernel rows differ from training size");
  std::vector<double> out(static_cast<std::size_t>(k_cross.cols()));
  for (Eigen::Index t = 0; t < k_cross.cols(); ++t) {
    double f = -rho;
    for (std::size_t i = 0; i < coef.size(); ++i) f += coef[i] * k_cross(static_cast<Eigen::Index>(i), t);
    out[static_cast<std::size_t>(t)] = f;
  }
  return out;
}

SvrModel svr_train(const RMatrix& k_train, std::span<const double> y, const SvrParams& params) {
  check_training(k_train, y);
  if (params.C <= 0.0 || params.epsilon < 0.0) throw InvalidArgument("SVR needs C > 0 and epsilon >= 0");
  const int l = static_cast<int>(y.size());
  if (l >= 2 && all_rows_equal(k_train)) throw EstimationError("degenerate kernel: all rows are identical");
  const RMatrix k = project_psd(k_train);

  // Dual over 2l variables: alpha_i (sign +1) and alpha_i^* (sign -1).
  const int n = 2 * l;
  const double c = params.C;
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0), grad(static_cast<std::size_t>(n));
  std::vector<int> sign(static_cast<std::size_t>(n));
  for (int i = 0; i < l; ++i) {
    sign[static_cast<std::size_t>(i)] = 1;
    sign[static_cast<std::size_t>(i + l)] = -1;
    grad[static_cast<std::size_t>(i)] = params.epsilon - y[static_cast<std::size_t>(i)];
    grad[static_cast<std::size_t>(i + l)] = params.epsilon + y[static_cast<std::size_t>(i)];
  }
  auto kern = [&](int a, int b) { return k(a % l, b % l); };
  auto q = [&](int a, int b) { return sign[static_cast<std::size_t>(a)] * sign[static_cast<std::size_t>(b)] * kern(a, b); };
  auto up = [&](int t) {
    const auto ut = static_cast<std::size_t>(t);
    return sign[ut] > 0 ? alpha[ut] < c : alpha[ut] > 0.0;
  };
  auto low = [&](int t) {
    const auto ut = static_cast<std::size_t>(t);
    return sign[ut] > 0 ? alpha[ut] > 0.0 : alpha[ut] < c;
  };
  constexpr double kTau = 1e-12;

  SvrModel model;
  for (model.iterations = 0; model.iterations < params.max_iterations; ++model.iterations) {
    int i = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const double v = -sign[static_cast<std::size_t>(t)] * grad[static_cast<std::size_t>(t)];
      if (up(t) && v >= gmax) {
        gmax = v;
        i = t;
      }
    }
    int j = -1;
    double gmax2 = -std::numeric_limits<double>::infinity(), best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n && i >= 0; ++t) {
      if (!low(t)) continue;
      const double v = sign[static_cast<std::size_t>(t)] * grad[static_cast<std::size_t>(t)];
      gmax2 = std::max(gmax2, v);
      const double b = gmax + v;
      if (b > 0.0) {
        double a = kern(i, i) + kern(t, t) - 2.0 * kern(i, t);
        if (a <= 0.0) a = kTau;
        if (-b * b / a <= best) {
          best = -b * b / a;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < params.tolerance) break;

    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    const double old_i = alpha[ui], old_j = alpha[uj];
    if (sign[ui] != sign[uj]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[ui] - grad[uj]) / quad;
      const double diff = alpha[ui] - alpha[uj];
      alpha[ui] += delta;
      alpha[uj] += delta;
      if (diff > 0.0) {
        if (alpha[uj] < 0.0) {
          alpha[uj] = 0.0;
          alpha[ui] = diff;
        }
      } else if (alpha[ui] < 0.0) {
        alpha[ui] = 0.0;
        alpha[uj] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[ui] > c) {
          alpha[ui] = c;
          alpha[uj] = c - diff;
        }
      } else if (alpha[uj] > c) {
        alpha[uj] = c;
        alpha[ui] = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[ui] - grad[uj]) / quad;
      const double sum = alpha[ui] + alpha[uj];
      alpha[ui] -= delta;
      alpha[uj] += delta;
      if (sum > c) {
        if (alpha[ui] > c) {
          alpha[ui] = c;
          alpha[uj] = sum - c;
        }
      } else if (alpha[uj] < 0.0) {
        alpha[uj] = 0.0;
        alpha[ui] = sum;
      }
      if (sum > c) {
        if (alpha[uj] > c) {
          alpha[uj] = c;
          alpha[ui] = sum - c;
        }
      } else if (alpha[ui] < 0.0) {
        alpha[ui] = 0.0;
        alpha[uj] = sum;
      }
    }
    const double di = alpha[ui] - old_i, dj = alpha[uj] - old_j;
    for (int t = 0; t < n; ++t) grad[static_cast<std::size_t>(t)] += q(t, i) * di + q(t, j) * dj;
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity(), free_sum = 0.0;
  int free_count = 0;
  for (int t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const double yg = sign[ut] * grad[ut];
    if (alpha[ut] >= c) {
      if (sign[ut] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[ut] <= 0.0) {
      if (sign[ut] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  model.rho = free_count > 0 ? free_sum / free_count : 0.5 * (ub + lb);
  model.coef.resize(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i)
    model.coef[static_cast<std::size_t>(i)] = alpha[static_cast<std::size_t>(i)] - alpha[static_cast<std::size_t>(i + l)];
  return model;
}

std::vector<double> svr_train_predict(const RMatrix& k_train, std::span<const double> y, const RMatrix& k_cross,
                                      const SvrParams& params) {
  return svr_train(k_train, y, params).predict(k_cross);
}

std::vector<double> kernel_ridge_predict(const RMatrix& k_train, std::span<const double> y, const RMatrix& k_cross,
                                         double lambda) {
  check_training(k_train, y);
  if (k_cross.rows() != k_train.rows()) throw DimensionError("cross kernel rows differ from training size");
  if (lambda <= 0.0) throw InvalidArgument("ridge parameter must be positive");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  RVector centered(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) centered(static_cast<Eigen::Index>(i)) = y[i] - mean;
  const RMatrix reg = project_psd(k_train) + lambda * RMatrix::Identity(k_train.rows(), k_train.rows());
  const RVector a = reg.ldlt().solve(centered);
  const RVector f = k_cross.transpose() * a;
  std::vector<double> out(static_cast<std::size_t>(f.size()));
  for (Eigen::Index t = 0; t < f.size(); ++t) out[static_cast<std::size_t>(t)] = f(t) + mean;
  return out;
}

LooSelection select_svr_params_loo(const RMatrix& kernel, std::span<const double> y, std::span<const double> c_grid,
                                   std::span<const double> epsilon_grid) {
  if (kernel.rows() != kernel.cols() || static_cast<std::size_t>(kernel.rows()) != y.size())
    throw DimensionError("kernel and labels disagree in size");
  if (y.size() < 3) throw InvalidArgument("leave-one-out needs at least three points");
  if (c_grid.empty() || epsilon_grid.empty()) throw InvalidArgument("empty hyperparameter grid");
  const auto r = static_cast<Eigen::Index>(y.size());
  LooSelection best;
  best.loo_mse = std::numeric_limits<double>::infinity();
  for (double c : c_grid) {
    for (double eps : epsilon_grid) {
      SvrParams params;
      params.C = c;
      params.epsilon = eps;
      double err = 0.0;
      for (Eigen::Index out = 0; out < r; ++out) {
        RMatrix k_train(r - 1, r - 1), k_cross(r - 1, 1);
        std::vector<double> y_train;
        for (Eigen::Index a = 0, ra = 0; a < r; ++a) {
          if (a == out) continue;
          y_train.push_back(y[static_cast<std::size_t>(a)]);
          for (Eigen::Index b = 0, rb = 0; b < r; ++b) {
            if (b == out) continue;
            k_train(ra, rb++) = kernel(a, b);
          }
          k_cross(ra++, 0) = kernel(a, out);
        }
        const double f = svr_train_predict(k_train, y_train, k_cross, params)[0];
        err += (f - y[static_cast<std::size_t>(out)]) * (f - y[static_cast<std::size_t>(out)]);
      }
      err /= static_cast<double>(r);
      if (err < best.loo_mse) {
        best.loo_mse = err;
        best.params = params;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- metrics

double centered_kernel_alignment(const RMatrix& k, const RMatrix& l) {
  if (k.rows() != k.cols() || l.rows() != l.cols() || k.rows() != l.rows())
    throw DimensionError("CKA needs square kernels of equal size");
  const Eigen::Index r = k.rows();
  const RMatrix h = RMatrix::Identity(r, r) - RMatrix::Constant(r, r, 1.0 / static_cast<double>(r));
  const RMatrix kc = h * k * h, lc = h * l * h;
  const double denom = kc.norm() * lc.norm();
  if (denom == 0.0) throw EstimationError("CKA undefined for a constant kernel");
  return (kc.array() * lc.array()).sum() / denom;
}

MseReport mean_squared_error(std::span<const double> predicted, std::span<const double> reference) {
  if (predicted.size() != reference.size()) throw DimensionError("MSE needs vectors of equal length");
  if (predicted.empty()) throw InvalidArgument("MSE of empty vectors");
  MseReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) r.sum += (predicted[i] - reference[i]) * (predicted[i] - reference[i]);
  r.mean = r.sum / static_cast<double>(predicted.size());
  return r;
}

KernelMetrics kernel_metrics(const RMatrix& k, const RMatrix& l_ref, std::span<const double> y,
                             std::span<const double> y_ref) {
  return {centered_kernel_alignment(k, l_ref), mean_squared_error(y, y_ref)};
}

// ---------------------------------------------------------------- training splits

std::vector<int> training_split(int total, int train_size, std::uint64_t seed, std::uint32_t split) {
  if (train_size < 1 || train_size > total) throw InvalidArgument("training size must lie in [1, total]");
  std::vector<int> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, StreamKey{0, 0, 0, split, StreamPurpose::kTrainingSplit, static_cast<std::uint64_t>(train_size)});
  for (int i = 0; i < train_size; ++i) {
    const auto pick = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[pick]);
  }
  idx.resize(static_cast<std::size_t>(train_size));
  std::sort(idx.begin(), idx.end());
  return idx;
}

LearningReport evaluate_learning(const RMatrix& kernel, std::span<const double> y, int train_size, int splits,
                                 std::uint64_t seed, const SvrParams& params) {
  if (kernel.rows() != kernel.cols() || static_cast<std::size_t>(kernel.rows()) != y.size())
    throw DimensionError("kernel and labels disagree in size");
  if (splits < 1) throw InvalidArgument("need at least one split");
  const int total = static_cast<int>(y.size());
  LearningReport report;
  for (int s = 0; s < splits; ++s) {
    SplitEvaluation eval;
    eval.train = training_split(total, train_size, seed, static_cast<std::uint32_t>(s));
    const auto l = static_cast<Eigen::Index>(eval.train.size());
    RMatrix k_train(l, l), k_cross(l, total);
    std::vector<double> y_train;
    for (Eigen::Index a = 0; a < l; ++a) {
      const int ia = eval.train[static_cast<std::size_t>(a)];
      y_train.push_back(y[static_cast<std::size_t>(ia)]);
      for (Eigen::Index b = 0; b < l; ++b) k_train(a, b) = kernel(ia, eval.train[static_cast<std::size_t>(b)]);
      for (int t = 0; t < total; ++t) k_cross(a, t) = kernel(ia, t);
    }
    eval.predictions = svr_train_predict(k_train, y_train, k_cross, params);
    eval.mse = mean_squared_error(eval.predictions, y);
    std::vector<double> pred_out, y_out;
    for (int t = 0; t < total; ++t) {
      if (std::binary_search(eval.train.begin(), eval.train.end(), t)) continue;
      pred_out.push_back(eval.predictions[static_cast<std::size_t>(t)]);
      y_out.push_back(y[static_cast<std::size_t>(t)]);
    }
    if (!pred_out.empty()) eval.heldout_mse = mean_squared_error(pred_out, y_out);
    report.mean_mse += eval.mse.mean / splits;
    report.mean_mse_sum += eval.mse.sum / splits;
    report.mean_heldout_mse += eval.heldout_mse.mean / splits;
    report.splits.push_back(std::move(eval));
  }
  return report;
}

}  // namespace xplat
