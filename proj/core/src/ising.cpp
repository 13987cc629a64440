#include "xplat/ising.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <numbers>

namespace xplat {

const std::vector<double>& phase_h_grid() {
  static const std::vector<double> grid{-1.45, -1.35, -1.20, -1.05, -0.90, -0.75, -0.60, -0.45, -0.30, -0.15, 0.00,
                                        0.15,  0.30,  0.45,  0.60,  0.75,  0.90,  1.05,  1.20,  1.35,  1.45};
  return grid;
}

RMatrix ising_hamiltonian(const IsingSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("Ising chain needs n >= 2");
  if (spec.n > kMaxQubits) throw DimensionError("Ising chain too large for the dense simulator");
  const auto dim = static_cast<Eigen::Index>(dim_of(spec.n));
  RMatrix h = RMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto bits = static_cast<std::uint64_t>(s);
    double diag = 0.0;
    for (int j = 0; j + 1 < spec.n; ++j) {
      const int a = static_cast<int>((bits >> (spec.n - 1 - j)) & 1), b = static_cast<int>((bits >> (spec.n - 2 - j)) & 1);
      diag -= spec.J * (a == b ? 1.0 : -1.0);
    }
    h(s, s) = diag;
    for (int j = 0; j < spec.n; ++j) h(static_cast<Eigen::Index>(bits ^ (std::uint64_t{1} << (spec.n - 1 - j))), s) -= spec.h;
  }
  return h;
}

namespace {

RMatrix flip_operator(int n) {
  const auto dim = static_cast<Eigen::Index>(dim_of(n));
  RMatrix x = RMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) x(static_cast<Eigen::Index>(static_cast<std::uint64_t>(s) ^ (dim_of(n) - 1)), s) = 1.0;
  return x;
}

QuantumState real_state(RVector v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
  return QuantumState::pure(v.normalized().cast<cplx>());
}

}  // namespace

GroundState exact_ground_state(const RMatrix& hamiltonian, int n) {
  if (hamiltonian.rows() != static_cast<Eigen::Index>(dim_of(n)) || hamiltonian.cols() != hamiltonian.rows())
    throw DimensionError("Hamiltonian size does not match n");
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(hamiltonian);
  const RVector& values = eig.eigenvalues();
  const double e0 = values(0);
  Eigen::Index degeneracy = 1;
  while (degeneracy < values.size() && values(degeneracy) - e0 < 1e-9) ++degeneracy;
  if (degeneracy == 1) return {real_state(eig.eigenvectors().col(0)), e0};
  // Diagonalize the global flip inside the ground space and keep its top eigenvector.
  const RMatrix basis = eig.eigenvectors().leftCols(degeneracy);
  const RMatrix flip = basis.transpose() * flip_operator(n) * basis;
  Eigen::SelfAdjointEigenSolver<RMatrix> sector(flip);
  return {real_state(basis * sector.eigenvectors().col(degeneracy - 1)), e0};
}

double phase_label(const QuantumState& state) {
  const int n = state.num_qubits();
  const auto probs = measurement_probabilities(state);
  double acc = 0.0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    const double m = static_cast<double>(n - 2 * std::popcount(s)) / n;
    acc += probs[s] * m * m;
  }
  return acc;
}

int ground_parity(const IsingSpec& spec) { return spec.h < 0.0 && spec.n % 2 == 1 ? -1 : 1; }

// ---------------------------------------------------------------- ansatz

CutPlan Ansatz::plan() const { return chain_plan(part_sizes); }

int Ansatz::num_parameters() const {
  int total = 0;
  for (int k : part_sizes) total += 2 * k * (layers + 1);
  return total;
}

PartCircuits Ansatz::circuits(const std::vector<double>& params) const {
  if (static_cast<int>(params.size()) != num_parameters()) throw DimensionError("ansatz parameter count mismatch");
  PartCircuits out;
  std::size_t next = 0;
  for (int k : part_sizes) {
    Circuit c(k);
    for (int layer = 0; layer <= layers; ++layer) {
      for (int q = 0; q < k; ++q) {
        c.rx(q, params[next++]);
        c.rz(q, params[next++]);
      }
      if (layer < layers)
        for (int q = 0; q + 1 < k; ++q) c.cz(q, q + 1);
    }
    out.push_back(std::move(c));
  }
  return out;
}

QuantumState Ansatz::state(const std::vector<double>& params) const { return uncut_state(plan(), circuits(params)); }

// ---------------------------------------------------------------- VQE

namespace {

// Straight-line simulation of the ansatz on global qubits.
struct FlatGate {
  char kind;  // 'x', 'z' or 'c'
  int q0, q1;
  std::size_t param;
};

std::vector<FlatGate> flatten(const Ansatz& ansatz) {
  const CutPlan plan = ansatz.plan();
  std::vector<std::size_t> offset{0};
  for (int k : ansatz.part_sizes) offset.push_back(offset.back() + static_cast<std::size_t>(2 * k * (ansatz.layers + 1)));
  std::vector<FlatGate> gates;
  for (int j : plan.topological_order()) {
    const auto& wires = plan.part(j).global_qubits;
    const int k = static_cast<int>(wires.size());
    std::size_t next = offset[static_cast<std::size_t>(j)];
    for (int layer = 0; layer <= ansatz.layers; ++layer) {
      for (int q = 0; q < k; ++q) {
        gates.push_back({'x', wires[static_cast<std::size_t>(q)], -1, next++});
        gates.push_back({'z', wires[static_cast<std::size_t>(q)], -1, next++});
      }
      if (layer < ansatz.layers)
        for (int q = 0; q + 1 < k; ++q) gates.push_back({'c', wires[static_cast<std::size_t>(q)], wires[static_cast<std::size_t>(q + 1)], 0});
    }
  }
  return gates;
}

struct Objective {
  const Ansatz* ansatz;
  RMatrix observable;
  std::vector<FlatGate> gates;
  int n = 0;
  int evaluations = 0;

  CVector simulate(const std::vector<double>& params) const {
    const std::size_t dim = std::size_t{1} << n;
    CVector psi = CVector::Zero(static_cast<Eigen::Index>(dim));
    psi(0) = 1.0;
    for (const FlatGate& g : gates) {
      if (g.kind == 'c') {
        const std::size_t m = (std::size_t{1} << (n - 1 - g.q0)) | (std::size_t{1} << (n - 1 - g.q1));
        for (std::size_t s = 0; s < dim; ++s)
          if ((s & m) == m) psi(static_cast<Eigen::Index>(s)) = -psi(static_cast<Eigen::Index>(s));
        continue;
      }
      const double theta = params[g.param];
      const std::size_t bit = std::size_t{1} << (n - 1 - g.q0);
      if (g.kind == 'z') {
        const cplx p0 = std::polar(1.0, -theta / 2), p1 = std::polar(1.0, theta / 2);
        for (std::size_t s = 0; s < dim; ++s) psi(static_cast<Eigen::Index>(s)) *= (s & bit) ? p1 : p0;
      } else {
        const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
        const cplx mis(0.0, -sn);
        for (std::size_t s = 0; s < dim; ++s) {
          if (s & bit) continue;
          const cplx a = psi(static_cast<Eigen::Index>(s)), b = psi(static_cast<Eigen::Index>(s | bit));
          psi(static_cast<Eigen::Index>(s)) = c * a + mis * b;
          psi(static_cast<Eigen::Index>(s | bit)) = mis * a + c * b;
        }
      }
    }
    return psi;
  }

  double value(const std::vector<double>& params) {
    ++evaluations;
    const CVector psi = simulate(params);
    const RVector re = psi.real(), im = psi.imag();
    return re.dot(observable * re) + im.dot(observable * im);
  }
  void gradient(std::vector<double> params, std::vector<double>& grad) {
    grad.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + std::numbers::pi / 2;
      const double plus = value(params);
      params[i] = keep - std::numbers::pi / 2;
      const double minus = value(params);
      params[i] = keep;
      grad[i] = 0.5 * (plus - minus);
    }
  }
};

std::vector<double> to_vector(const gsl_vector* v) {
  std::vector<double> out(v->size);
  for (std::size_t i = 0; i < v->size; ++i) out[i] = gsl_vector_get(v, i);
  return out;
}

double gsl_f(const gsl_vector* x, void* p) { return static_cast<Objective*>(p)->value(to_vector(x)); }

void gsl_df(const gsl_vector* x, void* p, gsl_vector* g) {
  std::vector<double> grad;
  static_cast<Objective*>(p)->gradient(to_vector(x), grad);
  for (std::size_t i = 0; i < grad.size(); ++i) gsl_vector_set(g, i, grad[i]);
}

void gsl_fdf(const gsl_vector* x, void* p, double* f, gsl_vector* g) {
  *f = gsl_f(x, p);
  gsl_df(x, p, g);
}

struct Run {
  std::vector<double> params;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

Run minimize(Objective& objective, const std::vector<double>& start, const VqeOptions& options) {
  const std::size_t dim = start.size();
  gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, dim, &objective};
  gsl_vector* x = gsl_vector_alloc(dim);
  for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x, i, start[i]);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dim);
  gsl_multimin_fdfminimizer_set(s, &fn, x, 0.05, 0.1);
  Run run;
  int status = GSL_CONTINUE;
  for (run.iterations = 0; run.iterations < options.max_iterations && status == GSL_CONTINUE; ++run.iterations) {
    if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
    status = gsl_multimin_test_gradient(s->gradient, options.tolerance);
  }
  run.converged = status == GSL_SUCCESS;
  run.params = to_vector(s->x);
  run.value = s->f;
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return run;
}

}  // namespace

VqeResult vqe_optimize(const IsingSpec& spec, const VqeOptions& options, const std::vector<double>& warm_start) {
  int n = 1;
  for (int k : options.ansatz.part_sizes) n += k - 1;
  if (n != spec.n) throw DimensionError("ansatz width differs from the Hamiltonian");
  gsl_set_error_handler_off();
  const RMatrix h = ising_hamiltonian(spec);
  const GroundState exact = exact_ground_state(h, spec.n);
  const auto dim = h.rows();
  Objective objective{&options.ansatz,
                      h + 0.5 * options.parity_weight *
                              (RMatrix::Identity(dim, dim) - ground_parity(spec) * flip_operator(spec.n)),
                      flatten(options.ansatz), spec.n};

  std::vector<std::vector<double>> starts;
  if (!warm_start.empty()) starts.push_back(warm_start);
  const int count = options.ansatz.num_parameters();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(options.seed, StreamKey{0, 0, 0, static_cast<std::uint32_t>(r), StreamPurpose::kVqeRestart,
                                    std::bit_cast<std::uint64_t>(spec.h)});
    std::vector<double> p(static_cast<std::size_t>(count));
    for (double& v : p) v = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
    starts.push_back(std::move(p));
  }
  if (starts.empty()) throw InvalidArgument("VQE needs a warm start or at least one restart");

  Run best;
  bool have = false;
  int total_iterations = 0;
  for (const auto& start : starts) {
    Run run = minimize(objective, start, options);
    total_iterations += run.iterations;
    if (!have || run.value < best.value) {
      best = std::move(run);
      have = true;
    }
  }
  VqeResult out;
  out.params = best.params;
  const QuantumState psi = options.ansatz.state(best.params);
  out.energy = (psi.amplitudes().adjoint() * h.cast<cplx>() * psi.amplitudes())(0, 0).real();
  out.exact_energy = exact.energy;
  out.fidelity = overlap_trace(psi, exact.state);
  out.iterations = total_iterations;
  out.converged = best.converged;
  out.status = best.converged ? "converged" : "iteration limit reached";
  return out;
}

std::vector<VqeResult> vqe_sweep(const std::vector<double>& h_grid, const IsingSpec& base, const VqeOptions& options) {
  std::vector<VqeResult> out;
  std::vector<double> warm;
  for (double h : h_grid) {
    IsingSpec spec = base;
    spec.h = h;
    out.push_back(vqe_optimize(spec, options, warm));
    warm = out.back().params;
  }
  return out;
}

}  // namespace xplat
