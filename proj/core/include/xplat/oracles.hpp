#pragma once

#include <array>
#include <span>
#include <vector>

#include "xplat/clifford.hpp"
#include "xplat/stabilizer.hpp"
#include "xplat/wirecut.hpp"

namespace xplat {

// ---------------------------------------------------------------- exact estimator expectations

/// Weighted sum over every cut configuration of the global operator obtained
/// by running the parts in order with each cut channel applied in place on
/// the full density matrix. Equals the uncut state when the table reconstructs
/// the identity.
CMatrix reconstructed_operator(const CutPlan& plan, const PartCircuits& circuits,
                               const CutConfigTable& table = cut_config_table());

/// 2^n E_U sum_{s,s'} (-2)^{-D(s,s')} <s|U A U^dag|s> <s'|U B U^dag|s'> with U
/// running over all 3^n products of {I, Rx(pi/2), Ry(pi/2)}.
double distance_form(const CMatrix& a, const CMatrix& b);

enum class OracleEstimator { kDistance, kCollision };

/// Expectation of an estimator in exact mode, by enumeration. kDistance covers
/// the distance, multi-cut, parallel single-cut and purity estimators;
/// kCollision needs an uncut plan with n <= 3 and averages over the MUB set.
double exact_estimator_expectation(const CutPlan& plan, const PartCircuits& p, const PartCircuits& q,
                                   OracleEstimator estimator);

/// Expectation of the sign-weighted stabilizer estimator over the whole group.
double exact_stabilizer_expectation(const CutPlan& plan, const PartCircuits& circuits, const StabilizerGroup& group,
                                    const CutConfigTable& table = cut_config_table());

// ---------------------------------------------------------------- enumeration lemmas

/// All permutations of {0, ..., t-1} in lexicographic order.
std::vector<std::vector<int>> permutations(int t);
int cycle_count(std::span<const int> perm);
/// d^t x d^t operator permuting t copies of C^d: V |i_0 ... i_{t-1}> = |i_{p^-1(0)} ... >.
CMatrix permutation_operator(std::span<const int> perm, int d);

struct PermutationCell {
  std::array<int, 4> bits{};  // s, s', b, b'
  double y1 = 0.0;            // (-2)^{-D(s,s') - D(b,b')}
  int y2 = 0;                 // sum_tau tr(V_tau |s s' b b'><s s' b b'|)
};

struct PermutationSumReport {
  std::vector<PermutationCell> cells;  // 16 rows
  double total = 0.0;

  const PermutationCell& cell(int s, int sp, int b, int bp) const;
};

/// The S_4 sum weighted by (-2)^{-Hamming distance}; the total is 36.
PermutationSumReport permutation_sum_check();

struct WeingartenTable {
  int t = 0;
  int d = 0;
  std::vector<std::vector<int>> perms;
  RMatrix gram;   // d^cycles(zeta^-1 tau)
  RMatrix coeff;  // pseudo-inverse of gram
};

WeingartenTable weingarten_table(int t, int d);

struct WeingartenReport {
  double expected = 0.0;  // 1 / (d+t-1)(d+t-2)...(d)
  std::vector<double> row_sums;
  double max_deviation = 0.0;
  double pseudo_inverse_residual = 0.0;  // max |C G C - C|
};

WeingartenReport weingarten_sum_check(int t, int d);

/// Max entry deviation of the enumerated Clifford twirl of full dephasing from
/// |I>><<I| + Pi_1 / (2^k + 1), computed through density matrices.
double schur_average_check(int k);

}  // namespace xplat
