#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ddccm/data/samples.h"

namespace ddccm {

/// The plants F (n x L) with Tr(F Phi^s_{i,k}) <= d^s_{i,k} for every sample
/// i, state component k and sign s. Phi^s_{i,k} holds s * phi(x[i]) in column
/// k and zeros elsewhere; d^s_{i,k} = eps + s * (xdot[i] - G u[i])_k.
class ConsistencySet {
 public:
  ConsistencySet() = default;
  explicit ConsistencySet(const SampleSet& samples);

  int n() const { return n_; }
  int L() const { return dict_.size(); }
  int T() const { return static_cast<int>(phi_.cols()); }
  /// 2nT.
  int size() const { return 2 * n_ * T(); }
  double eps() const { return eps_; }
  const MonomialDictionary& dict() const { return dict_; }
  const Eigen::MatrixXd& G() const { return G_; }

  /// phi(x[i]) for every sample, one column per sample (L x T).
  const Eigen::MatrixXd& phi_values() const { return phi_; }
  /// xdot[i] - G u[i], one column per sample (n x T).
  const Eigen::MatrixXd& residuals() const { return r_; }

  /// Constraints are numbered ((i * n + k) * 2 + (s < 0)).
  static int Index(int n, int i, int k, int sign) {
    return (i * n + k) * 2 + (sign < 0 ? 1 : 0);
  }
  int sample_of(int index) const { return index / (2 * n_); }
  int component_of(int index) const { return (index / 2) % n_; }
  int sign_of(int index) const { return index % 2 == 0 ? 1 : -1; }

  /// Dense L x n matrix Phi for constraint `index`.
  Eigen::MatrixXd Phi(int index) const;
  double d(int index) const;
  Eigen::VectorXd ds() const;

 private:
  int n_{0};
  double eps_{0.0};
  MonomialDictionary dict_;
  Eigen::MatrixXd G_;
  Eigen::MatrixXd phi_;
  Eigen::MatrixXd r_;
};

struct MembershipResult {
  bool member{false};
  /// max over constraints of Tr(F Phi) - d; <= 0 for members.
  double max_violation{0.0};
};

/// Exact membership (slack 0). Throws std::invalid_argument if F is not n x L.
MembershipResult CheckMembership(const ConsistencySet& set,
                                 const Eigen::MatrixXd& F);

}  // namespace ddccm
