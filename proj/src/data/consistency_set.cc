#include "ddccm/data/consistency_set.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddccm {

ConsistencySet::ConsistencySet(const SampleSet& samples) {
  samples.Validate();
  n_ = samples.num_states();
  eps_ = samples.eps;
  dict_ = samples.dict;
  G_ = samples.G;
  const int T = samples.num_samples();
  phi_.resize(dict_.size(), T);
  r_.resize(n_, T);
  for (int i = 0; i < T; ++i) {
    const auto& rec = samples.records[i];
    phi_.col(i) = dict_.Evaluate(rec.x);
    r_.col(i) = rec.xdot - G_ * rec.u;
  }
}

Eigen::MatrixXd ConsistencySet::Phi(int index) const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(L(), n_);
  P.col(component_of(index)) = sign_of(index) * phi_.col(sample_of(index));
  return P;
}

double ConsistencySet::d(int index) const {
  return eps_ + sign_of(index) * r_(component_of(index), sample_of(index));
}

Eigen::VectorXd ConsistencySet::ds() const {
  Eigen::VectorXd out(size());
  for (int a = 0; a < size(); ++a) out(a) = d(a);
  return out;
}

MembershipResult CheckMembership(const ConsistencySet& set,
                                 const Eigen::MatrixXd& F) {
  if (F.rows() != set.n() || F.cols() != set.L()) {
    throw std::invalid_argument("F must be n x L");
  }
  // Tr(F Phi^s_{i,k}) = s (F phi(x[i]))_k.
  const Eigen::MatrixXd pred = F * set.phi_values();
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < set.T(); ++i) {
    for (int k = 0; k < set.n(); ++k) {
      const double dev = pred(k, i) - set.residuals()(k, i);
      worst = std::max(worst, std::abs(dev) - set.eps());
    }
  }
  return {worst <= 0.0, worst};
}

}  // namespace ddccm
