#pragma once

#include <map>
#include <utility>
#include <vector>

#include "rotorwave/angular.hpp"
#include "rotorwave/pulse.hpp"
#include "rotorwave/thermal.hpp"

namespace rotorwave {

enum class PropagationMethod { SplitOperator, Rk4 };

struct PropagationConfig {
  double dt_ps = 0.002;            // substep while the field is on
  double sample_every_ps = 0.05;   // observable sampling cadence
  double t_start_ps = -13.0;
  double t_end_ps = 121.0;
  PropagationMethod method = PropagationMethod::SplitOperator;
  int j_buffer = 20;               // propagation Jmax = thermal Jmax + buffer
  double leakage_tol = 1e-6;       // top-J-shell population abort threshold
  double norm_drift_tol = 1e-8;    // per-column norm drift abort threshold
  int exact_state_guard = 2000;    // exact mode refuses larger ensembles
  void validate() const;
};

struct ObservableTrace {
  std::vector<double> t;
  std::vector<double> orientation;  // <cos theta>
  std::vector<double> alignment;    // <cos^2 theta>
  int size() const { return static_cast<int>(t.size()); }
};

// Propagates a batch of column states of one M-block in the symmetric-top
// basis, solving i d|psi>/dt = 2 pi c [H0 - mu E(t) cos(theta)] |psi>.
//
// Split-operator mode: the drift factor is applied exactly per J block
// through the eigendecomposition of H0 (cached per step length), and the
// kick factor exactly per (K) chain through the eigendecomposition of the
// cos(theta) tridiagonal, with the field sampled at substep midpoints
// (second-order Strang splitting).  Every factor is unitary, so norms are
// conserved to rounding.  Sample intervals with no field collapse to a
// single exact drift.  Rk4 mode integrates the same equation with classic
// fixed-step RK4 for cross-checks.
class BlockEngine {
 public:
  BlockEngine(const AngularTables& tab, int m, int jmax, const Pulse& pulse,
              const PropagationConfig& cfg);

  int m() const { return m_; }
  int dim() const { return basis_.dim(); }
  int ncols() const { return static_cast<int>(re_.cols()); }
  const MBlockBasis& basis() const { return basis_; }

  // columns are complex vectors in the symmetric-top basis
  void set_columns(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im);
  // convenience: one real eigenstate |J tau> per column
  void set_eigenstate_columns(const std::vector<std::pair<int, int>>& jtau);

  int sample_count() const { return n_samples_; }
  double sample_time(int i) const;
  int sample_index() const { return isample_; }
  double time() const { return sample_time(isample_); }

  // advance one sample interval
  void advance();

  const Eigen::MatrixXd& re() const { return re_; }
  const Eigen::MatrixXd& im() const { return im_; }

  // per-column <cos theta> and <cos^2 theta>
  void diag_observables(Eigen::VectorXd& cos1, Eigen::VectorXd& cos2) const;
  // cross matrices O = Psi^dagger D Psi over the current columns
  void cross_observables(Eigen::MatrixXd& o1re, Eigen::MatrixXd& o1im,
                         Eigen::MatrixXd& o2re, Eigen::MatrixXd& o2im,
                         bool with_alignment = true) const;
  // per-column <H0> in cm^-1
  Eigen::VectorXd energies() const;
  Eigen::VectorXd column_norms() const;
  Eigen::VectorXd column_leakages() const;  // top-J-shell population per column
  double max_leakage() const;               // max over columns

  // norm drift and leakage guards; label names the columns in diagnostics
  void check_health(const char* label) const;

 private:
  struct Chain {
    std::vector<int> rows;
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;
  };

  void apply_drift(double delta);
  void apply_kick(double alpha);
  void split_interval(double t0, double h_total);
  void rk4_interval(double t0, double h_total);
  void rk4_step(double t, double h);
  void hmul(double t, const Eigen::MatrixXd& xre, const Eigen::MatrixXd& xim,
            Eigen::MatrixXd& yre, Eigen::MatrixXd& yim) const;

  const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& drift(double delta);

  int m_ = 0;
  int jmax_ = 0;
  MBlockBasis basis_;
  const AngularTables* tab_ = nullptr;
  Pulse pulse_;
  PropagationConfig cfg_;
  double mu_cm1_per_MVcm_ = 0.0;

  struct Csr {
    std::vector<int> ptr, idx;
    std::vector<double> val;
    void mul(const Eigen::MatrixXd& x, Eigen::MatrixXd& y) const;
  };
  Csr h0_, d1_, d2_;
  std::vector<Chain> chains_;
  std::map<double, std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>> drift_cache_;

  Eigen::MatrixXd re_, im_;
  Eigen::VectorXd norm0_;
  int n_samples_ = 0;
  int isample_ = 0;

  Eigen::MatrixXd s1_, s2_, s3_, s4_;  // split-step scratch
  mutable Eigen::MatrixXd obs_re_, obs_im_, rk_tmp_;
  Eigen::MatrixXd k1r_, k1i_, k2r_, k2i_, k3r_, k3i_, k4r_, k4i_, ar_, ai_;
};

// number of sample points a config generates, and the i-th sample time
int trace_sample_count(const PropagationConfig& cfg);
double trace_sample_time(const PropagationConfig& cfg, int i);

// Propagates every kept |J tau M> eigenstate independently and returns the
// weight-summed <cos theta>(t) and <cos^2 theta>(t).  Only M >= 0 blocks are
// propagated; -M contributions are folded in exactly by symmetry.
ObservableTrace exact_ensemble_run(const RotorConstants& rc,
                                   const ThermalEnsemble& ens, const Pulse& pulse,
                                   const PropagationConfig& cfg);

// sparse symmetric-top-basis operators used by the engine (exposed for tests)
SparseOperator symtop_costheta(const MBlockBasis& basis);
SparseOperator symtop_cos2theta(const MBlockBasis& basis);

}  // namespace rotorwave
