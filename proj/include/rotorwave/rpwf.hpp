#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rotorwave/propagate.hpp"
#include "rotorwave/rng.hpp"

namespace rotorwave {

// One random-phase realization: amplitudes sqrt(weight) * exp(i theta) over
// the states of enumerate_states(ensemble), in that order.  theta is drawn
// i.i.d. uniform on [0, 2 pi) from the counter stream keyed by
// (master_seed, realization, state index).
struct RpwfState {
  Eigen::VectorXcd amplitudes;
  int realization = 0;
  std::uint64_t master_seed = 0;
};

RpwfState sample_rpwf(const ThermalEnsemble& ens, std::uint64_t master_seed, int k);

// arithmetic mean over realizations; empty input rejected
double average_observable(const std::vector<double>& values);
ObservableTrace average_traces(const std::vector<ObservableTrace>& traces);

// Frobenius norm of (1/N_r) sum_k |psi_k><psi_k| - diag(weights).  Forms the
// dense average projector, so it is guarded to diagnostic sizes.
double completeness_deviation(const ThermalEnsemble& ens, std::uint64_t master_seed,
                              int n_realizations, int dim_guard = 500);

struct StaticMoments {
  double orientation = 0.0;
  double alignment = 0.0;
};

// Field-free expectation values of cos(theta) and cos^2(theta) in single
// RPWF realizations, evaluated directly in the eigenbasis (no propagation).
class StaticEvaluator {
 public:
  StaticEvaluator(const RotorConstants& rc, const ThermalEnsemble& ens);

  StaticMoments realization(std::uint64_t master_seed, int k) const;
  // mean over realizations k = first .. first+count-1, in that order
  StaticMoments batch_mean(std::uint64_t master_seed, int first, int count) const;
  // Boltzmann-weighted thermal expectation values (phase-free)
  StaticMoments exact() const;

  int state_count() const { return n_states_; }

 private:
  struct Block {
    int m = 0;
    Eigen::MatrixXd phi1, phi2;    // cos, cos^2 in the eigenbasis
    Eigen::VectorXd amp;           // sqrt of the per-state weight
    Eigen::VectorXd parity;        // K-parity of each level
    std::vector<std::uint64_t> gplus, gminus;  // global state indices at +-M
  };
  void accumulate(const Block& b, std::uint64_t seed, int k, bool mirror,
                  StaticMoments& out) const;
  std::vector<Block> blocks_;
  int n_states_ = 0;
};

struct StaticScanRow {
  double temperature_K = 0.0;
  int n_realizations = 0;
  double mean_sq_orientation = 0.0;   // mean over batches of Sbar^2
  double mean_sq_alignment = 0.0;     // mean over batches of (Sbar - 1/3)^2
  double mean_invsq_orientation = 0.0;  // mean over batches of 1/Sbar^2
  double mean_invsq_alignment = 0.0;
};

struct StaticScanConfig {
  std::vector<double> temperatures_K;
  std::vector<int> realization_counts;
  int batches = 100;
  std::uint64_t master_seed = 1;
  ThermalConfig thermal;  // temperature_K is overridden per grid point
};

// Every (T, N_r) grid point draws from its own derived seed; batches within a
// point use disjoint realization indices.
std::vector<StaticScanRow> static_error_scan(const RotorConstants& rc,
                                             const StaticScanConfig& cfg);

struct RpwfRunResult {
  ObservableTrace mean;
  std::vector<ObservableTrace> realizations;  // populated when requested
};

// Propagates each realization once (columns batched per M-block) and averages
// the per-realization traces in fixed order.
RpwfRunResult rpwf_ensemble_run(const RotorConstants& rc, const ThermalEnsemble& ens,
                                const Pulse& pulse, const PropagationConfig& cfg,
                                std::uint64_t master_seed, int n_realizations,
                                bool keep_realizations = false);

struct BatchSpec {
  int first = 0;  // first realization index
  int count = 1;
};

struct SynthesisResult {
  ObservableTrace exact;
  std::vector<ObservableTrace> batches;  // one batch-mean RPWF trace per request
};

// Propagates the kept eigenstates once and synthesizes the exact trace plus
// every requested batch-mean RPWF trace from the same propagation: the batch
// mean over realizations of <psi_k| D |psi_k> equals the trace of the
// cross-operator matrix O_{ss'} = <psi_s(t)| D |psi_s'(t)> against the phase
// Gram matrix averaged over the batch, block by block.  Identical in law and
// in seed stream to propagating each realization directly.
SynthesisResult rpwf_gram_run(const RotorConstants& rc, const ThermalEnsemble& ens,
                              const Pulse& pulse, const PropagationConfig& cfg,
                              std::uint64_t master_seed,
                              const std::vector<BatchSpec>& batches,
                              bool with_alignment = true);

}  // namespace rotorwave
