#include "rotorwave/rpwf.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace rotorwave {

namespace {

// global index of a state in enumerate_states order: level-major, M ascending
struct LevelIndex {
  std::vector<std::uint64_t> offset;
  explicit LevelIndex(const ThermalEnsemble& ens) {
    offset.resize(ens.levels.size());
    std::uint64_t acc = 0;
    for (size_t i = 0; i < ens.levels.size(); ++i) {
      offset[i] = acc;
      acc += 2 * ens.levels[i].J + 1;
    }
  }
  std::uint64_t at(int level, int J, int M) const {
    return offset[level] + static_cast<std::uint64_t>(M + J);
  }
};

}  // namespace

RpwfState sample_rpwf(const ThermalEnsemble& ens, std::uint64_t master_seed, int k) {
  if (k < 0) throw ConfigError("rpwf: realization index must be >= 0");
  std::vector<EnsembleState> st = enumerate_states(ens);
  if (st.empty()) throw ConfigError("rpwf: empty ensemble");
  RpwfState out;
  out.master_seed = master_seed;
  out.realization = k;
  out.amplitudes.resize(static_cast<int>(st.size()));
  for (size_t s = 0; s < st.size(); ++s) {
    double th = random_phase(master_seed, static_cast<std::uint64_t>(k), s);
    out.amplitudes[static_cast<int>(s)] =
        std::sqrt(st[s].weight) * std::complex<double>(std::cos(th), std::sin(th));
  }
  return out;
}

double average_observable(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("rpwf: cannot average an empty batch");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

ObservableTrace average_traces(const std::vector<ObservableTrace>& traces) {
  if (traces.empty()) throw ConfigError("rpwf: cannot average an empty batch");
  ObservableTrace out = traces.front();
  for (size_t r = 1; r < traces.size(); ++r) {
    const ObservableTrace& tr = traces[r];
    if (tr.t.size() != out.t.size())
      throw ConfigError("rpwf: traces share one time grid");
    for (size_t i = 0; i < out.t.size(); ++i) {
      out.orientation[i] += tr.orientation[i];
      out.alignment[i] += tr.alignment[i];
    }
  }
  double inv = 1.0 / static_cast<double>(traces.size());
  for (size_t i = 0; i < out.t.size(); ++i) {
    out.orientation[i] *= inv;
    out.alignment[i] *= inv;
  }
  return out;
}

double completeness_deviation(const ThermalEnsemble& ens, std::uint64_t master_seed,
                              int n_realizations, int dim_guard) {
  if (n_realizations < 1) throw ConfigError("rpwf: need at least one realization");
  std::vector<EnsembleState> st = enumerate_states(ens);
  int n = static_cast<int>(st.size());
  if (n > dim_guard)
    throw GuardExceeded("completeness diagnostic needs a dense " + std::to_string(n) +
                        "-dimensional projector; guard is " + std::to_string(dim_guard));
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n_realizations; ++k) {
    RpwfState psi = sample_rpwf(ens, master_seed, k);
    p.noalias() += psi.amplitudes * psi.amplitudes.adjoint();
  }
  p /= static_cast<double>(n_realizations);
  for (int s = 0; s < n; ++s) p(s, s) -= st[s].weight;
  return p.norm();
}

StaticEvaluator::StaticEvaluator(const RotorConstants& rc, const ThermalEnsemble& ens) {
  rc.validate();
  if (ens.levels.empty()) throw ConfigError("rpwf: empty ensemble");
  AngularTables tab = build_angular_tables(rc, ens.max_kept_j());
  LevelIndex li(ens);
  n_states_ = ens.state_count();
  for (int m = 0; m <= ens.max_kept_j(); ++m) {
    std::vector<int> lvl;
    for (size_t i = 0; i < ens.levels.size(); ++i)
      if (ens.levels[i].J >= m) lvl.push_back(static_cast<int>(i));
    if (lvl.empty()) continue;
    int n = static_cast<int>(lvl.size());
    Block b;
    b.m = m;
    b.phi1 = Eigen::MatrixXd::Zero(n, n);
    b.phi2 = Eigen::MatrixXd::Zero(n, n);
    b.amp.resize(n);
    b.parity.resize(n);
    b.gplus.resize(n);
    b.gminus.resize(n);
    for (int a = 0; a < n; ++a) {
      const ThermalLevel& l = ens.levels[lvl[a]];
      b.amp[a] = std::sqrt(l.weight / (2 * l.J + 1));
      b.parity[a] = tab.jblocks[l.J].kparity[l.tau - 1];
      b.gplus[a] = li.at(lvl[a], l.J, m);
      b.gminus[a] = li.at(lvl[a], l.J, -m);
    }
    for (int a = 0; a < n; ++a) {
      const ThermalLevel& la = ens.levels[lvl[a]];
      for (int c = a; c < n; ++c) {
        const ThermalLevel& lc = ens.levels[lvl[c]];
        int dj = std::abs(la.J - lc.J);
        if (dj <= 1)
          b.phi1(a, c) = b.phi1(c, a) =
              asym_matrix_element(tab, 1, m, la.J, la.tau, lc.J, lc.tau);
        if (dj <= 2)
          b.phi2(a, c) = b.phi2(c, a) =
              asym_matrix_element(tab, 2, m, la.J, la.tau, lc.J, lc.tau);
      }
    }
    blocks_.push_back(std::move(b));
  }
}

void StaticEvaluator::accumulate(const Block& b, std::uint64_t seed, int k, bool mirror,
                                 StaticMoments& out) const {
  int n = static_cast<int>(b.amp.size());
  Eigen::VectorXd ar(n), ai(n);
  for (int a = 0; a < n; ++a) {
    double th = random_phase(seed, static_cast<std::uint64_t>(k),
                             mirror ? b.gminus[a] : b.gplus[a]);
    double f = (mirror ? b.parity[a] : 1.0) * b.amp[a];
    ar[a] = f * std::cos(th);
    ai[a] = f * std::sin(th);
  }
  out.orientation += ar.dot(b.phi1 * ar) + ai.dot(b.phi1 * ai);
  out.alignment += ar.dot(b.phi2 * ar) + ai.dot(b.phi2 * ai);
}

StaticMoments StaticEvaluator::realization(std::uint64_t master_seed, int k) const {
  if (k < 0) throw ConfigError("rpwf: realization index must be >= 0");
  StaticMoments out;
  for (const Block& b : blocks_) {
    accumulate(b, master_seed, k, false, out);
    if (b.m > 0) accumulate(b, master_seed, k, true, out);
  }
  return out;
}

StaticMoments StaticEvaluator::exact() const {
  StaticMoments out;
  for (const Block& b : blocks_) {
    const double mult = b.m > 0 ? 2.0 : 1.0;
    for (int a = 0; a < b.amp.size(); ++a) {
      const double w = mult * b.amp[a] * b.amp[a];
      out.orientation += w * b.phi1(a, a);
      out.alignment += w * b.phi2(a, a);
    }
  }
  return out;
}

StaticMoments StaticEvaluator::batch_mean(std::uint64_t master_seed, int first,
                                          int count) const {
  if (first < 0 || count < 1) throw ConfigError("rpwf: bad batch range");
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd s2 = Eigen::VectorXd::Zero(count);
  Eigen::MatrixXd ar, ai, y;
  for (const Block& b : blocks_) {
    int n = static_cast<int>(b.amp.size());
    ar.resize(n, count);
    ai.resize(n, count);
    for (int mir = 0; mir < (b.m > 0 ? 2 : 1); ++mir) {
      for (int j = 0; j < count; ++j) {
        std::uint64_t k = static_cast<std::uint64_t>(first + j);
        for (int a = 0; a < n; ++a) {
          double th = random_phase(master_seed, k, mir ? b.gminus[a] : b.gplus[a]);
          double f = (mir ? b.parity[a] : 1.0) * b.amp[a];
          ar(a, j) = f * std::cos(th);
          ai(a, j) = f * std::sin(th);
        }
      }
      y.noalias() = b.phi1 * ar;
      s1 += ar.cwiseProduct(y).colwise().sum().transpose();
      y.noalias() = b.phi1 * ai;
      s1 += ai.cwiseProduct(y).colwise().sum().transpose();
      y.noalias() = b.phi2 * ar;
      s2 += ar.cwiseProduct(y).colwise().sum().transpose();
      y.noalias() = b.phi2 * ai;
      s2 += ai.cwiseProduct(y).colwise().sum().transpose();
    }
  }
  return {s1.mean(), s2.mean()};
}

std::vector<StaticScanRow> static_error_scan(const RotorConstants& rc,
                                             const StaticScanConfig& cfg) {
  if (cfg.temperatures_K.empty() || cfg.realization_counts.empty())
    throw ConfigError("static scan: empty temperature or realization grid");
  if (cfg.batches < 1) throw ConfigError("static scan: batches must be >= 1");
  for (int nr : cfg.realization_counts)
    if (nr < 1) throw ConfigError("static scan: realization counts must be >= 1");
  std::vector<StaticScanRow> rows;
  for (size_t ti = 0; ti < cfg.temperatures_K.size(); ++ti) {
    ThermalConfig tc = cfg.thermal;
    tc.temperature_K = cfg.temperatures_K[ti];
    ThermalEnsemble ens = build_thermal_ensemble(rc, tc);
    StaticEvaluator ev(rc, ens);
    for (size_t ni = 0; ni < cfg.realization_counts.size(); ++ni) {
      int nr = cfg.realization_counts[ni];
      std::uint64_t seed = derive_seed(cfg.master_seed, ti * 4096 + ni);
      StaticScanRow row;
      row.temperature_K = cfg.temperatures_K[ti];
      row.n_realizations = nr;
      for (int b = 0; b < cfg.batches; ++b) {
        StaticMoments mo = ev.batch_mean(seed, b * nr, nr);
        double e1 = mo.orientation;
        double e2 = mo.alignment - 1.0 / 3.0;
        row.mean_sq_orientation += e1 * e1;
        row.mean_sq_alignment += e2 * e2;
        row.mean_invsq_orientation += 1.0 / (e1 * e1);
        row.mean_invsq_alignment += 1.0 / (e2 * e2);
      }
      double inv = 1.0 / cfg.batches;
      row.mean_sq_orientation *= inv;
      row.mean_sq_alignment *= inv;
      row.mean_invsq_orientation *= inv;
      row.mean_invsq_alignment *= inv;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

struct BlockLevels {
  std::vector<int> lvl;          // indices into ens.levels
  Eigen::VectorXd amp, parity;
  std::vector<std::uint64_t> gplus, gminus;
};

BlockLevels collect_block(const ThermalEnsemble& ens, const AngularTables& tab,
                          const LevelIndex& li, int m) {
  BlockLevels b;
  for (size_t i = 0; i < ens.levels.size(); ++i)
    if (ens.levels[i].J >= m) b.lvl.push_back(static_cast<int>(i));
  int n = static_cast<int>(b.lvl.size());
  b.amp.resize(n);
  b.parity.resize(n);
  b.gplus.resize(n);
  b.gminus.resize(n);
  for (int a = 0; a < n; ++a) {
    const ThermalLevel& l = ens.levels[b.lvl[a]];
    b.amp[a] = std::sqrt(l.weight / (2 * l.J + 1));
    b.parity[a] = tab.jblocks[l.J].kparity[l.tau - 1];
    b.gplus[a] = li.at(b.lvl[a], l.J, m);
    b.gminus[a] = li.at(b.lvl[a], l.J, -m);
  }
  return b;
}

}  // namespace

RpwfRunResult rpwf_ensemble_run(const RotorConstants& rc, const ThermalEnsemble& ens,
                                const Pulse& pulse, const PropagationConfig& cfg,
                                std::uint64_t master_seed, int n_realizations,
                                bool keep_realizations) {
  rc.validate();
  cfg.validate();
  if (n_realizations < 1) throw ConfigError("rpwf: n_realizations must be >= 1");
  if (ens.levels.empty()) throw ConfigError("rpwf: empty ensemble");
  int jmax = ens.max_kept_j() + cfg.j_buffer;
  AngularTables tab = build_angular_tables(rc, jmax);
  LevelIndex li(ens);
  int n = trace_sample_count(cfg);
  Eigen::MatrixXd or_acc = Eigen::MatrixXd::Zero(n, n_realizations);
  Eigen::MatrixXd al_acc = Eigen::MatrixXd::Zero(n, n_realizations);

  Eigen::VectorXd c1, c2;
  for (int m = 0; m <= ens.max_kept_j(); ++m) {
    BlockLevels b = collect_block(ens, tab, li, m);
    int nb = static_cast<int>(b.lvl.size());
    if (nb == 0) continue;
    int nsig = m > 0 ? 2 : 1;
    BlockEngine eng(tab, m, jmax, pulse, cfg);
    Eigen::MatrixXd re0 = Eigen::MatrixXd::Zero(eng.dim(), n_realizations * nsig);
    Eigen::MatrixXd im0 = Eigen::MatrixXd::Zero(eng.dim(), n_realizations * nsig);
    for (int k = 0; k < n_realizations; ++k)
      for (int sig = 0; sig < nsig; ++sig) {
        int col = k + sig * n_realizations;
        for (int a = 0; a < nb; ++a) {
          const ThermalLevel& l = ens.levels[b.lvl[a]];
          double th = random_phase(master_seed, static_cast<std::uint64_t>(k),
                                   sig ? b.gminus[a] : b.gplus[a]);
          double f = (sig ? b.parity[a] : 1.0) * b.amp[a];
          auto seg = [&](Eigen::MatrixXd& x) {
            return x.col(col).segment(eng.basis().joffset[l.J - m], 2 * l.J + 1);
          };
          seg(re0) += f * std::cos(th) * tab.jblocks[l.J].coeffs.col(l.tau - 1);
          seg(im0) += f * std::sin(th) * tab.jblocks[l.J].coeffs.col(l.tau - 1);
        }
      }
    eng.set_columns(re0, im0);
    Eigen::VectorXd norm0 = eng.column_norms();
    for (int i = 0; i < n; ++i) {
      if (i > 0) eng.advance();
      eng.diag_observables(c1, c2);
      for (int k = 0; k < n_realizations; ++k)
        for (int sig = 0; sig < nsig; ++sig) {
          or_acc(i, k) += c1[k + sig * n_realizations];
          al_acc(i, k) += c2[k + sig * n_realizations];
        }
      Eigen::VectorXd drift = (eng.column_norms() - norm0).cwiseAbs();
      Eigen::VectorXd leak = eng.column_leakages();
      for (int c = 0; c < eng.ncols(); ++c) {
        if (drift[c] > cfg.norm_drift_tol)
          throw NumericalAbort("norm drift " + std::to_string(drift[c]) +
                               " in realization " + std::to_string(c % n_realizations) +
                               ", block M=" + std::to_string(m) +
                               ", t = " + std::to_string(eng.time()) + " ps");
        if (leak[c] > cfg.leakage_tol)
          throw NumericalAbort("top-shell population " + std::to_string(leak[c]) +
                               " in realization " + std::to_string(c % n_realizations) +
                               ", block M=" + std::to_string(m) +
                               ", t = " + std::to_string(eng.time()) +
                               " ps; increase j_buffer");
      }
    }
  }

  RpwfRunResult out;
  out.mean.t.resize(n);
  out.mean.orientation.assign(n, 0.0);
  out.mean.alignment.assign(n, 0.0);
  for (int i = 0; i < n; ++i) out.mean.t[i] = trace_sample_time(cfg, i);
  for (int k = 0; k < n_realizations; ++k)
    for (int i = 0; i < n; ++i) {
      out.mean.orientation[i] += or_acc(i, k);
      out.mean.alignment[i] += al_acc(i, k);
    }
  for (int i = 0; i < n; ++i) {
    out.mean.orientation[i] /= n_realizations;
    out.mean.alignment[i] /= n_realizations;
  }
  if (keep_realizations) {
    out.realizations.resize(n_realizations);
    for (int k = 0; k < n_realizations; ++k) {
      ObservableTrace& tr = out.realizations[k];
      tr.t = out.mean.t;
      tr.orientation.resize(n);
      tr.alignment.resize(n);
      for (int i = 0; i < n; ++i) {
        tr.orientation[i] = or_acc(i, k);
        tr.alignment[i] = al_acc(i, k);
      }
    }
  }
  return out;
}

SynthesisResult rpwf_gram_run(const RotorConstants& rc, const ThermalEnsemble& ens,
                              const Pulse& pulse, const PropagationConfig& cfg,
                              std::uint64_t master_seed,
                              const std::vector<BatchSpec>& batches,
                              bool with_alignment) {
  rc.validate();
  cfg.validate();
  if (ens.levels.empty()) throw ConfigError("rpwf: empty ensemble");
  for (const BatchSpec& s : batches)
    if (s.first < 0 || s.count < 1) throw ConfigError("rpwf: bad batch request");
  int jmax = ens.max_kept_j() + cfg.j_buffer;
  AngularTables tab = build_angular_tables(rc, jmax);
  LevelIndex li(ens);
  int n = trace_sample_count(cfg);
  int ns = static_cast<int>(batches.size());

  SynthesisResult out;
  out.exact.t.resize(n);
  out.exact.orientation.assign(n, 0.0);
  out.exact.alignment.assign(n, 0.0);
  for (int i = 0; i < n; ++i) out.exact.t[i] = trace_sample_time(cfg, i);
  out.batches.assign(ns, out.exact);

  Eigen::MatrixXd o1re, o1im, o2re, o2im;
  Eigen::VectorXd ar, ai;
  for (int m = 0; m <= ens.max_kept_j(); ++m) {
    BlockLevels b = collect_block(ens, tab, li, m);
    int nb = static_cast<int>(b.lvl.size());
    if (nb == 0) continue;

    // batch-averaged phase Gram per requested batch, with the -M mirror
    // folded in through K-parity conjugation
    std::vector<Eigen::MatrixXd> gre(ns), gim(ns);
    for (int si = 0; si < ns; ++si) {
      gre[si] = Eigen::MatrixXd::Zero(nb, nb);
      gim[si] = Eigen::MatrixXd::Zero(nb, nb);
      for (int k = batches[si].first; k < batches[si].first + batches[si].count; ++k)
        for (int sig = 0; sig < (m > 0 ? 2 : 1); ++sig) {
          ar.resize(nb);
          ai.resize(nb);
          for (int a = 0; a < nb; ++a) {
            double th = random_phase(master_seed, static_cast<std::uint64_t>(k),
                                     sig ? b.gminus[a] : b.gplus[a]);
            double f = (sig ? b.parity[a] : 1.0) * b.amp[a];
            ar[a] = f * std::cos(th);
            ai[a] = f * std::sin(th);
          }
          gre[si].noalias() += ar * ar.transpose();
          gre[si].noalias() += ai * ai.transpose();
          gim[si].noalias() += ai * ar.transpose();
          gim[si].noalias() -= ar * ai.transpose();
        }
      gre[si] /= batches[si].count;
      gim[si] /= batches[si].count;
    }

    std::vector<std::pair<int, int>> jtau;
    Eigen::VectorXd wt(nb);
    for (int a = 0; a < nb; ++a) {
      const ThermalLevel& l = ens.levels[b.lvl[a]];
      jtau.emplace_back(l.J, l.tau);
      wt[a] = l.weight / (2 * l.J + 1) * (m > 0 ? 2.0 : 1.0);
    }
    BlockEngine eng(tab, m, jmax, pulse, cfg);
    eng.set_eigenstate_columns(jtau);
    std::string label = "gram block M=" + std::to_string(m);
    for (int i = 0; i < n; ++i) {
      if (i > 0) eng.advance();
      eng.cross_observables(o1re, o1im, o2re, o2im, with_alignment);
      for (int a = 0; a < nb; ++a) {
        out.exact.orientation[i] += wt[a] * o1re(a, a);
        if (with_alignment) out.exact.alignment[i] += wt[a] * o2re(a, a);
      }
      for (int si = 0; si < ns; ++si) {
        out.batches[si].orientation[i] += o1re.cwiseProduct(gre[si]).sum() +
                                          o1im.cwiseProduct(gim[si]).sum();
        if (with_alignment)
          out.batches[si].alignment[i] += o2re.cwiseProduct(gre[si]).sum() +
                                          o2im.cwiseProduct(gim[si]).sum();
      }
      eng.check_health(label.c_str());
    }
  }
  return out;
}

}  // namespace rotorwave
