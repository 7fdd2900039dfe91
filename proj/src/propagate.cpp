#include "rotorwave/propagate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "rotorwave/constants.hpp"

namespace rotorwave {

void PropagationConfig::validate() const {
  if (!(dt_ps > 0.0)) throw ConfigError("propagation: dt_ps must be positive");
  if (!(sample_every_ps > 0.0))
    throw ConfigError("propagation: sample_every_ps must be positive");
  if (dt_ps > sample_every_ps * (1.0 + 1e-12))
    throw ConfigError("propagation: dt_ps must not exceed sample_every_ps");
  if (!(t_end_ps > t_start_ps))
    throw ConfigError("propagation: t_end_ps must exceed t_start_ps");
  if (j_buffer < 1) throw ConfigError("propagation: j_buffer must be >= 1");
  if (!(leakage_tol > 0.0)) throw ConfigError("propagation: leakage_tol must be positive");
  if (!(norm_drift_tol > 0.0))
    throw ConfigError("propagation: norm_drift_tol must be positive");
  if (exact_state_guard < 1)
    throw ConfigError("propagation: exact_state_guard must be >= 1");
}

int trace_sample_count(const PropagationConfig& cfg) {
  return static_cast<int>(
             std::floor((cfg.t_end_ps - cfg.t_start_ps) / cfg.sample_every_ps + 1e-9)) +
         1;
}

double trace_sample_time(const PropagationConfig& cfg, int i) {
  return cfg.t_start_ps + i * cfg.sample_every_ps;
}

namespace {

SparseOperator symtop_dl0(const MBlockBasis& basis, int l) {
  SparseOperator op;
  op.M = basis.M;
  op.basis = BasisTag::SymTop;
  op.dim = basis.dim();
  for (int r = 0; r < basis.dim(); ++r) {
    const SymTopKet& bra = basis.states[r];
    for (int dj = -l; dj <= l; ++dj) {
      int J2 = bra.J + dj;
      if (J2 < std::max(std::abs(basis.M), std::abs(bra.K)) || J2 > basis.Jmax) continue;
      int c = basis.index(J2, bra.K);
      SymTopKet ket{J2, bra.K, basis.M};
      double v = direction_cosine_element(bra, l, 0, 0, ket);
      if (l == 2) v = (r == c ? 1.0 / 3.0 : 0.0) + (2.0 / 3.0) * v;
      if (v != 0.0) {
        op.row.push_back(r);
        op.col.push_back(c);
        op.val.push_back(v);
      }
    }
  }
  return op;
}

}  // namespace

SparseOperator symtop_costheta(const MBlockBasis& basis) { return symtop_dl0(basis, 1); }
SparseOperator symtop_cos2theta(const MBlockBasis& basis) { return symtop_dl0(basis, 2); }

void BlockEngine::Csr::mul(const Eigen::MatrixXd& x, Eigen::MatrixXd& y) const {
  y.setZero();
  int n = static_cast<int>(ptr.size()) - 1;
  for (int r = 0; r < n; ++r)
    for (int p = ptr[r]; p < ptr[r + 1]; ++p) y.row(r) += val[p] * x.row(idx[p]);
}

namespace {

void to_csr(const SparseOperator& op, std::vector<int>& ptr, std::vector<int>& idx,
            std::vector<double>& val) {
  ptr.assign(op.dim + 1, 0);
  for (int r : op.row) ptr[r + 1]++;
  for (int r = 0; r < op.dim; ++r) ptr[r + 1] += ptr[r];
  idx.resize(op.val.size());
  val.resize(op.val.size());
  std::vector<int> cur(ptr.begin(), ptr.end() - 1);
  for (size_t k = 0; k < op.val.size(); ++k) {
    int p = cur[op.row[k]]++;
    idx[p] = op.col[k];
    val[p] = op.val[k];
  }
}

}  // namespace

BlockEngine::BlockEngine(const AngularTables& tab, int m, int jmax, const Pulse& pulse,
                         const PropagationConfig& cfg)
    : m_(m), jmax_(jmax), pulse_(pulse), cfg_(cfg) {
  cfg.validate();
  if (m < 0) throw ConfigError("block engine: M must be >= 0");
  if (jmax < m) throw ConfigError("block engine: jmax must be >= M");
  if (tab.jmax() < jmax)
    throw ConfigError("block engine: angular tables truncated below jmax");
  tab_ = &tab;
  basis_ = build_mblock_basis(m, jmax);
  mu_cm1_per_MVcm_ = tab.rc.mu * constants::kDebyeMVcm_to_cm1;

  SparseOperator h0 = asym_hamiltonian(basis_, tab.rc);
  to_csr(h0, h0_.ptr, h0_.idx, h0_.val);
  to_csr(symtop_costheta(basis_), d1_.ptr, d1_.idx, d1_.val);
  to_csr(symtop_cos2theta(basis_), d2_.ptr, d2_.idx, d2_.val);

  if (cfg.method == PropagationMethod::SplitOperator) {
    for (int K = -jmax; K <= jmax; ++K) {
      int jlo = std::max(std::abs(K), m);
      int len = jmax - jlo + 1;
      Chain ch;
      ch.rows.resize(len);
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(len, len);
      for (int a = 0; a < len; ++a) {
        int J = jlo + a;
        ch.rows[a] = basis_.index(J, K);
        SymTopKet ket{J, K, m};
        t(a, a) = direction_cosine_element(ket, 1, 0, 0, ket);
        if (a + 1 < len) {
          SymTopKet bra{J + 1, K, m};
          t(a + 1, a) = t(a, a + 1) = direction_cosine_element(bra, 1, 0, 0, ket);
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      ch.vecs = es.eigenvectors();
      ch.vals = es.eigenvalues();
      chains_.push_back(std::move(ch));
    }
  }

  n_samples_ = trace_sample_count(cfg);
}

double BlockEngine::sample_time(int i) const { return trace_sample_time(cfg_, i); }

void BlockEngine::set_columns(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) {
  if (re.rows() != dim() || im.rows() != dim() || re.cols() != im.cols())
    throw ConfigError("block engine: column shape mismatch");
  re_ = re;
  im_ = im;
  norm0_ = column_norms();
  isample_ = 0;
}

void BlockEngine::set_eigenstate_columns(const std::vector<std::pair<int, int>>& jtau) {
  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(dim(), static_cast<int>(jtau.size()));
  for (size_t c = 0; c < jtau.size(); ++c) {
    auto [J, tau] = jtau[c];
    if (J < m_ || J > jmax_ || tau < 1 || tau > 2 * J + 1)
      throw ConfigError("block engine: eigenstate outside block");
    re.col(c).segment(basis_.joffset[J - m_], 2 * J + 1) =
        tab_->jblocks[J].coeffs.col(tau - 1);
  }
  set_columns(re, Eigen::MatrixXd::Zero(dim(), static_cast<int>(jtau.size())));
}

const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& BlockEngine::drift(
    double delta) {
  auto it = drift_cache_.find(delta);
  if (it != drift_cache_.end()) return it->second;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> g;
  g.reserve(jmax_ - m_ + 1);
  for (int J = m_; J <= jmax_; ++J) {
    const JBlockEigen& jb = tab_->jblocks[J];
    Eigen::ArrayXd phi = constants::kPhase_rad_ps_per_cm1 * delta * jb.energies.array();
    Eigen::MatrixXd bc = jb.coeffs * phi.cos().matrix().asDiagonal();
    Eigen::MatrixXd bs = jb.coeffs * phi.sin().matrix().asDiagonal();
    Eigen::MatrixXd gre = bc * jb.coeffs.transpose();
    Eigen::MatrixXd gim = -(bs * jb.coeffs.transpose());
    g.emplace_back(std::move(gre), std::move(gim));
  }
  return drift_cache_.emplace(delta, std::move(g)).first->second;
}

void BlockEngine::apply_drift(double delta) {
  const auto& g = drift(delta);
  int nc = ncols();
  for (int J = m_; J <= jmax_; ++J) {
    int off = basis_.joffset[J - m_];
    int len = 2 * J + 1;
    const auto& [gre, gim] = g[J - m_];
    auto xre = re_.middleRows(off, len);
    auto xim = im_.middleRows(off, len);
    s1_.topLeftCorner(len, nc).noalias() = gre * xre;
    s1_.topLeftCorner(len, nc).noalias() -= gim * xim;
    s2_.topLeftCorner(len, nc).noalias() = gre * xim;
    s2_.topLeftCorner(len, nc).noalias() += gim * xre;
    xre = s1_.topLeftCorner(len, nc);
    xim = s2_.topLeftCorner(len, nc);
  }
}

void BlockEngine::apply_kick(double alpha) {
  int nc = ncols();
  for (const Chain& ch : chains_) {
    int len = static_cast<int>(ch.rows.size());
    for (int a = 0; a < len; ++a) {
      s1_.row(a).head(nc) = re_.row(ch.rows[a]);
      s2_.row(a).head(nc) = im_.row(ch.rows[a]);
    }
    s3_.topLeftCorner(len, nc).noalias() =
        ch.vecs.transpose() * s1_.topLeftCorner(len, nc);
    s4_.topLeftCorner(len, nc).noalias() =
        ch.vecs.transpose() * s2_.topLeftCorner(len, nc);
    for (int a = 0; a < len; ++a) {
      double c = std::cos(alpha * ch.vals[a]);
      double s = std::sin(alpha * ch.vals[a]);
      for (int j = 0; j < nc; ++j) {
        double ur = s3_(a, j), ui = s4_(a, j);
        s3_(a, j) = ur * c - ui * s;
        s4_(a, j) = ur * s + ui * c;
      }
    }
    s1_.topLeftCorner(len, nc).noalias() = ch.vecs * s3_.topLeftCorner(len, nc);
    s2_.topLeftCorner(len, nc).noalias() = ch.vecs * s4_.topLeftCorner(len, nc);
    for (int a = 0; a < len; ++a) {
      re_.row(ch.rows[a]) = s1_.row(a).head(nc);
      im_.row(ch.rows[a]) = s2_.row(a).head(nc);
    }
  }
}

void BlockEngine::split_interval(double t0, double h_total) {
  int n_sub = static_cast<int>(std::ceil(h_total / cfg_.dt_ps - 1e-9));
  double hs = h_total / n_sub;
  apply_drift(0.5 * hs);
  for (int j = 0; j < n_sub; ++j) {
    double tm = t0 + (j + 0.5) * hs;
    double e = pulse_.field_MV_cm(tm);
    if (e != 0.0)
      apply_kick(constants::kPhase_rad_ps_per_cm1 * mu_cm1_per_MVcm_ * e * hs);
    apply_drift(j + 1 < n_sub ? hs : 0.5 * hs);
  }
}

void BlockEngine::hmul(double t, const Eigen::MatrixXd& xre, const Eigen::MatrixXd& xim,
                       Eigen::MatrixXd& yre, Eigen::MatrixXd& yim) const {
  // y = -i * 2 pi c * (H0 - mu E(t) cos theta) x
  double e = pulse_.field_MV_cm(t);
  h0_.mul(xim, yre);
  h0_.mul(xre, yim);
  if (e != 0.0) {
    d1_.mul(xim, rk_tmp_);
    yre.noalias() -= (mu_cm1_per_MVcm_ * e) * rk_tmp_;
    d1_.mul(xre, rk_tmp_);
    yim.noalias() -= (mu_cm1_per_MVcm_ * e) * rk_tmp_;
  }
  yre *= constants::kPhase_rad_ps_per_cm1;
  yim *= -constants::kPhase_rad_ps_per_cm1;
}

void BlockEngine::rk4_step(double t, double h) {
  hmul(t, re_, im_, k1r_, k1i_);
  ar_ = re_ + 0.5 * h * k1r_;
  ai_ = im_ + 0.5 * h * k1i_;
  hmul(t + 0.5 * h, ar_, ai_, k2r_, k2i_);
  ar_ = re_ + 0.5 * h * k2r_;
  ai_ = im_ + 0.5 * h * k2i_;
  hmul(t + 0.5 * h, ar_, ai_, k3r_, k3i_);
  ar_ = re_ + h * k3r_;
  ai_ = im_ + h * k3i_;
  hmul(t + h, ar_, ai_, k4r_, k4i_);
  re_ += (h / 6.0) * (k1r_ + 2.0 * k2r_ + 2.0 * k3r_ + k4r_);
  im_ += (h / 6.0) * (k1i_ + 2.0 * k2i_ + 2.0 * k3i_ + k4i_);
}

void BlockEngine::rk4_interval(double t0, double h_total) {
  if (k1r_.rows() != dim() || k1r_.cols() != ncols()) {
    for (Eigen::MatrixXd* p :
         {&k1r_, &k1i_, &k2r_, &k2i_, &k3r_, &k3i_, &k4r_, &k4i_, &ar_, &ai_, &rk_tmp_})
      p->resize(dim(), ncols());
  }
  int n_sub = static_cast<int>(std::ceil(h_total / cfg_.dt_ps - 1e-9));
  double hs = h_total / n_sub;
  for (int j = 0; j < n_sub; ++j) rk4_step(t0 + j * hs, hs);
}

void BlockEngine::advance() {
  if (isample_ + 1 >= n_samples_)
    throw ConfigError("block engine: advance past the last sample");
  double t0 = sample_time(isample_);
  double t1 = sample_time(isample_ + 1);
  if (cfg_.method == PropagationMethod::Rk4) {
    rk4_interval(t0, t1 - t0);
  } else {
    if (s1_.rows() < 2 * jmax_ + 1 || s1_.cols() < ncols()) {
      for (Eigen::MatrixXd* p : {&s1_, &s2_, &s3_, &s4_})
        p->resize(2 * jmax_ + 1, ncols());
    }
    bool active = t0 < pulse_.end_ps() && t1 > pulse_.start_ps();
    if (active)
      split_interval(t0, t1 - t0);
    else
      apply_drift(t1 - t0);
  }
  ++isample_;
}

void BlockEngine::diag_observables(Eigen::VectorXd& cos1, Eigen::VectorXd& cos2) const {
  obs_re_.resize(dim(), ncols());
  obs_im_.resize(dim(), ncols());
  cos1.resize(ncols());
  cos2.resize(ncols());
  d1_.mul(re_, obs_re_);
  d1_.mul(im_, obs_im_);
  for (int c = 0; c < ncols(); ++c)
    cos1[c] = re_.col(c).dot(obs_re_.col(c)) + im_.col(c).dot(obs_im_.col(c));
  d2_.mul(re_, obs_re_);
  d2_.mul(im_, obs_im_);
  for (int c = 0; c < ncols(); ++c)
    cos2[c] = re_.col(c).dot(obs_re_.col(c)) + im_.col(c).dot(obs_im_.col(c));
}

void BlockEngine::cross_observables(Eigen::MatrixXd& o1re, Eigen::MatrixXd& o1im,
                                    Eigen::MatrixXd& o2re, Eigen::MatrixXd& o2im,
                                    bool with_alignment) const {
  obs_re_.resize(dim(), ncols());
  obs_im_.resize(dim(), ncols());
  d1_.mul(re_, obs_re_);
  d1_.mul(im_, obs_im_);
  o1re.noalias() = re_.transpose() * obs_re_;
  o1re.noalias() += im_.transpose() * obs_im_;
  o1im.noalias() = re_.transpose() * obs_im_;
  o1im.noalias() -= im_.transpose() * obs_re_;
  if (!with_alignment) return;
  d2_.mul(re_, obs_re_);
  d2_.mul(im_, obs_im_);
  o2re.noalias() = re_.transpose() * obs_re_;
  o2re.noalias() += im_.transpose() * obs_im_;
  o2im.noalias() = re_.transpose() * obs_im_;
  o2im.noalias() -= im_.transpose() * obs_re_;
}

Eigen::VectorXd BlockEngine::energies() const {
  obs_re_.resize(dim(), ncols());
  obs_im_.resize(dim(), ncols());
  h0_.mul(re_, obs_re_);
  h0_.mul(im_, obs_im_);
  Eigen::VectorXd e(ncols());
  for (int c = 0; c < ncols(); ++c)
    e[c] = re_.col(c).dot(obs_re_.col(c)) + im_.col(c).dot(obs_im_.col(c));
  return e;
}

Eigen::VectorXd BlockEngine::column_norms() const {
  return (re_.colwise().squaredNorm() + im_.colwise().squaredNorm())
      .cwiseSqrt()
      .transpose();
}

Eigen::VectorXd BlockEngine::column_leakages() const {
  int off = basis_.joffset[jmax_ - m_];
  int len = 2 * jmax_ + 1;
  Eigen::VectorXd leak(ncols());
  for (int c = 0; c < ncols(); ++c)
    leak[c] = re_.col(c).segment(off, len).squaredNorm() +
              im_.col(c).segment(off, len).squaredNorm();
  return leak;
}

double BlockEngine::max_leakage() const { return column_leakages().maxCoeff(); }

void BlockEngine::check_health(const char* label) const {
  double drift = (column_norms() - norm0_).cwiseAbs().maxCoeff();
  if (drift > cfg_.norm_drift_tol)
    throw NumericalAbort("norm drift " + std::to_string(drift) + " in " + label +
                         " at t = " + std::to_string(time()) + " ps");
  double leak = max_leakage();
  if (leak > cfg_.leakage_tol)
    throw NumericalAbort("top-shell population " + std::to_string(leak) + " in " +
                         label + " at t = " + std::to_string(time()) +
                         " ps; increase j_buffer");
}

ObservableTrace exact_ensemble_run(const RotorConstants& rc, const ThermalEnsemble& ens,
                                   const Pulse& pulse, const PropagationConfig& cfg) {
  rc.validate();
  cfg.validate();
  int n_states = ens.state_count();
  if (n_states > cfg.exact_state_guard)
    throw GuardExceeded("exact ensemble of " + std::to_string(n_states) +
                        " states exceeds the guard of " +
                        std::to_string(cfg.exact_state_guard) +
                        "; use the rpwf method");
  int jmax = ens.max_kept_j() + cfg.j_buffer;
  AngularTables tab = build_angular_tables(rc, jmax);

  int n = trace_sample_count(cfg);
  ObservableTrace tr;
  tr.t.resize(n);
  tr.orientation.assign(n, 0.0);
  tr.alignment.assign(n, 0.0);
  for (int i = 0; i < n; ++i) tr.t[i] = trace_sample_time(cfg, i);

  Eigen::VectorXd c1, c2;
  for (int m = 0; m <= ens.max_kept_j(); ++m) {
    std::vector<std::pair<int, int>> jtau;
    std::vector<double> wt;
    for (const ThermalLevel& l : ens.levels) {
      if (l.J < m) continue;
      jtau.emplace_back(l.J, l.tau);
      wt.push_back(l.weight / (2 * l.J + 1) * (m > 0 ? 2.0 : 1.0));
    }
    if (jtau.empty()) continue;
    BlockEngine eng(tab, m, jmax, pulse, cfg);
    eng.set_eigenstate_columns(jtau);
    std::string label = "exact block M=" + std::to_string(m);
    for (int i = 0; i < n; ++i) {
      if (i > 0) eng.advance();
      eng.diag_observables(c1, c2);
      for (size_t c = 0; c < wt.size(); ++c) {
        tr.orientation[i] += wt[c] * c1[static_cast<int>(c)];
        tr.alignment[i] += wt[c] * c2[static_cast<int>(c)];
      }
      eng.check_health(label.c_str());
    }
  }
  return tr;
}

}  // namespace rotorwave
