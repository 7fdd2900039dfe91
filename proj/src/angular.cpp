#include "rotorwave/angular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rotorwave {

namespace {

// log-factorial table in long double; alternating Racah sums stay accurate
// far beyond the J range used here
const long double* logfac_table(int need) {
  static std::vector<long double> tab = [] {
    std::vector<long double> t(1024, 0.0L);
    for (std::size_t i = 2; i < t.size(); ++i)
      t[i] = t[i - 1] + std::log(static_cast<long double>(i));
    return t;
  }();
  if (need >= static_cast<int>(tab.size()))
    throw ConfigError("wigner3j: factorial table exceeded (j too large)");
  return tab.data();
}

double wang_offdiag(int J, int K, const RotorConstants& rc) {
  // <J K+2|H0|J K>
  double jj = static_cast<double>(J) * (J + 1);
  double a = jj - static_cast<double>(K) * (K + 1);
  double b = jj - static_cast<double>(K + 1) * (K + 2);
  return 0.25 * (rc.B - rc.C) * std::sqrt(a * b);
}

double wang_diag(int J, int K, const RotorConstants& rc) {
  double jj = static_cast<double>(J) * (J + 1);
  return 0.5 * (rc.B + rc.C) * (jj - K * K) + rc.A * K * K;
}

struct RawVec {
  double energy;
  int parity;
  Eigen::VectorXd coeffs;  // over K = -J..J
  int dom_k;               // signed K of first maximal-|coeff| entry
};

void sort_triplets(SparseOperator& op) {
  std::vector<int> order(op.row.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (op.row[a] != op.row[b]) return op.row[a] < op.row[b];
    return op.col[a] < op.col[b];
  });
  SparseOperator s;
  s.row.reserve(order.size());
  s.col.reserve(order.size());
  s.val.reserve(order.size());
  for (int i : order) {
    s.row.push_back(op.row[i]);
    s.col.push_back(op.col[i]);
    s.val.push_back(op.val[i]);
  }
  op.row = std::move(s.row);
  op.col = std::move(s.col);
  op.val = std::move(s.val);
}

void fix_sign_and_dom(RawVec& v, int J) {
  // near-degenerate doublets mix +-K magnitudes at ~eps/gap, so the
  // "dominant coefficient" tie needs a relative tolerance, not an exact max
  double mx = v.coeffs.cwiseAbs().maxCoeff();
  int best = 0;
  for (int i = 0; i < 2 * J + 1; ++i)
    if (std::abs(v.coeffs[i]) >= mx * (1.0 - 1e-9)) {
      best = i;
      break;
    }
  if (v.coeffs[best] < 0) v.coeffs = -v.coeffs;
  v.dom_k = best - J;
}

bool raw_less(const RawVec& a, const RawVec& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  if (a.dom_k != b.dom_k) return a.dom_k < b.dom_k;
  for (int i = 0; i < a.coeffs.size(); ++i)
    if (a.coeffs[i] != b.coeffs[i]) return a.coeffs[i] < b.coeffs[i];
  return false;
}

}  // namespace

void RotorConstants::validate() const {
  if (!(A >= B && B >= C && C > 0.0))
    throw ConfigError("rotor constants must satisfy A >= B >= C > 0");
  if (mu < 0.0) throw ConfigError("dipole moment must be non-negative");
}

MBlockBasis build_mblock_basis(int M, int Jmax) {
  if (Jmax < std::abs(M))
    throw ConfigError("build_mblock_basis: Jmax < |M|");
  MBlockBasis b;
  b.M = M;
  b.Jmax = Jmax;
  for (int J = std::abs(M); J <= Jmax; ++J) {
    b.joffset.push_back(static_cast<int>(b.states.size()));
    for (int K = -J; K <= J; ++K) b.states.push_back({J, K, M});
  }
  return b;
}

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (j1 < 0 || j2 < 0 || j3 < 0)
    throw ConfigError("wigner3j: negative angular momentum");
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;

  const long double* lf = logfac_table(j1 + j2 + j3 + 1);
  long double logdelta = lf[j1 + j2 - j3] + lf[j1 - j2 + j3] + lf[-j1 + j2 + j3] -
                         lf[j1 + j2 + j3 + 1];
  long double logpref = lf[j1 + m1] + lf[j1 - m1] + lf[j2 + m2] + lf[j2 - m2] +
                        lf[j3 + m3] + lf[j3 - m3];

  int tmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  int tmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  long double sum = 0.0L;
  for (int t = tmin; t <= tmax; ++t) {
    long double logden = lf[t] + lf[j3 - j2 + m1 + t] + lf[j3 - j1 - m2 + t] +
                         lf[j1 + j2 - j3 - t] + lf[j1 - m1 - t] + lf[j2 + m2 - t];
    long double term = std::exp(0.5L * (logdelta + logpref) - logden);
    sum += (t % 2 == 0) ? term : -term;
  }
  int phase = j1 - j2 - m3;
  double sign = (((phase % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
  return static_cast<double>(sign * sum);
}

double direction_cosine_element(const SymTopKet& bra, int l, int m, int k,
                                const SymTopKet& ket) {
  if (l != 1 && l != 2)
    throw ConfigError("direction_cosine_element: only l = 1, 2 supported");
  if (std::abs(m) > l || std::abs(k) > l)
    throw ConfigError("direction_cosine_element: |m|, |k| must not exceed l");
  auto check = [](const SymTopKet& s) {
    if (s.J < 0 || std::abs(s.K) > s.J || std::abs(s.M) > s.J)
      throw ConfigError("direction_cosine_element: invalid |J K M>");
  };
  check(bra);
  check(ket);
  if (bra.M != ket.M + m || bra.K != ket.K + k) return 0.0;

  double pref = std::sqrt(static_cast<double>(2 * ket.J + 1) *
                          static_cast<double>(2 * bra.J + 1));
  int phase = bra.M - bra.K;
  double sign = (((phase % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
  return pref * sign * wigner3j(ket.J, l, bra.J, ket.M, m, -bra.M) *
         wigner3j(ket.J, l, bra.J, ket.K, k, -bra.K);
}

Eigen::MatrixXd asym_hamiltonian_jblock(int J, const RotorConstants& rc) {
  int n = 2 * J + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int K = -J; K <= J; ++K) {
    h(K + J, K + J) = wang_diag(J, K, rc);
    if (K + 2 <= J) {
      double v = wang_offdiag(J, K, rc);
      h(K + 2 + J, K + J) = v;
      h(K + J, K + 2 + J) = v;
    }
  }
  return h;
}

// Wang reduction: H0 commutes with K -> -K, so each J block splits into four
// even/odd x symmetric/antisymmetric sub-blocks.  Diagonalizing those keeps
// the K parity of every eigenvector exact even for quasi-degenerate doublets.
JBlockEigen diagonalize_jblock(int J, const RotorConstants& rc) {
  rc.validate();
  std::vector<RawVec> raw;
  raw.reserve(2 * J + 1);

  auto solve_sub = [&](const std::vector<int>& ks, int parity, bool with_k0) {
    int n = static_cast<int>(ks.size());
    if (n == 0) return;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      int K = ks[i];
      h(i, i) = wang_diag(J, K, rc);
      if (K == 1) h(i, i) += parity * wang_offdiag(J, -1, rc);
      if (i + 1 < n) {
        double v = wang_offdiag(J, K, rc);
        if (with_k0 && K == 0) v *= std::sqrt(2.0);
        h(i + 1, i) = v;
        h(i, i + 1) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int v = 0; v < n; ++v) {
      RawVec r;
      r.energy = es.eigenvalues()[v];
      r.parity = parity;
      r.coeffs = Eigen::VectorXd::Zero(2 * J + 1);
      for (int i = 0; i < n; ++i) {
        int K = ks[i];
        double w = es.eigenvectors()(i, v);
        if (K == 0) {
          r.coeffs[J] = w;
        } else {
          r.coeffs[K + J] = w * inv_sqrt2;
          r.coeffs[-K + J] = parity * w * inv_sqrt2;
        }
      }
      fix_sign_and_dom(r, J);
      raw.push_back(std::move(r));
    }
  };

  std::vector<int> even_with0, even, odd;
  for (int K = 0; K <= J; K += 2) even_with0.push_back(K);
  for (int K = 2; K <= J; K += 2) even.push_back(K);
  for (int K = 1; K <= J; K += 2) odd.push_back(K);
  solve_sub(even_with0, +1, true);
  solve_sub(even, -1, false);
  solve_sub(odd, +1, false);
  solve_sub(odd, -1, false);

  std::sort(raw.begin(), raw.end(), raw_less);

  JBlockEigen out;
  out.J = J;
  out.energies.resize(2 * J + 1);
  out.coeffs.resize(2 * J + 1, 2 * J + 1);
  out.kparity.resize(2 * J + 1);
  for (int t = 0; t < 2 * J + 1; ++t) {
    out.energies[t] = raw[t].energy;
    out.coeffs.col(t) = raw[t].coeffs;
    out.kparity[t] = raw[t].parity;
  }
  return out;
}

AngularTables build_angular_tables(const RotorConstants& rc, int Jmax) {
  rc.validate();
  if (Jmax < 0) throw ConfigError("build_angular_tables: Jmax < 0");
  AngularTables t;
  t.rc = rc;
  t.jblocks.reserve(Jmax + 1);
  for (int J = 0; J <= Jmax; ++J) t.jblocks.push_back(diagonalize_jblock(J, rc));
  return t;
}

Eigen::MatrixXd SparseOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < nnz(); ++i) m(row[i], col[i]) = val[i];
  return m;
}

void SparseOperator::assert_hermitian(double tol) const {
  Eigen::MatrixXd m = dense();
  double d = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (d > tol)
    throw NumericalAbort("operator not hermitian, max asymmetry " + std::to_string(d));
}

SparseOperator asym_hamiltonian(const MBlockBasis& basis, const RotorConstants& rc) {
  rc.validate();
  SparseOperator op;
  op.M = basis.M;
  op.basis = BasisTag::SymTop;
  op.dim = basis.dim();
  for (int i = 0; i < basis.dim(); ++i) {
    const SymTopKet& s = basis.states[i];
    op.row.push_back(i);
    op.col.push_back(i);
    op.val.push_back(wang_diag(s.J, s.K, rc));
    if (s.K + 2 <= s.J) {
      int j = basis.index(s.J, s.K + 2);
      double v = wang_offdiag(s.J, s.K, rc);
      op.row.push_back(i);
      op.col.push_back(j);
      op.val.push_back(v);
      op.row.push_back(j);
      op.col.push_back(i);
      op.val.push_back(v);
    }
  }
  sort_triplets(op);
  return op;
}

std::vector<AsymEigenstate> diagonalize_block(const SparseOperator& h,
                                              const MBlockBasis& basis) {
  if (h.dim != basis.dim())
    throw ConfigError("diagonalize_block: operator/basis dimension mismatch");
  Eigen::MatrixXd m = h.dense();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalAbort("diagonalize_block: non-hermitian input");
  for (int i = 0; i < h.nnz(); ++i)
    if (basis.states[h.row[i]].J != basis.states[h.col[i]].J && h.val[i] != 0.0)
      throw ConfigError("diagonalize_block: operator couples different J");

  std::vector<AsymEigenstate> out;
  int absM = std::abs(basis.M);
  for (int J = absM; J <= basis.Jmax; ++J) {
    int off = basis.index(J, -J);
    int n = 2 * J + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.block(off, off, n, n));
    std::vector<RawVec> raw(n);
    for (int v = 0; v < n; ++v) {
      raw[v].energy = es.eigenvalues()[v];
      raw[v].parity = 0;
      raw[v].coeffs = es.eigenvectors().col(v);
      fix_sign_and_dom(raw[v], J);
    }
    std::sort(raw.begin(), raw.end(), raw_less);
    for (int v = 0; v < n; ++v) {
      AsymEigenstate st;
      st.J = J;
      st.M = basis.M;
      st.tau = v + 1;
      st.energy = raw[v].energy;
      st.coeffs = raw[v].coeffs;
      out.push_back(std::move(st));
    }
  }
  return out;
}

namespace {

SparseOperator build_eigenbasis_operator(const MBlockBasis& basis,
                                         const std::vector<AsymEigenstate>& eig, int l) {
  int n = static_cast<int>(eig.size());
  SparseOperator op;
  op.M = basis.M;
  op.basis = BasisTag::AsymEigen;
  op.dim = n;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const AsymEigenstate& s1 = eig[a];
      const AsymEigenstate& s2 = eig[b];
      if (std::abs(s1.J - s2.J) > l) continue;
      double v = 0.0;
      int klo = std::max(-s1.J, -s2.J), khi = std::min(s1.J, s2.J);
      for (int K = klo; K <= khi; ++K) {
        double c1 = s1.coeffs[K + s1.J];
        double c2 = s2.coeffs[K + s2.J];
        if (c1 == 0.0 || c2 == 0.0) continue;
        v += c1 * c2 *
             direction_cosine_element({s1.J, K, s1.M}, l, 0, 0, {s2.J, K, s2.M});
      }
      if (l == 2) v = (a == b ? 1.0 / 3.0 : 0.0) + (2.0 / 3.0) * v;
      if (v == 0.0) continue;
      op.row.push_back(a);
      op.col.push_back(b);
      op.val.push_back(v);
      if (a != b) {
        op.row.push_back(b);
        op.col.push_back(a);
        op.val.push_back(v);
      }
    }
  }
  sort_triplets(op);
  return op;
}

}  // namespace

SparseOperator build_costheta_operator(const MBlockBasis& basis,
                                       const std::vector<AsymEigenstate>& eig) {
  return build_eigenbasis_operator(basis, eig, 1);
}

SparseOperator build_cos2theta_operator(const MBlockBasis& basis,
                                        const std::vector<AsymEigenstate>& eig) {
  return build_eigenbasis_operator(basis, eig, 2);
}

double asym_matrix_element(const AngularTables& t, int l, int M, int J1, int tau1,
                           int J2, int tau2) {
  if (J1 > t.jmax() || J2 > t.jmax())
    throw ConfigError("asym_matrix_element: J beyond tables");
  const JBlockEigen& b1 = t.jblocks[J1];
  const JBlockEigen& b2 = t.jblocks[J2];
  double raw = 0.0;
  int klo = std::max(-J1, -J2), khi = std::min(J1, J2);
  for (int K = klo; K <= khi; ++K) {
    double c1 = b1.coeffs(K + J1, tau1 - 1);
    double c2 = b2.coeffs(K + J2, tau2 - 1);
    if (c1 == 0.0 || c2 == 0.0) continue;
    raw += c1 * c2 * direction_cosine_element({J1, K, M}, l, 0, 0, {J2, K, M});
  }
  if (l == 2) return (J1 == J2 && tau1 == tau2 ? 1.0 / 3.0 : 0.0) + (2.0 / 3.0) * raw;
  return raw;
}

std::vector<AsymEigenstate> block_eigenstates(const AngularTables& t, int M, int Jmax) {
  if (Jmax > t.jmax()) throw ConfigError("block_eigenstates: Jmax beyond tables");
  std::vector<AsymEigenstate> out;
  for (int J = std::abs(M); J <= Jmax; ++J) {
    const JBlockEigen& b = t.jblocks[J];
    for (int tau = 1; tau <= 2 * J + 1; ++tau) {
      AsymEigenstate st;
      st.J = J;
      st.M = M;
      st.tau = tau;
      st.energy = b.energies[tau - 1];
      st.coeffs = b.coeffs.col(tau - 1);
      out.push_back(std::move(st));
    }
  }
  return out;
}

}  // namespace rotorwave
