#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rotorwave/errors.hpp"

// Rigid asymmetric-top angular machinery: symmetric-top basis |J K M> with K
// referred to the molecular a axis, Wigner 3j symbols, direction-cosine matrix
// elements, and the field-free Hamiltonian
//   <J K|H0|J K>     = ((B+C)/2) [J(J+1) - K^2] + A K^2
//   <J K+-2|H0|J K>  = ((B-C)/4) sqrt([J(J+1)-K(K+-1)][J(J+1)-(K+-1)(K+-2)])

namespace rotorwave {

struct RotorConstants {
  double A = 2.028;    // cm^-1
  double B = 0.3442;   // cm^-1
  double C = 0.2935;   // cm^-1
  double mu = 1.62;    // Debye, along the a axis
  void validate() const;
};

struct SymTopKet {
  int J = 0, K = 0, M = 0;
};

// basis for one lab-frame M block: (J,K) with J = |M|..Jmax, K = -J..J,
// ordered by ascending J then ascending K
struct MBlockBasis {
  int M = 0;
  int Jmax = 0;
  std::vector<SymTopKet> states;
  std::vector<int> joffset;  // joffset[J-|M|] = index of (J, K=-J)

  int dim() const { return static_cast<int>(states.size()); }
  int index(int J, int K) const { return joffset[J - std::abs(M)] + (K + J); }
};

MBlockBasis build_mblock_basis(int M, int Jmax);

// Wigner 3j symbol; returns 0 when a selection rule fails, throws on negative j
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// <J'K'M'| D^l_{m k} |JKM> for l in {1,2}:
//   sqrt[(2J+1)(2J'+1)] (-1)^(M'-K') 3j(J l J'; M m -M') 3j(J l J'; K k -K')
// cos(theta) between the lab Z axis and the a axis is D^1_{0 0}
double direction_cosine_element(const SymTopKet& bra, int l, int m, int k,
                                const SymTopKet& ket);

// eigen-decomposition of one J block of H0 (independent of M).
// tau = 1..2J+1 orders eigenvalues ascending; each eigenvector has definite
// parity under K -> -K (the Wang reduction guarantees this exactly).
struct JBlockEigen {
  int J = 0;
  Eigen::VectorXd energies;      // (2J+1), ascending
  Eigen::MatrixXd coeffs;        // coeffs(K+J, tau-1)
  std::vector<int> kparity;      // +1 or -1 per tau
};

Eigen::MatrixXd asym_hamiltonian_jblock(int J, const RotorConstants& rc);
JBlockEigen diagonalize_jblock(int J, const RotorConstants& rc);

struct AngularTables {
  RotorConstants rc;
  std::vector<JBlockEigen> jblocks;  // J = 0..jmax
  int jmax() const { return static_cast<int>(jblocks.size()) - 1; }
};

AngularTables build_angular_tables(const RotorConstants& rc, int Jmax);

enum class BasisTag { SymTop, AsymEigen };

// real symmetric operator on one M block, triplet storage sorted by (row, col)
struct SparseOperator {
  int M = 0;
  BasisTag basis = BasisTag::SymTop;
  int dim = 0;
  std::vector<int> row, col;
  std::vector<double> val;

  int nnz() const { return static_cast<int>(val.size()); }
  Eigen::MatrixXd dense() const;
  void assert_hermitian(double tol = 1e-12) const;
};

// H0 on an M block in the symmetric-top basis
SparseOperator asym_hamiltonian(const MBlockBasis& basis, const RotorConstants& rc);

struct AsymEigenstate {
  int J = 0, M = 0, tau = 1;
  double energy = 0.0;
  Eigen::VectorXd coeffs;  // over K = -J..J
};

// diagonalize a symmetric-top-basis M-block Hamiltonian.  Ordering within a J:
// tau ascending by energy; exact ties broken by the K of the dominant
// coefficient, then lexicographically.  Sign: the first coefficient within a
// 1e-9 relative tolerance of the maximum magnitude is made positive (the
// tolerance keeps the convention stable across quasi-degenerate K doublets).
std::vector<AsymEigenstate> diagonalize_block(const SparseOperator& h,
                                              const MBlockBasis& basis);

// cos(theta) / cos^2(theta) on an M block, transformed into the asymmetric
// eigenbasis spanned by `eig` (states ordered as given).  cos couples
// |dJ| <= 1, cos^2 couples |dJ| <= 2.
SparseOperator build_costheta_operator(const MBlockBasis& basis,
                                       const std::vector<AsymEigenstate>& eig);
SparseOperator build_cos2theta_operator(const MBlockBasis& basis,
                                        const std::vector<AsymEigenstate>& eig);

// eigenbasis matrix element <J1 tau1, M| op |J2 tau2, M> built from J-block
// eigenvectors; op = 1 for cos(theta), 2 for cos^2(theta)
double asym_matrix_element(const AngularTables& t, int l, int M, int J1, int tau1,
                           int J2, int tau2);

// convenience: all eigenstates of one M block up to Jmax, ordered (J, tau)
std::vector<AsymEigenstate> block_eigenstates(const AngularTables& t, int M, int Jmax);

}  // namespace rotorwave
