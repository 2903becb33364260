#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mfsolv/ops.hpp"

namespace mfs {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Dense basis convention: occupation / spin bitstrings, mode (qubit) 1 is the
// least significant bit, bit value 1 means occupied (spin down), so
// a_p^+ a_p -> diag(0, 1) and z_p -> diag(1, -1) on a single mode.
std::int64_t dense_dim(Family fam, int n);  // throws capacity_error beyond the cap

Mat to_matrix(const OpPoly& p, int n = 0);
Mat to_matrix_serial(const OpPoly& p, int n = 0);

// Applies one canonical term to a basis state; returns false when the state
// is annihilated, otherwise updates bits/amp in place.
bool apply_term_to_state(const FactorSeq& factors, Family fam, std::uint64_t& bits, cplx& amp);

Vec basis_state(int n, std::uint64_t bits);

struct EigenSystem {
    Eigen::VectorXd values;                 // ascending
    Mat vectors;                            // columns aligned with values
    double hnorm = 0.0;                     // max |eigenvalue|
    std::vector<std::vector<int>> groups;   // near-degenerate clusters
    int group_of(int eigen_index) const;
};

EigenSystem exact_eigensystem(const Mat& h);

cplx expectation(const Mat& h, const Vec& v);
double variance(const Mat& h, const Vec& v);  // hermitian h, normalized internally

struct MeanFieldCheck {
    bool ok = false;
    double deviation = 0.0;
    std::string detail;
};

// Tests whether a normalized state lies on the mean-field manifold of the
// family: a product state over qubits, or a (quasi-particle) determinant
// detected through the idempotency of its (generalized) one-body density
// matrix.
MeanFieldCheck mf_state_check(const Vec& v, Family fam, int n);

}
