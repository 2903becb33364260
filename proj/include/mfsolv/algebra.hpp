#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mfsolv/ops.hpp"

namespace mfs {

struct GenInfo {
    enum class Kind {
        one_body_plane,   // (E_pq - E_qp)/2, or i(E_pq + E_qp)/2 when primed
        one_body_phase,   // i E_pp
        majorana_pair,    // gamma_j gamma_k / 2
        majorana_zero,    // -i gamma_j / 2
        qubit_axis,       // i x_k, i y_k or i z_k
        generic
    };
    Kind kind = Kind::generic;
    int p = 0, q = 0;               // indices (meaning depends on kind)
    char axis = ' ';                // qubit_axis only
    bool primed = false;            // one_body_plane only
    std::string label;
    std::vector<double> spectrum;   // explicit CSA labels, optional
};

// A closed basis of antihermitian generators with a designated Cartan
// subalgebra (a maximal pairwise-commuting subset).
struct AlgebraBasis {
    Family family = Family::fermionic;
    int n = 0;                     // modes or qubits
    std::vector<OpPoly> gens;
    std::vector<GenInfo> info;
    std::vector<int> csa;          // indices into gens
    double csa_obs_scale = 1.0;    // observable = -i * scale * generator

    int dim() const { return static_cast<int>(gens.size()); }
    int find_generator(const std::string& label) const;  // throws when absent

    // Hermitian observable attached to CSA slot i and its eigenvalue labels
    // (occupations {0,1} for one-body phases, {+1,-1} for pair/axis kinds).
    OpPoly csa_observable(int i) const;
    std::vector<double> csa_spectrum(int i) const;
};

// Antihermitian one-body generators of the unitary orbital group on n modes:
// plane pairs (p<q) followed by the n commuting phases i E_pp (the CSA).
AlgebraBasis one_body_basis(int n);

// Quadratic Majorana generators gamma_j gamma_k / 2 on 2n indices; the CSA
// collects the mode pairs (2p-1, 2p). With with_zero the linear generators
// -i gamma_j / 2 are appended, extending the algebra by one row/column.
AlgebraBasis majorana_basis(int n, bool with_zero);

// Single-qubit rotations i x_k, i y_k, i z_k; the CSA holds the z axes.
AlgebraBasis qubit_basis(int n);

struct ExpandResult {
    Eigen::VectorXd coeffs;
    double residual = 0.0;
    double max_imag = 0.0;
};

// Expresses p as a real linear combination of the basis generators; throws
// constraint_error when p lies outside the (real) span.
ExpandResult expand_in_basis(const AlgebraBasis& basis, const OpPoly& p);

struct StructureConstants {
    // [A_i, A_j] = sum_k xi[k](i, j) A_k
    std::vector<Eigen::MatrixXd> xi;
    double max_imag = 0.0;
    double max_residual = 0.0;

    // Adjoint action of generator g on coefficient vectors:
    // ad(g)(k, j) = xi[k](g, j).
    Eigen::MatrixXd ad_matrix(int g) const;
};

StructureConstants structure_constants(const AlgebraBasis& basis);

// Closes a set of antihermitian seeds under commutators. The returned basis
// lists a Cartan subalgebra first (found as the centralizer of a generic
// element), then the remaining directions.
AlgebraBasis lie_closure(const std::vector<OpPoly>& seeds, int cap = 64);

struct LadderSet {
    std::vector<OpPoly> raising, lowering;
    // row r = root vector of raising[r] against the CSA observables;
    // lowering[r] carries the negated roots
    Eigen::MatrixXd roots;
};

// Decomposes the off-Cartan part of the algebra into simultaneous
// eigenoperators of the CSA observables; every returned operator is verified
// symbolically against its root. Throws when the designated CSA is not
// maximal abelian.
LadderSet ladder_set(const AlgebraBasis& basis);

}
