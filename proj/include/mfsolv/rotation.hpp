#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mfsolv/algebra.hpp"

namespace mfs {

struct RotationFactor {
    int gen = -1;  // index into basis->gens
    double angle = 0.0;
};

// Ordered product U = exp(t_1 A_1) exp(t_2 A_2) ... exp(t_m A_m); the
// conjugation U^+ p U peels the leftmost exponential off first.
struct MFRotation {
    std::shared_ptr<const AlgebraBasis> basis;
    std::vector<RotationFactor> factors;
};

MFRotation make_rotation(std::shared_ptr<const AlgebraBasis> basis,
                         const std::vector<std::pair<std::string, double>>& steps);

// Reversed factor order with negated angles.
MFRotation inverse(const MFRotation& rot);

// U^+ p U computed term by term from per-generator closed forms; throws
// constraint_error when a factor has no closed-form action (generic kind).
OpPoly apply_rotation(const MFRotation& rot, const OpPoly& p);

// Dense unitary of U on the full state space of basis->n modes or qubits.
Eigen::MatrixXcd rotation_matrix(const MFRotation& rot);

// Planar rotation over the mode pairs (1,2), (1,3), ..., (n-1,n): for pair
// t an unprimed step thetas[t] followed by a primed step phis[t]; steps with
// negligible angles are dropped.
MFRotation orbital_rotation(std::shared_ptr<const AlgebraBasis> basis,
                            const std::vector<double>& thetas,
                            const std::vector<double>& phis);

// Linear canonical transform b_q^+ = sum_p u(p,q) a_p^+ + v(p,q) a_p.
struct BogoliubovTransform {
    Eigen::MatrixXcd u, v;
};

struct BogoliubovOps {
    std::vector<OpPoly> create, annihilate;
    std::vector<OpPoly> csa;  // i b_q^+ b_q
};

// Names of the canonical-anticommutation constraints the transform violates
// beyond tolv; empty means the transform is admissible.
std::vector<std::string> bogoliubov_violations(const BogoliubovTransform& t,
                                               double tolv = 1e-8);

// Transformed ladder operators as fermionic polynomials; throws
// constraint_error naming the violated constraints for bad transforms.
BogoliubovOps bogoliubov_generators(const BogoliubovTransform& t);

}
