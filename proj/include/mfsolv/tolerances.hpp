#pragma once

namespace mfs::tol {

// Coefficients smaller than this are dropped during canonicalization.
inline constexpr double kCoeffDrop = 1e-12;

// Linear-independence cutoff (relative residual after projection onto the
// current span; equivalent to a singular-value cutoff on the stacked
// coefficient matrix).
inline constexpr double kIndependence = 1e-10;

// Structure constants of a closed antihermitian basis must be real to this
// absolute tolerance, and the expansion residual must stay below it.
inline constexpr double kStructureReality = 1e-10;

// Relative eigenpair residual ||H v - E v|| <= kEigResidual * ||H||.
inline constexpr double kEigResidual = 1e-9;

// Eigenvalues closer than kDegeneracy * ||H|| are grouped as degenerate.
inline constexpr double kDegeneracy = 1e-8;

// Single-mode / single-qubit reduced states must be pure to this tolerance;
// also the idempotency threshold for density-matrix checks.
inline constexpr double kMeanFieldPurity = 1e-8;

// Relative variance threshold: a reference is certified when
// var <= kVariance * ||H||^2  (||H|| = max |eigenvalue|).
inline constexpr double kVariance = 1e-8;

// A variance floor inside (kVariance, kInconclusiveFactor * kVariance) *
// ||H||^2 is reported as inconclusive rather than a clean rejection.
inline constexpr double kInconclusiveFactor = 1e3;

// Relative reconstruction tolerance for rebuilt operators.
inline constexpr double kReconstruction = 1e-8;

// Unitarity / orthogonality / commutation checks on transformation data.
inline constexpr double kUnitarity = 1e-10;

// Central finite-difference step for the variance optimizer.
inline constexpr double kFdStep = 1e-6;

// Dense representations are refused above this many modes/qubits (dim 16384).
inline constexpr int kMaxDenseModes = 14;

}
