#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mfsolv/builder.hpp"

namespace mfs {

struct DetectorOptions {
    std::uint64_t seed = 1;
    int budget = 32;                       // optimizer restarts per search
    double tol_variance = tol::kVariance;  // relative to hnorm^2
    int max_levels = 4;
};

// ---- variance minimization ----

struct VarianceResult {
    MFRotation rotation;
    double variance = 0.0;  // exact dense variance at the optimum
    int restarts_used = 0;
};

// Minimizes Var(U|ref>) = <ref|U^+ H^2 U|ref> - <ref|U^+ H U|ref>^2 over
// rotations U = prod_k exp(t_k A_k) built from the non-Cartan generators of
// the basis; BFGS restarts are drawn deterministically from the seed and the
// search stops early once the variance is far below tol::kVariance * hnorm^2.
VarianceResult minimize_variance(const OpPoly& h, std::uint64_t reference_bits,
                                 std::shared_ptr<const AlgebraBasis> basis,
                                 int budget = 32, std::uint64_t seed = 1);

// ---- diagonal-part split ----

struct CsaSplit {
    OpPoly diagonal;                       // terms polynomial in the CSA observables
    OpPoly remainder;                      // h - diagonal
    std::vector<std::uint64_t> invariant;  // basis columns h maps to themselves
    std::vector<double> values;            // diagonal entries on those columns
};

// Splits off the terms that act diagonally on the occupation (spin) basis and
// lists the basis columns that are exact eigenvectors of the full operator
// (dense column residual <= 1e-8 * max(1, hnorm)).
CsaSplit csa_polynomial_split(const OpPoly& h);

// ---- sector reduction ----

struct QubitReduction {
    OpPoly reduced;               // acts on the remaining qubits, labels kept
    std::array<double, 3> axis;   // unit (x, y, z) direction of the symmetry
    double eigenvalue = 0.0;      // +-1 branch selected by sign
};

// Searches for a single-qubit operator n . sigma on the given qubit that
// commutes with h, then freezes the qubit into the +-1 eigenstate selected by
// sign and returns the partial expectation value of h in that state. The axis
// is normalized with its first significant component positive. Throws
// constraint_error when no commuting single-qubit direction exists.
QubitReduction qubit_reduce(const OpPoly& h, int qubit, int sign);

// ---- classification ----

enum class Verdict { mf_class, partial, not_mf };
std::string verdict_name(Verdict v);

struct LevelTrace {
    int level = 1;
    std::vector<std::pair<std::string, double>> rotation;  // label, angle
    std::vector<std::uint64_t> harvested;                  // frame basis columns
    int restarts_used = 0;
    double worst_variance = 0.0;  // max variance over the harvested columns
    double best_leftover = -1.0;  // best variance reached by any leftover column
};

struct StateRecord {
    std::vector<double> labels;
    std::uint64_t basis_index = 0;
    int level = 0;  // 0: never harvested
    double energy = 0.0;
    double variance = 0.0;
    Vec state;  // eigenvector in the input frame; empty when level == 0
};

struct OracleSummary {
    int mean_field = 0;   // nondegenerate eigenvectors on the mean-field manifold
    int entangled = 0;    // nondegenerate eigenvectors off it
    int undecided = 0;    // members of degenerate clusters
    double worst_defect = 0.0;  // largest density-idempotency defect seen
};

struct ClassificationReport {
    Verdict verdict = Verdict::not_mf;
    int klass = 0;      // number of levels for mf_class verdicts
    int certified = 0;  // orthonormal eigenvectors certified mean-field
    std::int64_t dimension = 0;
    bool inconclusive = false;
    std::string note;
    Family work_family = Family::fermionic;  // family after any remap
    int modes = 0;
    std::uint64_t seed = 1;
    int budget = 32;
    double hnorm = 0.0;
    double tol_variance_abs = 0.0;
    std::vector<LevelTrace> levels;
    std::vector<StateRecord> states;
    OracleSummary oracle;
    ClassSpec discovered;  // populated for mf_class verdicts
    double reconstruction_error = -1.0;

    std::string to_json() const;
};

// Runs the level-by-level variance search: every unsettled occupation basis
// column is a candidate reference, each level looks for one rotation that
// zeroes the variance of as many candidates as possible (generators are
// restricted to those commuting with the projectors of earlier levels), and
// the verdict is cross-checked against exact diagonalization. Class verdicts
// carry a rebuildable spec and its reconstruction error. Number-nonconserving
// fermionic input is classified in its Majorana form.
ClassificationReport classify(const OpPoly& h, const DetectorOptions& opts = {});

}
