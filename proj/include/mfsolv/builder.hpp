#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfsolv/matrix_rep.hpp"
#include "mfsolv/rotation.hpp"

namespace mfs {

// Real polynomial in the commuting CSA observables of a basis. A monomial is
// a sorted list of (CSA slot, power) pairs; slots are 0-based in memory and
// 1-based in the serialized form.
class CsaPolynomial {
public:
    using Monomial = std::vector<std::pair<int, int>>;

    void add(Monomial mono, double coeff);
    void add_constant(double c) { add({}, c); }

    double evaluate(const std::vector<double>& labels) const;
    OpPoly to_poly(const AlgebraBasis& basis) const;

    const std::map<Monomial, double>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    CsaPolynomial& operator+=(const CsaPolynomial& o);
    CsaPolynomial& operator*=(double s);

private:
    std::map<Monomial, double> terms_;
};

CsaPolynomial operator*(const CsaPolynomial& a, const CsaPolynomial& b);

// Lagrange interpolant that evaluates to 1 on the given CSA eigenvalue tuple
// and to 0 on every other tuple of the basis.
CsaPolynomial csa_indicator(const AlgebraBasis& basis, const std::vector<double>& labels);

// Product form of the rank-1 spectral projector onto eigenvalue target of the
// CSA observable in the given slot; throws constraint_error when target is
// not in the slot's spectrum or when two spectrum values coincide.
OpPoly lowdin_projector(const AlgebraBasis& basis, int slot, double target);

// Predicate over CSA eigenvalue tuples, in one of two forms: pinned
// (slot, value) pairs with unlisted slots unconstrained, or an explicit list
// of accepted full tuples. The pinned form compiles to the product of the
// single-slot spectral projectors; the explicit form to the sum of the
// rank-1 projectors over the listed tuples. Mixing both forms is an error.
struct ProjectorSpec {
    std::vector<std::pair<int, double>> pins;
    std::vector<std::vector<double>> tuples;

    bool accepts(const std::vector<double>& labels) const;
    OpPoly to_poly(const AlgebraBasis& basis) const;
};

struct LevelSpec {
    CsaPolynomial f;
    std::vector<std::pair<std::string, double>> rotation;
    std::optional<ProjectorSpec> projector;  // absent on the last level only
};

// Recursive description of a solvable model: level j contributes
// F_j restricted by its projector, and the tail enters through the level
// j+1 rotation applied to the remaining subspace.
struct ClassSpec {
    Family family = Family::fermionic;
    int n = 0;
    std::vector<LevelSpec> levels;

    int depth() const { return static_cast<int>(levels.size()); }

    std::string to_json() const;
    static ClassSpec from_json(const std::string& text);
};

// One exact eigenpair of a built model: the CSA eigenvalue tuple it descends
// from, the level whose function supplies the energy, the basis column the
// tuple labels, and the dense eigenvector.
struct Certificate {
    std::vector<double> labels;
    int level = 1;
    double energy = 0.0;
    std::uint64_t basis_index = 0;
    Vec state;
};

struct BuiltModel {
    OpPoly hamiltonian;
    std::vector<Certificate> certificates;
    std::shared_ptr<const AlgebraBasis> basis;
    std::vector<MFRotation> rotations;  // one per level, possibly empty lists
};

// Expands the recursion
//   G_K = F_K,   G_j = F_j P_j + U_{j+1}^+ G_{j+1} U_{j+1} (1 - P_j),
//   H = U_1^+ G_1 U_1
// and tabulates every eigenpair. Validates the level layout, that every
// rotation generator at level j commutes with the projectors of all earlier
// levels (dense check, offenders named in the error), and that every level
// captures at least one eigenvalue tuple.
BuiltModel build_model(const ClassSpec& spec);

OpPoly build_class1(const CsaPolynomial& f, const MFRotation& u);
OpPoly build_class2(const CsaPolynomial& f1, const CsaPolynomial& f2,
                    const ProjectorSpec& p1,
                    const MFRotation& u1, const MFRotation& u2);
OpPoly build_class_k(const ClassSpec& spec);

// Named input/expected pairs used by the test suites and the acceptance
// driver; expected is absent where the reference ships only spectral data.
struct ReferenceModel {
    std::string name;
    ClassSpec spec;
    std::optional<OpPoly> expected;
    double coeff_tol = 0.0;
};

std::vector<ReferenceModel> reference_models();
ReferenceModel reference_model(const std::string& name);

// Draws a depth-k spec with pairwise eigenvalue separation >= 1e-3 and, for
// k >= 2, rotation frames that genuinely differ between levels; deterministic
// in the seed. Requires k <= n.
ClassSpec random_class_spec(Family fam, int n, int k, std::uint64_t seed);

}
