#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "mfsolv/errors.hpp"
#include "mfsolv/tolerances.hpp"

namespace mfs {

using cplx = std::complex<double>;

enum class Family { fermionic, majorana, pauli };

const char* family_name(Family fam);
Family family_from_name(const std::string& name);

// One elementary symbol inside a product term.
//   fermionic: tag 'c' (creation) or 'a' (annihilation), index = mode >= 1
//   majorana:  tag 'g', index >= 1; mode p owns indices 2p-1 and 2p
//   pauli:     tag 'x' / 'y' / 'z', index = qubit >= 1
struct Factor {
    char tag = 'a';
    int index = 1;
    friend bool operator==(const Factor&, const Factor&) = default;
};

using FactorSeq = std::vector<Factor>;

// Linear combination of canonical product terms over one operator family.
//
// Canonical term shapes:
//   fermionic: all creations first with strictly decreasing mode indices,
//              then all annihilations with strictly decreasing mode indices
//   majorana:  strictly increasing indices (gamma^2 = 1)
//   pauli:     at most one axis per qubit, qubit indices strictly increasing
//
// Any product handed to add_term is rewritten into this form using the
// canonical anticommutation relations, gamma anticommutation, or the
// single-qubit multiplication table. Coefficients below tol::kCoeffDrop
// are discarded.
class OpPoly {
public:
    OpPoly() = default;
    explicit OpPoly(Family fam, int n = 0) : fam_(fam), n_(n) {}

    Family family() const { return fam_; }

    // Declared mode/qubit count. Grows automatically to cover every index
    // that appears in a term; set_modes can only widen it.
    int modes() const { return n_; }
    void set_modes(int n);

    // Adds coeff times the product of the factors, left to right.
    void add_term(const FactorSeq& factors, cplx coeff);
    void add_identity(cplx coeff) { add_term({}, coeff); }

    const std::map<std::string, cplx>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;
    cplx coeff(const FactorSeq& canonical_factors) const;
    cplx identity_coeff() const;

    static std::string encode(const FactorSeq& factors);
    static FactorSeq decode(const std::string& key);

    OpPoly& operator+=(const OpPoly& rhs);
    OpPoly& operator-=(const OpPoly& rhs);
    OpPoly& operator*=(cplx s);
    friend OpPoly operator+(OpPoly lhs, const OpPoly& rhs) { return lhs += rhs; }
    friend OpPoly operator-(OpPoly lhs, const OpPoly& rhs) { return lhs -= rhs; }
    friend OpPoly operator*(cplx s, OpPoly p) { return p *= s; }
    friend OpPoly operator*(OpPoly p, cplx s) { return p *= s; }

    void prune(double tolv = tol::kCoeffDrop);

private:
    Family fam_ = Family::fermionic;
    int n_ = 0;
    std::map<std::string, cplx> terms_;

    void accumulate(const std::string& key, cplx coeff);
    void insert_fermionic(FactorSeq factors, cplx coeff);
    void insert_majorana(FactorSeq factors, cplx coeff);
    void insert_pauli(const FactorSeq& factors, cplx coeff);
    void cover_index(int index);
};

OpPoly multiply(const OpPoly& a, const OpPoly& b);
OpPoly commutator(const OpPoly& a, const OpPoly& b);
OpPoly anticommutator(const OpPoly& a, const OpPoly& b);
OpPoly adjoint(const OpPoly& a);

bool is_hermitian(const OpPoly& a, double tolv = tol::kCoeffDrop);
bool is_antihermitian(const OpPoly& a, double tolv = tol::kCoeffDrop);
double max_coeff_diff(const OpPoly& a, const OpPoly& b);
bool approx_equal(const OpPoly& a, const OpPoly& b, double tolv = tol::kCoeffDrop);
double max_abs_coeff(const OpPoly& a);
double coeff_norm(const OpPoly& a);  // sqrt(sum |coeff|^2)

// Single-symbol convenience constructors.
OpPoly identity_poly(Family fam, int n);
OpPoly creation(int p, int n);        // fermionic a_p^+
OpPoly annihilation(int p, int n);    // fermionic a_p
OpPoly number_op(int p, int n);       // fermionic a_p^+ a_p
OpPoly transfer_op(int p, int q, int n);  // fermionic a_p^+ a_q
OpPoly majorana_op(int j, int n_modes);
OpPoly pauli_op(char axis, int k, int n);

}
