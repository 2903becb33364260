#include "mfsolv/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace mfs {

// ---- family names ----

const char* family_name(Family fam) {
    switch (fam) {
        case Family::fermionic: return "fermionic";
        case Family::majorana: return "majorana";
        case Family::pauli: return "pauli";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "fermionic" || name == "fermi") return Family::fermionic;
    if (name == "majorana") return Family::majorana;
    if (name == "pauli" || name == "qubit") return Family::pauli;
    throw parse_error("unknown operator family '" + name + "'");
}

// ---- encoding ----

std::string OpPoly::encode(const FactorSeq& factors) {
    std::string key;
    key.reserve(2 * factors.size());
    for (const Factor& f : factors) {
        key.push_back(f.tag);
        key.push_back(static_cast<char>(f.index));
    }
    return key;
}

FactorSeq OpPoly::decode(const std::string& key) {
    FactorSeq out;
    out.reserve(key.size() / 2);
    for (std::size_t i = 0; i + 1 < key.size(); i += 2)
        out.push_back({key[i], static_cast<int>(static_cast<unsigned char>(key[i + 1]))});
    return out;
}

// ---- bookkeeping ----

void OpPoly::set_modes(int n) { n_ = std::max(n_, n); }

void OpPoly::cover_index(int index) {
    int mode = (fam_ == Family::majorana) ? (index + 1) / 2 : index;
    n_ = std::max(n_, mode);
}

void OpPoly::accumulate(const std::string& key, cplx coeff) {
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
        it->second += coeff;
        if (std::abs(it->second) < tol::kCoeffDrop) terms_.erase(it);
    } else if (std::abs(it->second) < tol::kCoeffDrop) {
        terms_.erase(it);
    }
}

int OpPoly::degree() const {
    std::size_t deg = 0;
    for (const auto& [key, c] : terms_) deg = std::max(deg, key.size() / 2);
    return static_cast<int>(deg);
}

cplx OpPoly::coeff(const FactorSeq& canonical_factors) const {
    auto it = terms_.find(encode(canonical_factors));
    return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
}

cplx OpPoly::identity_coeff() const {
    auto it = terms_.find(std::string());
    return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
}

void OpPoly::prune(double tolv) {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (std::abs(it->second) < tolv) ? terms_.erase(it) : std::next(it);
}

// ---- normal ordering ----

void OpPoly::add_term(const FactorSeq& factors, cplx coeff) {
    if (std::abs(coeff) < tol::kCoeffDrop && !factors.empty()) return;
    for (const Factor& f : factors) {
        if (f.index < 1) throw parse_error("factor index must be >= 1");
        switch (fam_) {
            case Family::fermionic:
                if (f.tag != 'c' && f.tag != 'a')
                    throw parse_error("fermionic factors must be creations or annihilations");
                break;
            case Family::majorana:
                if (f.tag != 'g') throw parse_error("majorana factors must be gamma symbols");
                break;
            case Family::pauli:
                if (f.tag != 'x' && f.tag != 'y' && f.tag != 'z')
                    throw parse_error("pauli factors must be x, y or z");
                break;
        }
        cover_index(f.index);
    }
    switch (fam_) {
        case Family::fermionic: insert_fermionic(factors, coeff); break;
        case Family::majorana: insert_majorana(factors, coeff); break;
        case Family::pauli: insert_pauli(factors, coeff); break;
    }
}

void OpPoly::insert_fermionic(FactorSeq factors, cplx coeff) {
    // Worklist rewrite with the canonical anticommutation relations:
    //   a_p a_q^+ = delta_pq - a_q^+ a_p,  {a_p, a_q} = {a_p^+, a_q^+} = 0.
    std::vector<std::pair<FactorSeq, cplx>> work;
    work.emplace_back(std::move(factors), coeff);
    while (!work.empty()) {
        auto [seq, c] = std::move(work.back());
        work.pop_back();

        bool rewritten = false;
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
            const Factor& f1 = seq[i];
            const Factor& f2 = seq[i + 1];
            if (f1.tag == 'a' && f2.tag == 'c') {
                FactorSeq swapped = seq;
                std::swap(swapped[i], swapped[i + 1]);
                if (f1.index == f2.index) {
                    FactorSeq contracted;
                    contracted.reserve(seq.size() - 2);
                    contracted.insert(contracted.end(), seq.begin(), seq.begin() + i);
                    contracted.insert(contracted.end(), seq.begin() + i + 2, seq.end());
                    work.emplace_back(std::move(contracted), c);
                }
                work.emplace_back(std::move(swapped), -c);
                rewritten = true;
                break;
            }
            if (f1.tag == f2.tag) {
                if (f1.index == f2.index) {
                    rewritten = true;  // nilpotent: term vanishes
                    seq.clear();
                    c = 0.0;
                    break;
                }
                if (f1.index < f2.index) {
                    FactorSeq swapped = seq;
                    std::swap(swapped[i], swapped[i + 1]);
                    work.emplace_back(std::move(swapped), -c);
                    rewritten = true;
                    break;
                }
            }
        }
        if (!rewritten) accumulate(encode(seq), c);
    }
}

void OpPoly::insert_majorana(FactorSeq factors, cplx coeff) {
    // Bubble into strictly increasing order; {gamma_j, gamma_k} = 2 delta_jk.
    bool reduced = true;
    while (reduced) {
        reduced = false;
        for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
            if (factors[i].index == factors[i + 1].index) {
                factors.erase(factors.begin() + i, factors.begin() + i + 2);
                reduced = true;
                break;
            }
            if (factors[i].index > factors[i + 1].index) {
                std::swap(factors[i], factors[i + 1]);
                coeff = -coeff;
                reduced = true;
                break;
            }
        }
    }
    accumulate(encode(factors), coeff);
}

void OpPoly::insert_pauli(const FactorSeq& factors, cplx coeff) {
    // Different qubits commute; same-qubit axes fold through the
    // single-qubit table (x y = i z and cyclic, a a = 1).
    static const auto mul = [](char a, char b, cplx& phase) -> char {
        if (a == b) return ' ';
        if (a == 'x' && b == 'y') { phase *= cplx(0, 1); return 'z'; }
        if (a == 'y' && b == 'x') { phase *= cplx(0, -1); return 'z'; }
        if (a == 'y' && b == 'z') { phase *= cplx(0, 1); return 'x'; }
        if (a == 'z' && b == 'y') { phase *= cplx(0, -1); return 'x'; }
        if (a == 'z' && b == 'x') { phase *= cplx(0, 1); return 'y'; }
        return (phase *= cplx(0, -1)), 'y';  // x z = -i y
    };
    std::map<int, char> axis_by_qubit;
    cplx phase = 1.0;
    for (const Factor& f : factors) {
        auto it = axis_by_qubit.find(f.index);
        if (it == axis_by_qubit.end()) {
            axis_by_qubit.emplace(f.index, f.tag);
        } else {
            char merged = mul(it->second, f.tag, phase);
            if (merged == ' ')
                axis_by_qubit.erase(it);
            else
                it->second = merged;
        }
    }
    FactorSeq canon;
    canon.reserve(axis_by_qubit.size());
    for (const auto& [q, ax] : axis_by_qubit) canon.push_back({ax, q});
    accumulate(encode(canon), coeff * phase);
}

// ---- arithmetic ----

OpPoly& OpPoly::operator+=(const OpPoly& rhs) {
    if (rhs.is_zero()) return *this;
    if (is_zero() && terms_.empty() && n_ == 0) fam_ = rhs.fam_;
    if (fam_ != rhs.fam_)
        throw constraint_error("cannot add polynomials from different operator families");
    n_ = std::max(n_, rhs.n_);
    for (const auto& [key, c] : rhs.terms_) accumulate(key, c);
    return *this;
}

OpPoly& OpPoly::operator-=(const OpPoly& rhs) {
    if (rhs.is_zero()) return *this;
    if (is_zero() && terms_.empty() && n_ == 0) fam_ = rhs.fam_;
    if (fam_ != rhs.fam_)
        throw constraint_error("cannot subtract polynomials from different operator families");
    n_ = std::max(n_, rhs.n_);
    for (const auto& [key, c] : rhs.terms_) accumulate(key, -c);
    return *this;
}

OpPoly& OpPoly::operator*=(cplx s) {
    if (std::abs(s) < tol::kCoeffDrop) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, c] : terms_) c *= s;
    prune();
    return *this;
}

OpPoly multiply(const OpPoly& a, const OpPoly& b) {
    if (a.family() != b.family())
        throw constraint_error("cannot multiply polynomials from different operator families");
    OpPoly out(a.family(), std::max(a.modes(), b.modes()));
    for (const auto& [ka, ca] : a.terms()) {
        FactorSeq fa = OpPoly::decode(ka);
        for (const auto& [kb, cb] : b.terms()) {
            FactorSeq prod = fa;
            FactorSeq fb = OpPoly::decode(kb);
            prod.insert(prod.end(), fb.begin(), fb.end());
            out.add_term(prod, ca * cb);
        }
    }
    return out;
}

OpPoly commutator(const OpPoly& a, const OpPoly& b) {
    OpPoly out = multiply(a, b);
    out -= multiply(b, a);
    return out;
}

OpPoly anticommutator(const OpPoly& a, const OpPoly& b) {
    OpPoly out = multiply(a, b);
    out += multiply(b, a);
    return out;
}

OpPoly adjoint(const OpPoly& a) {
    OpPoly out(a.family(), a.modes());
    for (const auto& [key, c] : a.terms()) {
        FactorSeq seq = OpPoly::decode(key);
        std::reverse(seq.begin(), seq.end());
        if (a.family() == Family::fermionic)
            for (Factor& f : seq) f.tag = (f.tag == 'c') ? 'a' : 'c';
        out.add_term(seq, std::conj(c));
    }
    return out;
}

// ---- predicates ----

double max_coeff_diff(const OpPoly& a, const OpPoly& b) {
    if (a.family() != b.family()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& [key, c] : a.terms()) {
        auto it = b.terms().find(key);
        cplx other = (it == b.terms().end()) ? cplx{} : it->second;
        worst = std::max(worst, std::abs(c - other));
    }
    for (const auto& [key, c] : b.terms())
        if (!a.terms().count(key)) worst = std::max(worst, std::abs(c));
    return worst;
}

bool approx_equal(const OpPoly& a, const OpPoly& b, double tolv) {
    return max_coeff_diff(a, b) <= tolv;
}

bool is_hermitian(const OpPoly& a, double tolv) { return approx_equal(a, adjoint(a), tolv); }

bool is_antihermitian(const OpPoly& a, double tolv) {
    OpPoly neg = a;
    neg *= cplx(-1.0, 0.0);
    return approx_equal(neg, adjoint(a), tolv);
}

double max_abs_coeff(const OpPoly& a) {
    double worst = 0.0;
    for (const auto& [key, c] : a.terms()) worst = std::max(worst, std::abs(c));
    return worst;
}

double coeff_norm(const OpPoly& a) {
    double s = 0.0;
    for (const auto& [key, c] : a.terms()) s += std::norm(c);
    return std::sqrt(s);
}

// ---- single-symbol constructors ----

OpPoly identity_poly(Family fam, int n) {
    OpPoly p(fam, n);
    p.add_identity(1.0);
    return p;
}

OpPoly creation(int p, int n) {
    OpPoly out(Family::fermionic, n);
    out.add_term({{'c', p}}, 1.0);
    return out;
}

OpPoly annihilation(int p, int n) {
    OpPoly out(Family::fermionic, n);
    out.add_term({{'a', p}}, 1.0);
    return out;
}

OpPoly number_op(int p, int n) {
    OpPoly out(Family::fermionic, n);
    out.add_term({{'c', p}, {'a', p}}, 1.0);
    return out;
}

OpPoly transfer_op(int p, int q, int n) {
    OpPoly out(Family::fermionic, n);
    out.add_term({{'c', p}, {'a', q}}, 1.0);
    return out;
}

OpPoly majorana_op(int j, int n_modes) {
    OpPoly out(Family::majorana, n_modes);
    out.add_term({{'g', j}}, 1.0);
    return out;
}

OpPoly pauli_op(char axis, int k, int n) {
    OpPoly out(Family::pauli, n);
    out.add_term({{axis, k}}, 1.0);
    return out;
}

}
