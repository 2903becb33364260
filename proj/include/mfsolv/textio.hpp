#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfsolv/ops.hpp"

namespace mfs {

// Text format, one term per line:
//
//     # comment
//     modes 4            (or "qubits 3"; optional, widens the declared count)
//     0.43 : 2^ 2        fermionic creation 2^, annihilation 2
//     -1.5+0.25i : g1 g4 majorana factors
//     0.5 : x1 z3        pauli factors
//     2 : I              identity term
//
// Coefficients are real (0.43), imaginary (0.25i, i, -i) or full complex
// (a+bi). Factors are separated by whitespace. When no family is supplied
// the parser infers it from the first factor symbol it sees.

OpPoly parse_poly(std::istream& in, std::optional<Family> fam = std::nullopt);
OpPoly parse_poly_file(const std::string& path, std::optional<Family> fam = std::nullopt);

std::string format_coeff(cplx c);
std::string format_term(const FactorSeq& factors);

// Terms are printed sorted by (degree, factor sequence); header lines are
// emitted as leading comments.
void print_poly(std::ostream& out, const OpPoly& poly,
                const std::vector<std::string>& header = {});
std::string poly_to_string(const OpPoly& poly,
                           const std::vector<std::string>& header = {});
void write_poly_file(const std::string& path, const OpPoly& poly,
                     const std::vector<std::string>& header = {});

}
