#pragma once

#include <functional>

#include "mfsolv/ops.hpp"

namespace mfs {

// Rewrites every term of p by replacing each factor with its image
// polynomial and multiplying the images out in order.
OpPoly substitute_factors(const OpPoly& p, Family target, int n,
                          const std::function<OpPoly(const Factor&)>& image);

// Mode p owns Majorana indices 2p-1 and 2p:
//   gamma_{2p-1} = i (a_p - a_p^+),   gamma_{2p} = a_p + a_p^+,
// so gamma^2 = 1 and {gamma_j, gamma_k} = 2 delta_jk.
OpPoly majorana_from_fermionic(const OpPoly& p);
OpPoly fermionic_from_majorana(const OpPoly& p);

// Chain transform onto qubits (qubit k hosts mode k):
//   a_p -> 1/2 (x_p + i y_p) z_{p-1} ... z_1
// which annihilates the all-spin-up state, matching the dense convention
// that an empty mode carries z = +1. Accepts fermionic or majorana input.
OpPoly jordan_wigner(const OpPoly& p);

}
