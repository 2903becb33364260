#pragma once

#include <cstdint>
#include <memory>

#include "mfsolv/rotation.hpp"

namespace mfs {

struct ToriResult {
    MFRotation rotation;         // U with U^+ x U inside the CSA span
    Eigen::VectorXd csa_coeffs;  // coefficients on the CSA slots, basis order
    double residual = 0.0;       // leftover off-CSA coefficient norm
    int restarts_used = 0;
};

// Conjugates the algebra element x into the designated Cartan subalgebra by
// a gradient flow over the non-CSA rotation angles.  Restart 0 starts from
// zero angles; further restarts draw angles from the seeded stream and stop
// early once the off-CSA norm is negligible.
ToriResult maximal_tori_diagonalize(const OpPoly& x,
                                    std::shared_ptr<const AlgebraBasis> basis,
                                    std::uint64_t seed = 0, int restarts = 16);

}
