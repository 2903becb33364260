#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfsolv/matrix_rep.hpp"
#include "mfsolv/transforms.hpp"
#include "test_util.hpp"

using namespace mfs;

TEST_CASE("annihilator_maps_to_majorana_combination") {
    OpPoly img = majorana_from_fermionic(annihilation(1, 1));
    OpPoly expected(Family::majorana, 1);
    expected.add_term({{'g', 2}}, 0.5);
    expected.add_term({{'g', 1}}, cplx(0, -0.5));
    CHECK(approx_equal(img, expected));
}

TEST_CASE("majorana_pair_gives_occupation") {
    // gamma_1 gamma_2 = i (1 - 2 n_1)
    OpPoly pair(Family::majorana, 1);
    pair.add_term({{'g', 1}, {'g', 2}}, 1.0);
    OpPoly back = fermionic_from_majorana(pair);
    OpPoly expected = identity_poly(Family::fermionic, 1);
    expected -= cplx(2.0, 0.0) * number_op(1, 1);
    expected *= cplx(0, 1);
    CHECK(approx_equal(back, expected));
}

TEST_CASE("majorana_round_trip_is_identity") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        OpPoly p = testutil::random_poly(rng, Family::fermionic, 3, 5, 4);
        CHECK(max_coeff_diff(fermionic_from_majorana(majorana_from_fermionic(p)), p) < 1e-10);

        OpPoly m = testutil::random_poly(rng, Family::majorana, 3, 5, 4);
        CHECK(max_coeff_diff(majorana_from_fermionic(fermionic_from_majorana(m)), m) < 1e-10);
    }
}

TEST_CASE("transforms_preserve_products") {
    std::mt19937 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        OpPoly a = testutil::random_poly(rng, Family::fermionic, 3, 4, 3);
        OpPoly b = testutil::random_poly(rng, Family::fermionic, 3, 4, 3);
        CHECK(max_coeff_diff(majorana_from_fermionic(multiply(a, b)),
                             multiply(majorana_from_fermionic(a), majorana_from_fermionic(b))) <
              1e-9);
        CHECK(max_coeff_diff(jordan_wigner(multiply(a, b)),
                             multiply(jordan_wigner(a), jordan_wigner(b))) < 1e-9);
    }
}

TEST_CASE("chain_transform_of_occupation_and_annihilator") {
    OpPoly n1 = jordan_wigner(number_op(1, 1));
    OpPoly expected(Family::pauli, 1);
    expected.add_identity(0.5);
    expected.add_term({{'z', 1}}, -0.5);
    CHECK(approx_equal(n1, expected));

    OpPoly a2 = jordan_wigner(annihilation(2, 2));
    OpPoly expected2(Family::pauli, 2);
    expected2.add_term({{'z', 1}, {'x', 2}}, 0.5);
    expected2.add_term({{'z', 1}, {'y', 2}}, cplx(0, 0.5));
    CHECK(approx_equal(a2, expected2));
}

TEST_CASE("chain_transform_matches_dense_matrices") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        OpPoly p = testutil::random_poly(rng, Family::fermionic, 3, 5, 4);
        p.set_modes(3);
        OpPoly q = jordan_wigner(p);
        q.set_modes(3);
        CHECK((to_matrix(p) - to_matrix(q)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("chain_transform_preserves_spectra") {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        OpPoly p = testutil::hermitized(testutil::random_poly(rng, Family::fermionic, 3, 6, 4));
        p.set_modes(3);
        OpPoly q = jordan_wigner(p);
        q.set_modes(3);
        EigenSystem a = exact_eigensystem(to_matrix(p));
        EigenSystem b = exact_eigensystem(to_matrix(q));
        CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("wrong_family_inputs_are_rejected") {
    CHECK_THROWS_AS(majorana_from_fermionic(pauli_op('x', 1, 1)), constraint_error);
    CHECK_THROWS_AS(fermionic_from_majorana(pauli_op('x', 1, 1)), constraint_error);
}
