#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mfsolv/algebra.hpp>
#include <mfsolv/matrix_rep.hpp>
#include <mfsolv/transforms.hpp>

#include "test_util.hpp"

using namespace mfs;

namespace {

// antisymmetric quadratic generator with the row/column index 0 included
OpPoly so_gen(int i, int j, int n) {
    OpPoly p(Family::majorana, n);
    if (i == j) return p;
    if (i > j) {
        p = so_gen(j, i, n);
        p *= cplx(-1.0, 0.0);
        return p;
    }
    if (i == 0)
        p.add_term({{'g', j}}, cplx(0, 0.5));
    else
        p.add_term({{'g', i}, {'g', j}}, 0.5);
    return p;
}

}  // namespace

TEST_CASE("one_body_basis_layout") {
    AlgebraBasis b = one_body_basis(3);
    CHECK(b.dim() == 9);
    CHECK(b.csa.size() == 3);
    CHECK(b.info[b.find_generator("k_1_2")].kind == GenInfo::Kind::one_body_plane);
    CHECK(b.info[b.find_generator("kp_2_3")].primed);
    CHECK(b.find_generator("ph_1") == b.csa[0]);
    for (const OpPoly& g : b.gens) CHECK(is_antihermitian(g, 1e-12));
    OpPoly obs = b.csa_observable(1);
    CHECK(approx_equal(obs, number_op(2, 3), 1e-12));
    CHECK(b.csa_spectrum(1) == std::vector<double>{0.0, 1.0});
    CHECK_THROWS_AS(b.find_generator("k_9_9"), parse_error);
}

TEST_CASE("majorana_basis_layout") {
    AlgebraBasis so4 = majorana_basis(2, false);
    CHECK(so4.dim() == 6);
    CHECK(so4.csa.size() == 2);
    AlgebraBasis so5 = majorana_basis(2, true);
    CHECK(so5.dim() == 10);
    AlgebraBasis so7 = majorana_basis(3, true);
    CHECK(so7.dim() == 21);
    for (const OpPoly& g : so5.gens) CHECK(is_antihermitian(g, 1e-12));

    OpPoly obs = fermionic_from_majorana(so4.csa_observable(0));
    OpPoly parity = identity_poly(Family::fermionic, 2);
    OpPoly twice_n = number_op(1, 2);
    twice_n *= cplx(2.0, 0.0);
    parity -= twice_n;
    CHECK(max_coeff_diff(obs, parity) < 1e-12);
    CHECK(so4.csa_spectrum(0) == std::vector<double>{1.0, -1.0});
}

TEST_CASE("qubit_basis_layout") {
    AlgebraBasis b = qubit_basis(2);
    CHECK(b.dim() == 6);
    CHECK(b.csa.size() == 2);
    CHECK(b.info[b.find_generator("ry_2")].axis == 'y');
    CHECK(approx_equal(b.csa_observable(0), pauli_op('z', 1, 2), 1e-12));
}

TEST_CASE("expand_in_basis_recovers_coefficients") {
    AlgebraBasis b = one_body_basis(3);
    OpPoly p(Family::fermionic, 3);
    p.add_term({{'c', 1}, {'a', 2}}, cplx(0.35, 0.1));
    p.add_term({{'c', 2}, {'a', 1}}, cplx(-0.35, 0.1));
    p.add_term({{'c', 3}, {'a', 3}}, cplx(0, -1.2));
    ExpandResult ex = expand_in_basis(b, p);
    CHECK(ex.residual < 1e-12);
    CHECK(ex.coeffs(b.find_generator("k_1_2")) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(ex.coeffs(b.find_generator("kp_1_2")) == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(ex.coeffs(b.find_generator("ph_3")) == doctest::Approx(-1.2).epsilon(1e-10));
    CHECK(ex.coeffs(b.find_generator("ph_1")) == doctest::Approx(0.0));
}

TEST_CASE("expand_in_basis_rejects_outside_span") {
    AlgebraBasis b = one_body_basis(2);
    OpPoly two_body(Family::fermionic, 2);
    two_body.add_term({{'c', 1}, {'c', 2}, {'a', 2}, {'a', 1}}, cplx(0, 1));
    CHECK_THROWS_AS(expand_in_basis(b, two_body), constraint_error);
    OpPoly wrong(Family::pauli, 2);
    wrong.add_term({{'z', 1}}, cplx(0, 1));
    CHECK_THROWS_AS(expand_in_basis(b, wrong), constraint_error);
}

TEST_CASE("structure_constants_real_and_closed") {
    for (const AlgebraBasis& b :
         {one_body_basis(2), majorana_basis(2, true), qubit_basis(2)}) {
        StructureConstants sc = structure_constants(b);
        CHECK(sc.max_imag < 1e-10);
        CHECK(sc.max_residual < 1e-10);
        const int d = b.dim();
        for (int k = 0; k < d; ++k)
            CHECK((sc.xi[k] + sc.xi[k].transpose()).norm() < 1e-12);
    }
}

TEST_CASE("structure_constants_satisfy_jacobi") {
    AlgebraBasis b = majorana_basis(2, true);
    StructureConstants sc = structure_constants(b);
    const int d = b.dim();
    for (int i = 0; i < d; ++i) {
        Eigen::MatrixXd adi = sc.ad_matrix(i);
        for (int j = i + 1; j < d; ++j) {
            Eigen::MatrixXd adj = sc.ad_matrix(j);
            Eigen::MatrixXd lhs = adi * adj - adj * adi;
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(d, d);
            for (int k = 0; k < d; ++k) rhs += sc.xi[k](i, j) * sc.ad_matrix(k);
            CHECK((lhs - rhs).norm() < 1e-9);
        }
    }
}

TEST_CASE("quadratic_and_linear_generators_close_pairwise") {
    const int n = 2;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j)
            for (int k = 0; k <= 4; ++k)
                for (int l = 0; l <= 4; ++l) {
                    OpPoly lhs = commutator(so_gen(i, j, n), so_gen(k, l, n));
                    OpPoly rhs(Family::majorana, n);
                    auto add = [&](double sign, int a, int b2) {
                        OpPoly t = so_gen(a, b2, n);
                        t *= cplx(sign, 0.0);
                        rhs += t;
                    };
                    if (j == k) add(1.0, i, l);
                    if (i == l) add(1.0, j, k);
                    if (i == k) add(-1.0, j, l);
                    if (j == l) add(-1.0, i, k);
                    CHECK(max_coeff_diff(lhs, rhs) < 1e-12);
                }
}

TEST_CASE("lie_closure_su2_from_two_axes") {
    std::vector<OpPoly> seeds = {pauli_op('x', 1, 1), pauli_op('y', 1, 1)};
    for (OpPoly& s : seeds) s *= cplx(0, 1);
    AlgebraBasis c = lie_closure(seeds);
    CHECK(c.dim() == 3);
    CHECK(c.csa.size() == 1);
    CHECK(c.info[0].label == "h1");
    CHECK(c.info[1].label == "e1");
    std::vector<double> spec = c.csa_spectrum(0);
    REQUIRE(spec.size() == 2);
    CHECK(std::abs(spec[0]) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(spec[0] + spec[1] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("lie_closure_linear_seeds_fill_quadratics") {
    for (int n : {2, 3}) {
        std::vector<OpPoly> seeds;
        for (int p = 1; p <= n; ++p) {
            OpPoly s1 = annihilation(p, n);
            s1 -= creation(p, n);
            seeds.push_back(s1);
            OpPoly s2 = annihilation(p, n);
            s2 += creation(p, n);
            s2 *= cplx(0, 1);
            seeds.push_back(s2);
        }
        AlgebraBasis c = lie_closure(seeds);
        CHECK(c.dim() == 2 * n * n + n);
        CHECK(c.csa.size() == n);
    }
}

TEST_CASE("lie_closure_orbital_seeds_fill_unitary_algebra") {
    AlgebraBasis u3 = one_body_basis(3);
    std::vector<OpPoly> seeds = {u3.gens[u3.find_generator("k_1_2")],
                                 u3.gens[u3.find_generator("k_2_3")],
                                 u3.gens[u3.find_generator("ph_1")]};
    AlgebraBasis c = lie_closure(seeds);
    CHECK(c.dim() == 9);
    CHECK(c.csa.size() == 3);
}

TEST_CASE("lie_closure_rejects_bad_seeds") {
    CHECK_THROWS_AS(lie_closure({}), constraint_error);
    CHECK_THROWS_AS(lie_closure({number_op(1, 2)}), constraint_error);
    std::vector<OpPoly> mixed = {pauli_op('x', 1, 1), majorana_op(1, 1)};
    mixed[0] *= cplx(0, 1);
    CHECK_THROWS_AS(lie_closure(mixed), constraint_error);
}

TEST_CASE("lie_closure_honours_cap") {
    std::vector<OpPoly> seeds;
    for (int p = 1; p <= 2; ++p) {
        OpPoly s1 = annihilation(p, 2);
        s1 -= creation(p, 2);
        seeds.push_back(s1);
        OpPoly s2 = annihilation(p, 2);
        s2 += creation(p, 2);
        s2 *= cplx(0, 1);
        seeds.push_back(s2);
    }
    CHECK_THROWS_AS(lie_closure(seeds, 8), capacity_error);
}

TEST_CASE("ladder_set_orbital_pair") {
    AlgebraBasis b = one_body_basis(2);
    LadderSet ls = ladder_set(b);
    REQUIRE(ls.raising.size() == 1);
    REQUIRE(ls.lowering.size() == 1);
    CHECK(ls.roots(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ls.roots(0, 1) == doctest::Approx(-1.0).epsilon(1e-8));
    OpPoly expect = transfer_op(1, 2, 2);
    CHECK(max_coeff_diff(ls.raising[0], expect) < 1e-8);
    OpPoly shifted = commutator(b.csa_observable(0), ls.raising[0]);
    CHECK(max_coeff_diff(shifted, ls.raising[0]) < 1e-8);
}

TEST_CASE("ladder_set_single_qubit") {
    AlgebraBasis b = qubit_basis(1);
    LadderSet ls = ladder_set(b);
    REQUIRE(ls.raising.size() == 1);
    CHECK(ls.roots(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
    OpPoly lhs = commutator(b.csa_observable(0), ls.raising[0]);
    OpPoly rhs = ls.raising[0];
    rhs *= cplx(2.0, 0.0);
    CHECK(max_coeff_diff(lhs, rhs) < 1e-8);
    lhs = commutator(b.csa_observable(0), ls.lowering[0]);
    rhs = ls.lowering[0];
    rhs *= cplx(-2.0, 0.0);
    CHECK(max_coeff_diff(lhs, rhs) < 1e-8);
}

TEST_CASE("ladder_set_two_mode_parity_roots") {
    AlgebraBasis b = majorana_basis(2, false);
    LadderSet ls = ladder_set(b);
    REQUIRE(ls.raising.size() == 2);
    std::vector<std::pair<long, long>> rows;
    for (int r = 0; r < 2; ++r) {
        CHECK(std::abs(ls.roots(r, 0) - std::lround(ls.roots(r, 0))) < 1e-8);
        CHECK(std::abs(ls.roots(r, 1) - std::lround(ls.roots(r, 1))) < 1e-8);
        rows.push_back({std::lround(ls.roots(r, 0)), std::lround(ls.roots(r, 1))});
    }
    std::sort(rows.begin(), rows.end());
    CHECK(rows[0] == std::pair<long, long>{2, -2});
    CHECK(rows[1] == std::pair<long, long>{2, 2});
}

TEST_CASE("ladder_set_requires_maximal_csa") {
    AlgebraBasis b = one_body_basis(2);
    b.csa.pop_back();
    CHECK_THROWS_AS(ladder_set(b), constraint_error);
}

TEST_CASE("closure_basis_feeds_ladder_set") {
    std::vector<OpPoly> seeds = {pauli_op('x', 1, 1), pauli_op('y', 1, 1)};
    for (OpPoly& s : seeds) s *= cplx(0, 1);
    AlgebraBasis c = lie_closure(seeds);
    LadderSet ls = ladder_set(c);
    REQUIRE(ls.raising.size() == 1);
    CHECK(std::abs(ls.roots(0, 0)) == doctest::Approx(2.0).epsilon(1e-6));
}
