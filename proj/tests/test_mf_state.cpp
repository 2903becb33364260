#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <mfsolv/matrix_rep.hpp>
#include <mfsolv/optim.hpp>
#include <mfsolv/rotation.hpp>

#include "test_util.hpp"

using namespace mfs;

namespace {

std::shared_ptr<const AlgebraBasis> shared_basis(AlgebraBasis b) {
    return std::make_shared<const AlgebraBasis>(std::move(b));
}

}  // namespace

TEST_CASE("qubit_products_pass_entangled_pairs_fail") {
    Vec plus_up = Vec::Zero(4);
    plus_up(0) = plus_up(1) = 1.0 / std::sqrt(2.0);  // (|00> + |01>)/sqrt2
    MeanFieldCheck ok = mf_state_check(plus_up, Family::pauli, 2);
    CHECK(ok.ok);
    CHECK(ok.detail == "single-qubit purity");

    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    MeanFieldCheck bad = mf_state_check(bell, Family::pauli, 2);
    CHECK(!bad.ok);
    CHECK(bad.deviation > 0.1);

    Vec ghz = Vec::Zero(8);
    ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
    CHECK(!mf_state_check(ghz, Family::pauli, 3).ok);
}

TEST_CASE("rotated_occupation_states_stay_mean_field") {
    auto basis = shared_basis(one_body_basis(3));
    MFRotation rot = orbital_rotation(basis, {0.6, -0.4, 1.2}, {0.2, 0.9, -0.7});
    Mat u = rotation_matrix(rot);
    for (std::uint64_t bits : {0b001ull, 0b011ull, 0b101ull, 0b111ull}) {
        Vec v = u.adjoint() * basis_state(3, bits);
        MeanFieldCheck chk = mf_state_check(v, Family::fermionic, 3);
        CHECK(chk.ok);
        CHECK(chk.detail == "one-body density idempotency");
    }
}

TEST_CASE("pair_condensate_passes_generalized_check") {
    // cos(t)|00> + sin(t)|11> is the vacuum of a two-mode pairing transform
    const double t = 0.7;
    Vec v = Vec::Zero(4);
    v(0) = std::cos(t);
    v(3) = std::sin(t);
    MeanFieldCheck chk = mf_state_check(v, Family::fermionic, 2);
    CHECK(chk.ok);
    CHECK(chk.detail == "generalized density idempotency");
}

TEST_CASE("pairing_vacuum_from_transform_matrices") {
    std::uint64_t rng = 5;
    const int n = 2;
    auto random_unitary = [&](int d) {
        Eigen::MatrixXcd m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                m(i, j) = cplx(2 * uniform_unit(rng) - 1, 2 * uniform_unit(rng) - 1);
        return Eigen::MatrixXcd(Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ() *
                                Eigen::MatrixXcd::Identity(d, d));
    };
    Eigen::MatrixXcd u1 = random_unitary(n), u2 = random_unitary(n);
    double lam = 0.9;
    BogoliubovTransform pair;
    pair.u = Eigen::MatrixXcd::Identity(n, n);
    pair.v = Eigen::MatrixXcd::Zero(n, n);
    pair.u(0, 0) = pair.u(1, 1) = std::cos(lam);
    pair.v(0, 1) = -std::sin(lam);
    pair.v(1, 0) = std::sin(lam);
    BogoliubovTransform t;
    t.u = u1 * pair.u * u2;
    t.v = u1.conjugate() * pair.v * u2;
    BogoliubovOps ops = bogoliubov_generators(t);

    // joint kernel of the annihilators is the transformed vacuum
    Mat stacked(4 * n, 4);
    for (int q = 0; q < n; ++q)
        stacked.block(4 * q, 0, 4, 4) = to_matrix(ops.annihilate[q], n);
    Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
    Vec vac = svd.matrixV().col(3);
    REQUIRE(svd.singularValues()(3) < 1e-10);

    MeanFieldCheck chk = mf_state_check(vac, Family::fermionic, n);
    CHECK(chk.ok);
    CHECK(chk.deviation < 1e-10);
}

TEST_CASE("disjoint_occupation_superposition_is_rejected") {
    Vec v = Vec::Zero(16);
    v(0b0011) = std::sqrt(0.7);
    v(0b1100) = std::sqrt(0.3);
    MeanFieldCheck chk = mf_state_check(v, Family::fermionic, 4);
    CHECK(!chk.ok);
    CHECK(chk.deviation > 0.1);
    CHECK(chk.detail == "one-body density idempotency");
}

TEST_CASE("majorana_family_routes_through_fermionic_checks") {
    Vec v = basis_state(2, 0b01);
    CHECK(mf_state_check(v, Family::majorana, 2).ok);
    Vec mixed = Vec::Zero(4);
    mixed(0) = mixed(1) = 1.0 / std::sqrt(2.0);  // parity-mixing superposition
    CHECK(!mf_state_check(mixed, Family::majorana, 2).ok);
}
