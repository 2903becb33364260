#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <mfsolv/optim.hpp>
#include <mfsolv/tori.hpp>

#include "test_util.hpp"

using namespace mfs;

namespace {

std::shared_ptr<const AlgebraBasis> shared_basis(AlgebraBasis b) {
    return std::make_shared<const AlgebraBasis>(std::move(b));
}

OpPoly from_coeffs(const AlgebraBasis& b, const Eigen::VectorXd& c) {
    OpPoly x(b.family, b.n);
    for (int k = 0; k < b.dim(); ++k) {
        if (std::abs(c(k)) < 1e-15) continue;
        OpPoly g = b.gens[k];
        g *= cplx(c(k), 0.0);
        x += g;
    }
    return x;
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

double off_csa_norm(const AlgebraBasis& b, const OpPoly& p) {
    Eigen::VectorXd c = expand_in_basis(b, p).coeffs;
    for (int i : b.csa) c(i) = 0.0;
    return c.norm();
}

}  // namespace

TEST_CASE("torus_element_stays_put") {
    auto basis = shared_basis(one_body_basis(3));
    OpPoly x(Family::fermionic, 3);
    for (int p = 1; p <= 3; ++p) {
        OpPoly g = number_op(p, 3);
        g *= cplx(0, 0.3 * p);
        x += g;
    }
    ToriResult res = maximal_tori_diagonalize(x, basis, 5);
    CHECK(res.restarts_used == 1);
    CHECK(res.rotation.factors.empty());
    CHECK(res.residual < 1e-12);
    CHECK(res.csa_coeffs(0) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(res.csa_coeffs(2) == doctest::Approx(0.9).epsilon(1e-10));
}

TEST_CASE("transverse_axis_lands_on_poles") {
    auto basis = shared_basis(qubit_basis(1));
    OpPoly x = pauli_op('x', 1, 1);
    x *= cplx(0, 1);
    ToriResult res = maximal_tori_diagonalize(x, basis, 3);
    CHECK(res.residual < 1e-9);
    CHECK(std::abs(res.csa_coeffs(0)) == doctest::Approx(1.0).epsilon(1e-8));
    OpPoly imaged = apply_rotation(res.rotation, x);
    CHECK(off_csa_norm(*basis, imaged) < 1e-8);
}

TEST_CASE("random_orbital_elements_match_matrix_spectra") {
    auto basis = shared_basis(one_body_basis(3));
    std::uint64_t rng = 41;
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXcd g(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                g(i, j) = cplx(2 * uniform_unit(rng) - 1, 2 * uniform_unit(rng) - 1);
        g = ((g - g.adjoint()) / 2).eval();

        OpPoly x(Family::fermionic, 3);
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                if (std::abs(g(p, q)) > 1e-15)
                    x.add_term({{'c', p + 1}, {'a', q + 1}}, g(p, q));

        ToriResult res = maximal_tori_diagonalize(x, basis, 100 + rep);
        CHECK(res.residual < 1e-8);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cplx(0, -1) * g);
        std::vector<double> expect(es.eigenvalues().data(), es.eigenvalues().data() + 3);
        std::vector<double> got(res.csa_coeffs.data(), res.csa_coeffs.data() + 3);
        expect = sorted(expect);
        got = sorted(got);
        for (int k = 0; k < 3; ++k)
            CHECK(got[k] == doctest::Approx(expect[k]).epsilon(1e-7));

        OpPoly imaged = apply_rotation(res.rotation, x);
        CHECK(off_csa_norm(*basis, imaged) < 1e-7);
    }
}

TEST_CASE("random_spin_elements_match_bloch_lengths") {
    auto basis = shared_basis(qubit_basis(2));
    std::uint64_t rng = 53;
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::VectorXd c(basis->dim());
        for (int k = 0; k < c.size(); ++k) c(k) = 2 * uniform_unit(rng) - 1;
        OpPoly x = from_coeffs(*basis, c);
        ToriResult res = maximal_tori_diagonalize(x, basis, 200 + rep);
        CHECK(res.residual < 1e-8);
        for (int k = 0; k < 2; ++k) {
            double bloch = std::sqrt(c(3 * k) * c(3 * k) + c(3 * k + 1) * c(3 * k + 1) +
                                     c(3 * k + 2) * c(3 * k + 2));
            CHECK(std::abs(res.csa_coeffs(k)) == doctest::Approx(bloch).epsilon(1e-7));
        }
    }
}

TEST_CASE("random_pair_elements_match_canonical_frequencies") {
    auto basis = shared_basis(majorana_basis(2, false));
    std::uint64_t rng = 67;
    for (int rep = 0; rep < 2; ++rep) {
        Eigen::VectorXd c(basis->dim());
        for (int k = 0; k < c.size(); ++k) c(k) = 2 * uniform_unit(rng) - 1;
        OpPoly x = from_coeffs(*basis, c);
        ToriResult res = maximal_tori_diagonalize(x, basis, 300 + rep);
        CHECK(res.residual < 1e-8);

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
        for (int k = 0; k < basis->dim(); ++k) {
            const GenInfo& gi = basis->info[k];
            a(gi.p - 1, gi.q - 1) += c(k);
            a(gi.q - 1, gi.p - 1) -= c(k);
        }
        Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(a.cast<cplx>())
                                  .eigenvalues();
        std::vector<double> freq;
        for (int k = 0; k < 4; ++k)
            if (ev(k).imag() > 1e-9) freq.push_back(ev(k).imag());
        REQUIRE(freq.size() == 2);
        std::vector<double> got = {std::abs(res.csa_coeffs(0)), std::abs(res.csa_coeffs(1))};
        CHECK(sorted(got)[0] == doctest::Approx(sorted(freq)[0]).epsilon(1e-7));
        CHECK(sorted(got)[1] == doctest::Approx(sorted(freq)[1]).epsilon(1e-7));
    }
}
