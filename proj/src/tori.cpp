#include "mfsolv/tori.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

#include "mfsolv/optim.hpp"

namespace mfs {

namespace {

struct AdFlow {
    int d = 0;
    std::vector<int> angle_gens;  // non-CSA generator indices
    std::vector<Eigen::MatrixXd> ads;
    Eigen::VectorXd off_mask;     // 1 on non-CSA coordinates

    Eigen::MatrixXd step(std::size_t j, double theta) const {
        return (-theta * ads[j]).exp();
    }
};

}  // namespace

ToriResult maximal_tori_diagonalize(const OpPoly& x,
                                    std::shared_ptr<const AlgebraBasis> basis,
                                    std::uint64_t seed, int restarts) {
    if (!basis) throw constraint_error("diagonalization needs a basis");
    const AlgebraBasis& b = *basis;
    Eigen::VectorXd c = expand_in_basis(b, x).coeffs;
    StructureConstants sc = structure_constants(b);

    AdFlow flow;
    flow.d = b.dim();
    flow.off_mask = Eigen::VectorXd::Ones(flow.d);
    for (int i : b.csa) flow.off_mask(i) = 0.0;
    for (int g = 0; g < flow.d; ++g) {
        if (flow.off_mask(g) == 0.0) continue;
        flow.angle_gens.push_back(g);
        flow.ads.push_back(sc.ad_matrix(g));
    }
    const std::size_t m = flow.angle_gens.size();

    auto frame = [&](const Eigen::VectorXd& th) {
        // prefixes s_j = M_j ... M_1 c, 1-based; s_0 = c
        std::vector<Eigen::VectorXd> s(m + 1);
        s[0] = c;
        for (std::size_t j = 0; j < m; ++j) s[j + 1] = flow.step(j, th(j)) * s[j];
        return s;
    };
    auto fval = [&](const Eigen::VectorXd& th) {
        Eigen::VectorXd v = frame(th).back();
        return (flow.off_mask.array() * v.array()).matrix().squaredNorm();
    };
    auto gval = [&](const Eigen::VectorXd& th) {
        std::vector<Eigen::VectorXd> s = frame(th);
        Eigen::VectorXd w = (flow.off_mask.array() * s[m].array()).matrix();
        Eigen::VectorXd g(m);
        for (std::size_t j = m; j-- > 0;) {
            g(j) = -2.0 * w.dot(flow.ads[j] * s[j + 1]);
            if (j > 0) w = flow.step(j, th(j)).transpose() * w;
        }
        return g;
    };

    const double scale = std::max(c.norm(), 1.0);
    const double accept = 1e-10 * scale;
    GdOptions opts;
    opts.f_target = 1e-24 * scale * scale;

    ToriResult best;
    best.residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_th;
    std::uint64_t stream = seed_mix(seed, 0x70F1ull);
    for (int r = 0; r < std::max(restarts, 1); ++r) {
        Eigen::VectorXd th0 = Eigen::VectorXd::Zero(m);
        if (r > 0) {
            std::uint64_t rng = seed_mix(stream, static_cast<std::uint64_t>(r));
            for (std::size_t j = 0; j < m; ++j) th0(j) = uniform_angle(rng);
        }
        OptResult opt = gradient_descent_bb(fval, gval, th0, opts);
        double resid = std::sqrt(std::max(opt.f, 0.0));
        best.restarts_used = r + 1;
        if (resid < best.residual) {
            best.residual = resid;
            best_th = opt.x;
        }
        if (best.residual <= accept) break;
    }

    std::vector<Eigen::VectorXd> s = frame(best_th);
    best.csa_coeffs.resize(b.csa.size());
    for (std::size_t i = 0; i < b.csa.size(); ++i) best.csa_coeffs(i) = s[m](b.csa[i]);

    best.rotation.basis = std::move(basis);
    for (std::size_t j = 0; j < m; ++j) {
        if (std::abs(best_th(j)) < 1e-15) continue;
        best.rotation.factors.push_back({flow.angle_gens[j], best_th(j)});
    }
    return best;
}

}
