#include "mfsolv/rotation.hpp"

#include <cmath>

#include "mfsolv/matrix_rep.hpp"
#include "mfsolv/transforms.hpp"

namespace mfs {

// ---- construction ----

MFRotation make_rotation(std::shared_ptr<const AlgebraBasis> basis,
                         const std::vector<std::pair<std::string, double>>& steps) {
    if (!basis) throw constraint_error("rotation needs a basis");
    MFRotation rot;
    rot.basis = std::move(basis);
    rot.factors.reserve(steps.size());
    for (const auto& [label, angle] : steps)
        rot.factors.push_back({rot.basis->find_generator(label), angle});
    return rot;
}

MFRotation inverse(const MFRotation& rot) {
    MFRotation inv;
    inv.basis = rot.basis;
    inv.factors.assign(rot.factors.rbegin(), rot.factors.rend());
    for (RotationFactor& f : inv.factors) f.angle = -f.angle;
    return inv;
}

MFRotation orbital_rotation(std::shared_ptr<const AlgebraBasis> basis,
                            const std::vector<double>& thetas,
                            const std::vector<double>& phis) {
    if (!basis) throw constraint_error("rotation needs a basis");
    const int n = basis->n;
    const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    if (thetas.size() != pairs || phis.size() != pairs)
        throw constraint_error("orbital rotation needs one angle pair per mode pair");
    std::vector<std::pair<std::string, double>> steps;
    std::size_t t = 0;
    for (int p = 1; p <= n; ++p)
        for (int q = p + 1; q <= n; ++q, ++t) {
            std::string suffix = "_" + std::to_string(p) + "_" + std::to_string(q);
            if (std::abs(thetas[t]) > 1e-15) steps.push_back({"k" + suffix, thetas[t]});
            if (std::abs(phis[t]) > 1e-15) steps.push_back({"kp" + suffix, phis[t]});
        }
    return make_rotation(std::move(basis), steps);
}

// ---- closed-form conjugation ----

namespace {

Eigen::MatrixXcd one_body_step_matrix(const GenInfo& gi, double theta, int n) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    if (gi.kind == GenInfo::Kind::one_body_phase) {
        g(gi.p - 1, gi.p - 1) = cplx(0, 1);
    } else if (gi.primed) {
        g(gi.p - 1, gi.q - 1) = cplx(0, 0.5);
        g(gi.q - 1, gi.p - 1) = cplx(0, 0.5);
    } else {
        g(gi.p - 1, gi.q - 1) = 0.5;
        g(gi.q - 1, gi.p - 1) = -0.5;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cplx(0, 1) * g);
    Eigen::VectorXcd phases =
        (cplx(0, theta) * es.eigenvalues().cast<cplx>().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

OpPoly conjugate_one_body(const OpPoly& p, const Eigen::MatrixXcd& w, int n) {
    return substitute_factors(p, Family::fermionic, n, [&](const Factor& f) {
        OpPoly image(Family::fermionic, n);
        for (int r = 0; r < n; ++r) {
            cplx c = w(r, f.index - 1);
            if (f.tag == 'a') c = std::conj(c);
            if (std::abs(c) < 1e-15) continue;
            image.add_term({{f.tag, r + 1}}, c);
        }
        return image;
    });
}

OpPoly conjugate_qubit_axis(const OpPoly& p, const GenInfo& gi, double theta, int n) {
    const char cycle[3] = {'x', 'y', 'z'};
    int a = 0;
    while (cycle[a] != gi.axis) ++a;
    const char b = cycle[(a + 1) % 3], c = cycle[(a + 2) % 3];
    const double cs = std::cos(2 * theta), sn = std::sin(2 * theta);
    return substitute_factors(p, Family::pauli, n, [&](const Factor& f) {
        OpPoly image(Family::pauli, n);
        if (f.index != gi.p || f.tag == gi.axis) {
            image.add_term({f}, 1.0);
        } else if (f.tag == b) {
            image.add_term({{b, f.index}}, cs);
            image.add_term({{c, f.index}}, sn);
        } else {
            image.add_term({{c, f.index}}, cs);
            image.add_term({{b, f.index}}, -sn);
        }
        return image;
    });
}

OpPoly conjugate_majorana_pair(const OpPoly& p, const GenInfo& gi, double theta, int n) {
    const double cs = std::cos(theta), sn = std::sin(theta);
    return substitute_factors(p, Family::majorana, n, [&](const Factor& f) {
        OpPoly image(Family::majorana, n);
        if (f.index == gi.p) {
            image.add_term({{'g', gi.p}}, cs);
            image.add_term({{'g', gi.q}}, sn);
        } else if (f.index == gi.q) {
            image.add_term({{'g', gi.q}}, cs);
            image.add_term({{'g', gi.p}}, -sn);
        } else {
            image.add_term({f}, 1.0);
        }
        return image;
    });
}

OpPoly conjugate_majorana_zero(const OpPoly& p, const GenInfo& gi, double theta, int n) {
    const double cs = std::cos(theta), sn = std::sin(theta);
    return substitute_factors(p, Family::majorana, n, [&](const Factor& f) {
        OpPoly image(Family::majorana, n);
        if (f.index == gi.p) {
            image.add_term({f}, 1.0);
        } else {
            image.add_term({f}, cs);
            image.add_term({{'g', gi.p}, {'g', f.index}}, cplx(0, sn));
        }
        return image;
    });
}

bool is_one_body(GenInfo::Kind k) {
    return k == GenInfo::Kind::one_body_plane || k == GenInfo::Kind::one_body_phase;
}

}  // namespace

OpPoly apply_rotation(const MFRotation& rot, const OpPoly& p) {
    if (!rot.basis) throw constraint_error("rotation needs a basis");
    const AlgebraBasis& basis = *rot.basis;
    if (p.family() != basis.family)
        throw constraint_error("polynomial family does not match the rotation basis");
    const int n = std::max(p.modes(), basis.n);

    OpPoly cur = p;
    std::size_t i = 0;
    while (i < rot.factors.size()) {
        const GenInfo& gi = basis.info[rot.factors[i].gen];
        switch (gi.kind) {
            case GenInfo::Kind::one_body_plane:
            case GenInfo::Kind::one_body_phase: {
                Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(n, n);
                while (i < rot.factors.size() &&
                       is_one_body(basis.info[rot.factors[i].gen].kind)) {
                    const RotationFactor& f = rot.factors[i];
                    w = one_body_step_matrix(basis.info[f.gen], f.angle, n) * w;
                    ++i;
                }
                cur = conjugate_one_body(cur, w, n);
                break;
            }
            case GenInfo::Kind::qubit_axis:
                cur = conjugate_qubit_axis(cur, gi, rot.factors[i].angle, n);
                ++i;
                break;
            case GenInfo::Kind::majorana_pair:
                cur = conjugate_majorana_pair(cur, gi, rot.factors[i].angle, n);
                ++i;
                break;
            case GenInfo::Kind::majorana_zero:
                cur = conjugate_majorana_zero(cur, gi, rot.factors[i].angle, n);
                ++i;
                break;
            default:
                throw constraint_error("rotation step '" + gi.label +
                                       "' has no closed-form action");
        }
    }
    return cur;
}

Eigen::MatrixXcd rotation_matrix(const MFRotation& rot) {
    if (!rot.basis) throw constraint_error("rotation needs a basis");
    const AlgebraBasis& basis = *rot.basis;
    const long dim = dense_dim(basis.family, basis.n);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const RotationFactor& f : rot.factors) {
        Mat m = to_matrix(basis.gens[f.gen], basis.n);
        Eigen::SelfAdjointEigenSolver<Mat> es(cplx(0, 1) * m);
        Eigen::VectorXcd phases =
            (cplx(0, -f.angle) * es.eigenvalues().cast<cplx>().array()).exp();
        u = u * (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
    }
    return u;
}

// ---- linear canonical transforms ----

std::vector<std::string> bogoliubov_violations(const BogoliubovTransform& t,
                                               double tolv) {
    const long n = t.u.rows();
    std::vector<std::string> out;
    if (t.u.cols() != n || t.v.rows() != n || t.v.cols() != n) {
        out.push_back("u and v must be square with matching shape");
        return out;
    }
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    auto probe = [&](const Eigen::MatrixXcd& resid, const char* name) {
        if (resid.norm() > tolv) out.push_back(name);
    };
    probe(t.u.adjoint() * t.u + t.v.adjoint() * t.v - id, "U^+ U + V^+ V = 1");
    probe(t.u * t.u.adjoint() + t.v.conjugate() * t.v.transpose() - id,
          "U U^+ + conj(V) V^T = 1");
    probe(t.u.transpose() * t.v + t.v.transpose() * t.u, "U^T V + V^T U = 0");
    probe(t.u * t.v.adjoint() + t.v.conjugate() * t.u.transpose(),
          "U V^+ + conj(V) U^T = 0");
    return out;
}

BogoliubovOps bogoliubov_generators(const BogoliubovTransform& t) {
    std::vector<std::string> bad = bogoliubov_violations(t);
    if (!bad.empty()) {
        std::string msg = "transform violates:";
        for (const std::string& name : bad) msg += " [" + name + "]";
        throw constraint_error(msg);
    }
    const int n = static_cast<int>(t.u.rows());
    BogoliubovOps ops;
    for (int q = 0; q < n; ++q) {
        OpPoly b(Family::fermionic, n);
        for (int p = 0; p < n; ++p) {
            if (std::abs(t.u(p, q)) > 1e-15) b.add_term({{'c', p + 1}}, t.u(p, q));
            if (std::abs(t.v(p, q)) > 1e-15) b.add_term({{'a', p + 1}}, t.v(p, q));
        }
        OpPoly bdag = adjoint(b);
        OpPoly num = multiply(b, bdag);
        num *= cplx(0, 1);
        ops.create.push_back(std::move(b));
        ops.annihilate.push_back(std::move(bdag));
        ops.csa.push_back(std::move(num));
    }
    return ops;
}

}
