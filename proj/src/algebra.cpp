#include "mfsolv/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "mfsolv/matrix_rep.hpp"
#include "mfsolv/optim.hpp"

namespace mfs {

// ---- basis accessors ----

int AlgebraBasis::find_generator(const std::string& label) const {
    for (int i = 0; i < dim(); ++i)
        if (info[i].label == label) return i;
    throw parse_error("unknown generator label '" + label + "'");
}

OpPoly AlgebraBasis::csa_observable(int i) const {
    if (i < 0 || i >= static_cast<int>(csa.size()))
        throw constraint_error("CSA slot out of range");
    OpPoly obs = gens[csa[i]];
    obs *= cplx(0.0, -csa_obs_scale);
    return obs;
}

std::vector<double> AlgebraBasis::csa_spectrum(int i) const {
    if (i < 0 || i >= static_cast<int>(csa.size()))
        throw constraint_error("CSA slot out of range");
    const GenInfo& gi = info[csa[i]];
    if (!gi.spectrum.empty()) return gi.spectrum;
    switch (gi.kind) {
        case GenInfo::Kind::one_body_phase: return {0.0, 1.0};
        case GenInfo::Kind::majorana_pair: return {1.0, -1.0};
        case GenInfo::Kind::qubit_axis: return {1.0, -1.0};
        default: break;
    }
    // generic CSA element: read distinct eigenvalues off the dense observable
    EigenSystem sys = exact_eigensystem(to_matrix(csa_observable(i), n));
    std::vector<double> distinct;
    for (int k = 0; k < sys.values.size(); ++k) {
        bool seen = false;
        for (double v : distinct) seen |= std::abs(v - sys.values(k)) < 1e-8;
        if (!seen) distinct.push_back(sys.values(k));
    }
    return distinct;
}

// ---- factories ----

AlgebraBasis one_body_basis(int n) {
    AlgebraBasis b;
    b.family = Family::fermionic;
    b.n = n;
    b.csa_obs_scale = 1.0;
    for (int p = 1; p <= n; ++p) {
        for (int q = p + 1; q <= n; ++q) {
            OpPoly plane(Family::fermionic, n);
            plane.add_term({{'c', p}, {'a', q}}, 0.5);
            plane.add_term({{'c', q}, {'a', p}}, -0.5);
            GenInfo gi;
            gi.kind = GenInfo::Kind::one_body_plane;
            gi.p = p;
            gi.q = q;
            gi.label = "k_" + std::to_string(p) + "_" + std::to_string(q);
            b.gens.push_back(std::move(plane));
            b.info.push_back(std::move(gi));

            OpPoly primed(Family::fermionic, n);
            primed.add_term({{'c', p}, {'a', q}}, cplx(0, 0.5));
            primed.add_term({{'c', q}, {'a', p}}, cplx(0, 0.5));
            GenInfo gip;
            gip.kind = GenInfo::Kind::one_body_plane;
            gip.p = p;
            gip.q = q;
            gip.primed = true;
            gip.label = "kp_" + std::to_string(p) + "_" + std::to_string(q);
            b.gens.push_back(std::move(primed));
            b.info.push_back(std::move(gip));
        }
    }
    for (int p = 1; p <= n; ++p) {
        OpPoly phase(Family::fermionic, n);
        phase.add_term({{'c', p}, {'a', p}}, cplx(0, 1));
        GenInfo gi;
        gi.kind = GenInfo::Kind::one_body_phase;
        gi.p = p;
        gi.label = "ph_" + std::to_string(p);
        b.csa.push_back(b.dim());
        b.gens.push_back(std::move(phase));
        b.info.push_back(std::move(gi));
    }
    return b;
}

AlgebraBasis majorana_basis(int n, bool with_zero) {
    AlgebraBasis b;
    b.family = Family::majorana;
    b.n = n;
    b.csa_obs_scale = 2.0;
    for (int j = 1; j <= 2 * n; ++j) {
        for (int k = j + 1; k <= 2 * n; ++k) {
            OpPoly pair(Family::majorana, n);
            pair.add_term({{'g', j}, {'g', k}}, 0.5);
            GenInfo gi;
            gi.kind = GenInfo::Kind::majorana_pair;
            gi.p = j;
            gi.q = k;
            gi.label = "s_" + std::to_string(j) + "_" + std::to_string(k);
            if (k == j + 1 && j % 2 == 1) b.csa.push_back(b.dim());
            b.gens.push_back(std::move(pair));
            b.info.push_back(std::move(gi));
        }
    }
    if (with_zero) {
        for (int j = 1; j <= 2 * n; ++j) {
            OpPoly zero(Family::majorana, n);
            zero.add_term({{'g', j}}, cplx(0, -0.5));
            GenInfo gi;
            gi.kind = GenInfo::Kind::majorana_zero;
            gi.p = j;
            gi.label = "s_" + std::to_string(j) + "_0";
            b.gens.push_back(std::move(zero));
            b.info.push_back(std::move(gi));
        }
    }
    return b;
}

AlgebraBasis qubit_basis(int n) {
    AlgebraBasis b;
    b.family = Family::pauli;
    b.n = n;
    b.csa_obs_scale = 1.0;
    const char axes[3] = {'x', 'y', 'z'};
    const char* prefix[3] = {"rx_", "ry_", "rz_"};
    for (int k = 1; k <= n; ++k) {
        for (int a = 0; a < 3; ++a) {
            OpPoly rot(Family::pauli, n);
            rot.add_term({{axes[a], k}}, cplx(0, 1));
            GenInfo gi;
            gi.kind = GenInfo::Kind::qubit_axis;
            gi.p = k;
            gi.axis = axes[a];
            gi.label = prefix[a] + std::to_string(k);
            if (axes[a] == 'z') b.csa.push_back(b.dim());
            b.gens.push_back(std::move(rot));
            b.info.push_back(std::move(gi));
        }
    }
    return b;
}

// ---- coefficient-space machinery ----

namespace {

using TermIndex = std::map<std::string, int>;

TermIndex index_terms(const std::vector<const OpPoly*>& polys) {
    TermIndex idx;
    for (const OpPoly* p : polys)
        for (const auto& [key, c] : p->terms())
            idx.try_emplace(key, static_cast<int>(idx.size()));
    return idx;
}

Eigen::VectorXcd vectorize(const OpPoly& p, const TermIndex& idx) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(idx.size());
    for (const auto& [key, c] : p.terms()) {
        auto it = idx.find(key);
        if (it == idx.end()) return Eigen::VectorXcd();  // outside the span
        v(it->second) = c;
    }
    return v;
}

struct SpanSolver {
    TermIndex idx;
    Eigen::MatrixXcd b;  // columns = basis vectors
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr;

    explicit SpanSolver(const std::vector<OpPoly>& gens) {
        std::vector<const OpPoly*> ptrs;
        ptrs.reserve(gens.size());
        for (const OpPoly& g : gens) ptrs.push_back(&g);
        idx = index_terms(ptrs);
        b.resize(idx.size(), gens.size());
        for (std::size_t j = 0; j < gens.size(); ++j) b.col(j) = vectorize(gens[j], idx);
        qr.compute(b);
    }

    ExpandResult solve(const OpPoly& p) const {
        ExpandResult out;
        Eigen::VectorXcd v = vectorize(p, idx);
        if (v.size() == 0) {
            out.residual = coeff_norm(p);
            out.coeffs = Eigen::VectorXd::Zero(b.cols());
            return out;
        }
        Eigen::VectorXcd x = qr.solve(v);
        out.residual = (b * x - v).norm();
        out.max_imag = x.size() ? x.imag().cwiseAbs().maxCoeff() : 0.0;
        out.coeffs = x.real();
        return out;
    }
};

}  // namespace

ExpandResult expand_in_basis(const AlgebraBasis& basis, const OpPoly& p) {
    if (p.family() != basis.family)
        throw constraint_error("polynomial family does not match the basis family");
    SpanSolver solver(basis.gens);
    ExpandResult res = solver.solve(p);
    double scale = std::max(coeff_norm(p), 1e-30);
    if (res.residual > tol::kStructureReality * scale)
        throw constraint_error("polynomial is not in the span of the basis (residual " +
                               std::to_string(res.residual) + ")");
    if (res.max_imag > tol::kStructureReality * std::max(1.0, res.coeffs.cwiseAbs().maxCoeff()))
        throw constraint_error("expansion coefficients are not real (max imaginary part " +
                               std::to_string(res.max_imag) + ")");
    return res;
}

Eigen::MatrixXd StructureConstants::ad_matrix(int g) const {
    const int d = static_cast<int>(xi.size());
    Eigen::MatrixXd ad(d, d);
    for (int k = 0; k < d; ++k) ad.row(k) = xi[k].row(g);
    return ad;
}

StructureConstants structure_constants(const AlgebraBasis& basis) {
    const int d = basis.dim();
    SpanSolver solver(basis.gens);
    StructureConstants sc;
    sc.xi.assign(d, Eigen::MatrixXd::Zero(d, d));
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            OpPoly comm = commutator(basis.gens[i], basis.gens[j]);
            ExpandResult ex = solver.solve(comm);
            double scale = std::max(coeff_norm(comm), 1.0);
            sc.max_residual = std::max(sc.max_residual, ex.residual / scale);
            sc.max_imag = std::max(sc.max_imag, ex.max_imag);
            if (ex.residual > tol::kStructureReality * scale)
                throw constraint_error("basis is not closed: [" + basis.info[i].label + ", " +
                                       basis.info[j].label + "] leaves the span");
            for (int k = 0; k < d; ++k) {
                sc.xi[k](i, j) = ex.coeffs(k);
                sc.xi[k](j, i) = -ex.coeffs(k);
            }
        }
    }
    return sc;
}

// ---- closure ----

namespace {

using SparseVec = std::map<std::string, cplx>;

SparseVec sparse_of(const OpPoly& p) {
    SparseVec v;
    for (const auto& [key, c] : p.terms()) v[key] = c;
    return v;
}

cplx sparse_dot(const SparseVec& a, const SparseVec& b) {
    cplx s = 0.0;
    const SparseVec& small = a.size() <= b.size() ? a : b;
    const SparseVec& big = a.size() <= b.size() ? b : a;
    for (const auto& [key, c] : small) {
        auto it = big.find(key);
        if (it == big.end()) continue;
        s += (&small == &a) ? std::conj(c) * it->second : std::conj(it->second) * c;
    }
    return s;
}

double sparse_norm(const SparseVec& a) { return std::sqrt(std::abs(sparse_dot(a, a))); }

void sparse_axpy(SparseVec& y, cplx alpha, const SparseVec& x) {
    for (const auto& [key, c] : x) {
        cplx& slot = y[key];
        slot += alpha * c;
        if (std::abs(slot) < 1e-300) y.erase(key);
    }
}

// Projects v against the orthonormal set q (twice, for stability); returns
// the residual norm.
double orthogonalize(SparseVec& v, const std::vector<SparseVec>& q) {
    for (int pass = 0; pass < 2; ++pass)
        for (const SparseVec& u : q) sparse_axpy(v, -sparse_dot(u, v), u);
    return sparse_norm(v);
}

}  // namespace

AlgebraBasis lie_closure(const std::vector<OpPoly>& seeds, int cap) {
    if (seeds.empty()) throw constraint_error("lie_closure needs at least one seed");
    Family fam = seeds.front().family();
    int n = 0;
    for (const OpPoly& s : seeds) {
        if (s.family() != fam) throw constraint_error("closure seeds mix operator families");
        if (!is_antihermitian(s, 1e-10))
            throw constraint_error("closure seed is not antihermitian");
        n = std::max(n, s.modes());
    }

    std::vector<OpPoly> basis;
    std::vector<SparseVec> ortho;
    std::deque<std::pair<int, int>> work;

    auto try_add = [&](const OpPoly& cand) {
        double nrm = coeff_norm(cand);
        if (nrm < 1e-12) return;
        SparseVec v = sparse_of(cand);
        double resid = orthogonalize(v, ortho);
        if (resid <= tol::kIndependence * nrm) return;
        if (static_cast<int>(basis.size()) >= cap)
            throw capacity_error("lie closure exceeded the cap of " + std::to_string(cap) +
                                 " generators");
        for (auto& [key, c] : v) c /= resid;
        ortho.push_back(std::move(v));
        OpPoly scaled = cand;
        scaled *= cplx(1.0 / nrm, 0.0);
        int j = static_cast<int>(basis.size());
        basis.push_back(std::move(scaled));
        for (int i = 0; i < j; ++i) work.emplace_back(i, j);
    };

    for (const OpPoly& s : seeds) try_add(s);
    while (!work.empty()) {
        auto [i, j] = work.front();
        work.pop_front();
        try_add(commutator(basis[i], basis[j]));
    }

    const int d = static_cast<int>(basis.size());

    // Cartan subalgebra: kernel of the adjoint action of a generic element.
    SpanSolver solver(basis);
    std::uint64_t rng = 0x5EEDull;
    std::vector<OpPoly> cartan;
    for (int attempt = 0; attempt < 5 && cartan.empty(); ++attempt) {
        OpPoly x(fam, n);
        for (int k = 0; k < d; ++k) {
            OpPoly g = basis[k];
            g *= cplx(0.4 + uniform_unit(rng), 0.0);
            x += g;
        }
        Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(d, d);
        bool ok = true;
        for (int j = 0; j < d && ok; ++j) {
            ExpandResult ex = solver.solve(commutator(x, basis[j]));
            double scale = std::max(1.0, coeff_norm(basis[j]));
            ok = ex.residual <= 1e-8 * scale && ex.max_imag <= 1e-8;
            ad.col(j) = ex.coeffs;
        }
        if (!ok) continue;

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad, Eigen::ComputeFullV);
        double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        std::vector<OpPoly> cand;
        for (int k = 0; k < svd.singularValues().size(); ++k) {
            if (svd.singularValues()(k) > tol::kIndependence * std::max(smax, 1.0)) continue;
            OpPoly h(fam, n);
            for (int j = 0; j < d; ++j) {
                OpPoly g = basis[j];
                g *= cplx(svd.matrixV()(j, k), 0.0);
                h += g;
            }
            h *= cplx(1.0 / std::max(coeff_norm(h), 1e-30), 0.0);
            cand.push_back(std::move(h));
        }
        bool abelian = true;
        for (std::size_t a = 0; a < cand.size() && abelian; ++a)
            for (std::size_t b2 = a + 1; b2 < cand.size() && abelian; ++b2)
                abelian = coeff_norm(commutator(cand[a], cand[b2])) < 1e-8;
        if (abelian && !cand.empty()) cartan = std::move(cand);
    }
    if (cartan.empty())
        throw constraint_error("could not isolate a Cartan subalgebra for the closed basis");

    // Re-order the basis: Cartan elements first, then an independent
    // completion drawn from the closure.
    std::vector<OpPoly> arranged = cartan;
    std::vector<SparseVec> q;
    for (const OpPoly& h : cartan) {
        SparseVec v = sparse_of(h);
        double nrm = orthogonalize(v, q);
        for (auto& [key, c] : v) c /= nrm;
        q.push_back(std::move(v));
    }
    for (const OpPoly& g : basis) {
        SparseVec v = sparse_of(g);
        double resid = orthogonalize(v, q);
        if (resid <= tol::kIndependence * std::max(coeff_norm(g), 1e-30)) continue;
        for (auto& [key, c] : v) c /= resid;
        q.push_back(std::move(v));
        arranged.push_back(g);
    }
    if (arranged.size() != basis.size())
        throw constraint_error("Cartan completion lost dimensions");

    AlgebraBasis closed;
    closed.family = fam;
    closed.n = n;
    closed.gens = std::move(arranged);
    closed.info.assign(d, GenInfo{});
    for (int i = 0; i < d; ++i) {
        closed.info[i].label = (i < static_cast<int>(cartan.size()))
                                   ? "h" + std::to_string(i + 1)
                                   : "e" + std::to_string(i + 1 - cartan.size());
    }
    closed.csa.resize(cartan.size());
    for (std::size_t i = 0; i < cartan.size(); ++i) closed.csa[i] = static_cast<int>(i);
    return closed;
}

// ---- ladder decomposition ----

LadderSet ladder_set(const AlgebraBasis& basis) {
    const int d = basis.dim();
    const int r = static_cast<int>(basis.csa.size());
    if (r == 0) throw constraint_error("basis has no designated CSA");

    StructureConstants sc = structure_constants(basis);
    std::vector<Eigen::MatrixXd> ad(r);
    for (int l = 0; l < r; ++l) ad[l] = sc.ad_matrix(basis.csa[l]);

    std::uint64_t rng = 0x1ADDE7ull;
    for (int attempt = 0; attempt < 5; ++attempt) {
        Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(d, d);
        std::vector<double> w(r);
        for (int l = 0; l < r; ++l) {
            w[l] = 0.3 + uniform_unit(rng);
            joint += w[l] * ad[l];
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(joint.cast<cplx>());
        if (es.info() != Eigen::Success) continue;

        bool separated = true;
        std::vector<Eigen::VectorXd> root_list;
        std::vector<OpPoly> ops;
        std::vector<bool> zero_root;
        for (int k = 0; k < d && separated; ++k) {
            Eigen::VectorXcd v = es.eigenvectors().col(k);
            Eigen::VectorXd roots(r);
            bool zero = true;
            for (int l = 0; l < r; ++l) {
                Eigen::VectorXcd image = ad[l].cast<cplx>() * v;
                cplx mu = v.dot(image);  // v is unit-normalized by Eigen
                if ((image - mu * v).norm() > 1e-8 * std::max(1.0, std::abs(mu))) {
                    separated = false;
                    break;
                }
                cplx alpha = cplx(0, -basis.csa_obs_scale) * mu;
                if (std::abs(alpha.imag()) > 1e-8) {
                    separated = false;
                    break;
                }
                roots(l) = alpha.real();
                zero &= std::abs(alpha.real()) <= 1e-8;
            }
            if (!separated) break;
            OpPoly op(basis.family, basis.n);
            int j_star = 0;
            for (int j = 1; j < d; ++j)
                if (std::abs(v(j)) > std::abs(v(j_star)) + 1e-12) j_star = j;
            Eigen::VectorXcd scaled = v / v(j_star);
            for (int j = 0; j < d; ++j) {
                if (std::abs(scaled(j)) < 1e-12) continue;
                OpPoly g = basis.gens[j];
                g *= scaled(j);
                op += g;
            }
            ops.push_back(std::move(op));
            root_list.push_back(roots);
            zero_root.push_back(zero);
        }
        if (!separated) continue;

        int zeros = static_cast<int>(std::count(zero_root.begin(), zero_root.end(), true));
        if (zeros != r)
            throw constraint_error("designated CSA is not maximal abelian: centralizer dimension " +
                                   std::to_string(zeros) + " vs CSA size " + std::to_string(r));

        // symbolic verification of every nonzero root
        for (std::size_t k = 0; k < ops.size(); ++k) {
            if (zero_root[k]) continue;
            for (int l = 0; l < r; ++l) {
                OpPoly lhs = commutator(basis.csa_observable(l), ops[k]);
                OpPoly rhs = ops[k];
                rhs *= cplx(root_list[k](l), 0.0);
                if (max_coeff_diff(lhs, rhs) > 1e-8 * std::max(1.0, max_abs_coeff(ops[k])))
                    throw constraint_error("ladder operator failed symbolic root verification");
            }
        }

        LadderSet out;
        std::vector<bool> used(ops.size(), false);
        for (std::size_t k = 0; k < ops.size(); ++k) {
            if (zero_root[k] || used[k]) continue;
            int partner = -1;
            for (std::size_t m = k + 1; m < ops.size(); ++m) {
                if (zero_root[m] || used[m]) continue;
                if ((root_list[k] + root_list[m]).lpNorm<Eigen::Infinity>() <= 1e-8) {
                    partner = static_cast<int>(m);
                    break;
                }
            }
            if (partner < 0)
                throw constraint_error("unpaired ladder root encountered");
            used[k] = used[partner] = true;
            int lead = 0;
            while (std::abs(root_list[k](lead)) <= 1e-8) ++lead;
            bool k_raises = root_list[k](lead) > 0;
            const auto& up = k_raises ? ops[k] : ops[partner];
            const auto& down = k_raises ? ops[partner] : ops[k];
            Eigen::VectorXd up_roots = k_raises ? root_list[k] : root_list[partner];
            out.raising.push_back(up);
            out.lowering.push_back(down);
            out.roots.conservativeResize(static_cast<int>(out.raising.size()), r);
            out.roots.row(static_cast<int>(out.raising.size()) - 1) = up_roots.transpose();
        }
        return out;
    }
    throw constraint_error("could not separate ladder root spaces");
}

}
