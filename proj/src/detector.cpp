#include "mfsolv/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mfsolv/optim.hpp"
#include "mfsolv/transforms.hpp"

namespace mfs {

// ---- rotation ansatz over the non-Cartan generators ----

namespace {

struct Ansatz {
    int dim = 0;
    std::vector<int> gens;                  // indices into the basis
    std::vector<std::string> labels;
    std::vector<Mat> evec;                  // A_k = V exp(-i theta L) V^+ pieces
    std::vector<Eigen::VectorXd> eval;

    int size() const { return static_cast<int>(gens.size()); }

    // psi <- exp(theta A_k) psi (or the adjoint)
    void factor(int k, double theta, Mat& psi, bool dagger) const {
        const double s = dagger ? theta : -theta;
        Mat tmp = evec[k].adjoint() * psi;
        for (int r = 0; r < dim; ++r)
            tmp.row(r) *= std::exp(cplx(0.0, s * eval[k](r)));
        psi = evec[k] * tmp;
    }

    // U(theta) phi with U = exp(t_1 A_1) ... exp(t_m A_m)
    Mat apply(const Eigen::VectorXd& theta, Mat psi) const {
        for (int k = size() - 1; k >= 0; --k) factor(k, theta(k), psi, false);
        return psi;
    }

    Mat unitary(const Eigen::VectorXd& theta) const {
        return apply(theta, Mat::Identity(dim, dim));
    }

    Mat generator_times(int k, const Mat& psi) const {
        Mat tmp = evec[k].adjoint() * psi;
        for (int r = 0; r < dim; ++r) tmp.row(r) *= cplx(0.0, -eval[k](r));
        return evec[k] * tmp;
    }
};

Ansatz make_ansatz(const std::vector<int>& picked, const std::vector<std::string>& labels,
                   const std::vector<Mat>& dense_gens, int dim) {
    Ansatz az;
    az.dim = dim;
    for (std::size_t i = 0; i < picked.size(); ++i) {
        const int g = picked[i];
        az.gens.push_back(g);
        az.labels.push_back(labels[g]);
        Eigen::SelfAdjointEigenSolver<Mat> es(cplx(0.0, 1.0) * dense_gens[g]);
        az.evec.push_back(es.eigenvectors());
        az.eval.push_back(es.eigenvalues());
    }
    return az;
}

// Per-column variances of U(theta) phi against a fixed hermitian matrix.
struct VarianceObjective {
    const Mat* h = nullptr;
    const Ansatz* ansatz = nullptr;
    Mat phi;

    Eigen::VectorXd per_ref(const Eigen::VectorXd& theta) const {
        const Mat psi = ansatz->apply(theta, phi);
        const Mat hpsi = (*h) * psi;
        Eigen::VectorXd out(psi.cols());
        for (int j = 0; j < psi.cols(); ++j) {
            const double e = std::real(psi.col(j).dot(hpsi.col(j)));
            out(j) = (hpsi.col(j) - e * psi.col(j)).squaredNorm();
        }
        return out;
    }

    double total(const Eigen::VectorXd& theta) const { return per_ref(theta).sum(); }

    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
        const int m = ansatz->size();
        std::vector<Mat> suffix(m + 1);
        suffix[m] = phi;
        for (int k = m - 1; k >= 0; --k) {
            suffix[k] = suffix[k + 1];
            ansatz->factor(k, theta(k), suffix[k], false);
        }
        const Mat& psi = suffix[0];
        const Mat hpsi = (*h) * psi;
        Mat cotangent = (*h) * hpsi;
        for (int j = 0; j < psi.cols(); ++j) {
            const double e = std::real(psi.col(j).dot(hpsi.col(j)));
            cotangent.col(j) -= 2.0 * e * hpsi.col(j);
        }
        Eigen::VectorXd grad(m);
        for (int k = 0; k < m; ++k) {
            const Mat tangent = ansatz->generator_times(k, suffix[k]);
            grad(k) = 2.0 * tangent.cwiseProduct(cotangent.conjugate()).sum().real();
            ansatz->factor(k, theta(k), cotangent, true);
        }
        return grad;
    }
};

struct SearchResult {
    Eigen::VectorXd theta;
    Eigen::VectorXd per;
    double total = std::numeric_limits<double>::infinity();
    int restarts = 0;
};

// Budgeted BFGS restarts (warm starts, then zeros, then uniform angles); every
// restart that lands within reach of the incumbent is re-polished by analytic
// gradient descent before the comparison.
SearchResult run_search(const VarianceObjective& obj, int budget, std::uint64_t seed,
                        double accept_abs, const std::vector<Eigen::VectorXd>& warm) {
    const int m = obj.ansatz->size();
    SearchResult best;
    if (m == 0) {
        best.theta = Eigen::VectorXd();
        best.per = obj.per_ref(best.theta);
        best.total = best.per.sum();
        return best;
    }
    auto f = [&obj](const Eigen::VectorXd& th) { return obj.total(th); };
    auto g = [&obj](const Eigen::VectorXd& th) { return obj.gradient(th); };
    GdOptions fine;
    fine.max_iters = 600;
    fine.grad_tol = 1e-15;

    BfgsOptions coarse;
    coarse.max_iters = 250;
    coarse.f_target = 0.25 * accept_abs;
    coarse.plateau_rel = 1e-2;
    coarse.plateau_window = 30;
    coarse.plateau_above = tol::kInconclusiveFactor * accept_abs;

    std::uint64_t chain = seed;
    const int starts = std::max(budget, static_cast<int>(warm.size()) + 1);
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd x0;
        if (s < static_cast<int>(warm.size()))
            x0 = warm[s];
        else if (s == static_cast<int>(warm.size()))
            x0 = Eigen::VectorXd::Zero(m);
        else {
            x0.resize(m);
            for (int i = 0; i < m; ++i) x0(i) = uniform_angle(chain);
        }
        OptResult r = bfgs_minimize(f, x0, coarse);
        ++best.restarts;
        if (r.f <= 1e4 * std::max(coarse.plateau_above, best.total)) {
            const OptResult p = gradient_descent_bb(f, g, r.x, fine);
            if (p.f < r.f) r = p;
        }
        if (r.f < best.total) {
            best.total = r.f;
            best.theta = r.x;
        }
        if (best.total <= coarse.f_target) break;
    }
    best.per = obj.per_ref(best.theta);
    best.total = best.per.sum();
    return best;
}

Mat columns_of(const Mat& id, const std::vector<int>& picked) {
    Mat phi(id.rows(), picked.size());
    for (std::size_t j = 0; j < picked.size(); ++j) phi.col(j) = id.col(picked[j]);
    return phi;
}

double column_variance(const Mat& h, int s) {
    double acc = std::imag(h(s, s)) * std::imag(h(s, s));
    for (int r = 0; r < h.rows(); ++r)
        if (r != s) acc += std::norm(h(r, s));
    return acc;
}

}  // namespace

// ---- minimize_variance ----

VarianceResult minimize_variance(const OpPoly& h, std::uint64_t reference_bits,
                                 std::shared_ptr<const AlgebraBasis> basis, int budget,
                                 std::uint64_t seed) {
    if (!basis) throw constraint_error("variance minimization requires a generator basis");
    if (budget < 1) throw constraint_error("restart budget must be positive");
    const int n = basis->n;
    const std::int64_t dim = dense_dim(basis->family, n);
    if (reference_bits >= static_cast<std::uint64_t>(dim))
        throw constraint_error("reference index outside the state space");

    const Mat hm = to_matrix(h, n);
    Eigen::SelfAdjointEigenSolver<Mat> es(hm, Eigen::EigenvaluesOnly);
    const double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    const double accept_abs = tol::kVariance * hnorm * hnorm;

    std::vector<int> picked;
    std::vector<std::string> labels(basis->dim());
    std::vector<Mat> dense_gens(basis->dim());
    std::vector<char> in_csa(basis->dim(), 0);
    for (int c : basis->csa) in_csa[c] = 1;
    for (int g = 0; g < basis->dim(); ++g) {
        if (in_csa[g]) continue;
        picked.push_back(g);
        labels[g] = basis->info[g].label;
        dense_gens[g] = to_matrix(basis->gens[g], n);
    }
    const Ansatz az = make_ansatz(picked, labels, dense_gens, static_cast<int>(dim));

    VarianceObjective obj;
    obj.h = &hm;
    obj.ansatz = &az;
    obj.phi = Mat::Zero(dim, 1);
    obj.phi(static_cast<Eigen::Index>(reference_bits), 0) = 1.0;

    const SearchResult win = run_search(obj, budget, seed_mix(0x7A11CE, seed), accept_abs, {});

    VarianceResult out;
    std::vector<std::pair<std::string, double>> steps;
    for (int k = 0; k < az.size(); ++k)
        if (win.theta.size() > k && std::abs(win.theta(k)) >= 1e-12)
            steps.push_back({az.labels[k], win.theta(k)});
    out.rotation = make_rotation(basis, steps);
    out.variance = win.total;
    out.restarts_used = win.restarts;
    return out;
}

// ---- csa_polynomial_split ----

namespace {

bool term_is_diagonal(Family fam, const FactorSeq& factors) {
    switch (fam) {
        case Family::fermionic: {
            std::vector<int> created, destroyed;
            for (const Factor& f : factors)
                (f.tag == 'c' ? created : destroyed).push_back(f.index);
            return created == destroyed;
        }
        case Family::majorana: {
            if (factors.size() % 2 != 0) return false;
            for (std::size_t i = 0; i < factors.size(); i += 2)
                if (factors[i].index % 2 == 0 || factors[i + 1].index != factors[i].index + 1)
                    return false;
            return true;
        }
        case Family::pauli:
            for (const Factor& f : factors)
                if (f.tag != 'z') return false;
            return true;
    }
    return false;
}

}  // namespace

CsaSplit csa_polynomial_split(const OpPoly& h) {
    CsaSplit out;
    out.diagonal = OpPoly(h.family(), h.modes());
    out.remainder = OpPoly(h.family(), h.modes());
    for (const auto& [key, coeff] : h.terms()) {
        const FactorSeq factors = OpPoly::decode(key);
        (term_is_diagonal(h.family(), factors) ? out.diagonal : out.remainder)
            .add_term(factors, coeff);
    }
    const Mat hm = to_matrix(h);
    const double scale = std::max(1.0, hm.norm());
    for (Eigen::Index s = 0; s < hm.cols(); ++s) {
        const cplx diag = hm(s, s);
        double off = 0.0;
        for (Eigen::Index r = 0; r < hm.rows(); ++r)
            if (r != s) off += std::norm(hm(r, s));
        if (std::sqrt(off) + std::abs(std::imag(diag)) <= 1e-8 * scale) {
            out.invariant.push_back(static_cast<std::uint64_t>(s));
            out.values.push_back(std::real(diag));
        }
    }
    return out;
}

// ---- qubit_reduce ----

QubitReduction qubit_reduce(const OpPoly& h, int qubit, int sign) {
    if (h.family() != Family::pauli)
        throw constraint_error("qubit reduction applies to the pauli family");
    if (sign != 1 && sign != -1)
        throw constraint_error("sign selects the +1 or -1 eigenstate");
    const int n = h.modes();
    if (qubit < 1 || qubit > n)
        throw constraint_error("qubit index outside the operator");

    const Mat hm = to_matrix(h, n);
    const double scale = std::max(1.0, hm.norm());
    const char axes[3] = {'x', 'y', 'z'};
    Mat sigma[3];
    double cnorm[3];
    for (int a = 0; a < 3; ++a) {
        sigma[a] = to_matrix(pauli_op(axes[a], qubit, n), n);
        cnorm[a] = (sigma[a] * hm - hm * sigma[a]).norm();
    }

    std::array<double, 3> axis = {0.0, 0.0, 0.0};
    const int priority[3] = {2, 0, 1};  // z first, then x, then y
    bool found = false;
    for (int a : priority)
        if (cnorm[a] <= tol::kUnitarity * scale) {
            axis[a] = 1.0;
            found = true;
            break;
        }
    if (!found) {
        const Eigen::Index d2 = hm.rows() * hm.cols();
        Eigen::MatrixXd stacked(2 * d2, 3);
        for (int a = 0; a < 3; ++a) {
            const Mat com = sigma[a] * hm - hm * sigma[a];
            const Eigen::Map<const Vec> flat(com.data(), d2);
            stacked.col(a).head(d2) = flat.real();
            stacked.col(a).tail(d2) = flat.imag();
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
        if (svd.singularValues()(2) > tol::kUnitarity * scale)
            throw constraint_error("no single-qubit operator on qubit " + std::to_string(qubit) +
                                   " commutes with the operator");
        Eigen::Vector3d dir = svd.matrixV().col(2);
        for (int a = 0; a < 3; ++a)
            if (std::abs(dir(a)) > 1e-8) {
                if (dir(a) < 0.0) dir = -dir;
                break;
            }
        dir.normalize();
        for (int a = 0; a < 3; ++a) axis[a] = dir(a);
    }

    QubitReduction out;
    out.axis = axis;
    out.eigenvalue = sign;
    out.reduced = OpPoly(Family::pauli, n);
    for (const auto& [key, coeff] : h.terms()) {
        FactorSeq factors = OpPoly::decode(key);
        cplx c = coeff;
        FactorSeq rest;
        for (const Factor& f : factors) {
            if (f.index == qubit) {
                const int a = (f.tag == 'x') ? 0 : (f.tag == 'y') ? 1 : 2;
                c *= sign * axis[a];
            } else {
                rest.push_back(f);
            }
        }
        out.reduced.add_term(rest, c);
    }
    out.reduced.prune();
    return out;
}

// ---- classification ----

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::mf_class: return "class";
        case Verdict::partial: return "partial";
        case Verdict::not_mf: return "not-mf";
    }
    return "not-mf";
}

namespace {

bool fermionic_number_conserving(const OpPoly& h) {
    for (const auto& [key, coeff] : h.terms()) {
        int balance = 0;
        for (const Factor& f : OpPoly::decode(key)) balance += (f.tag == 'c') ? 1 : -1;
        if (balance != 0) return false;
    }
    return true;
}

bool majorana_has_odd_terms(const OpPoly& h) {
    for (const auto& [key, coeff] : h.terms())
        if (OpPoly::decode(key).size() % 2 != 0) return true;
    return false;
}

void append_note(std::string& note, const std::string& extra) {
    if (!note.empty()) note += "; ";
    note += extra;
}

}  // namespace

ClassificationReport classify(const OpPoly& h, const DetectorOptions& opts) {
    if (opts.budget < 1) throw constraint_error("restart budget must be positive");
    if (opts.max_levels < 1) throw constraint_error("level cap must be positive");
    if (!is_hermitian(h, 1e-9 * std::max(1.0, max_abs_coeff(h))))
        throw constraint_error("classification requires a hermitian operator");

    ClassificationReport rep;
    rep.seed = opts.seed;
    rep.budget = opts.budget;

    OpPoly work = h;
    if (h.family() == Family::fermionic && !fermionic_number_conserving(h))
        work = majorana_from_fermionic(h);
    const Family wf = work.family();
    const int n = std::max(1, work.modes());
    rep.work_family = wf;
    rep.modes = n;

    std::shared_ptr<const AlgebraBasis> basis;
    switch (wf) {
        case Family::fermionic:
            basis = std::make_shared<AlgebraBasis>(one_body_basis(n));
            break;
        case Family::majorana:
            basis = std::make_shared<AlgebraBasis>(majorana_basis(n, majorana_has_odd_terms(work)));
            break;
        case Family::pauli:
            basis = std::make_shared<AlgebraBasis>(qubit_basis(n));
            break;
    }

    rep.dimension = dense_dim(wf, n);
    const int dim = static_cast<int>(rep.dimension);
    const Mat h0 = to_matrix(work, n);
    const EigenSystem eig = exact_eigensystem(h0);
    rep.hnorm = eig.hnorm;
    const double tol_abs = opts.tol_variance * eig.hnorm * eig.hnorm;
    rep.tol_variance_abs = tol_abs;

    // definitive cross-check on the exact eigenvectors
    for (int e = 0; e < dim; ++e) {
        if (static_cast<int>(eig.groups[eig.group_of(e)].size()) > 1) {
            ++rep.oracle.undecided;
            continue;
        }
        const MeanFieldCheck chk = mf_state_check(eig.vectors.col(e), wf, n);
        if (chk.ok) {
            ++rep.oracle.mean_field;
        } else {
            ++rep.oracle.entangled;
            rep.oracle.worst_defect = std::max(rep.oracle.worst_defect, chk.deviation);
        }
    }

    // CSA eigenvalue tuples of every basis column
    const int rank = static_cast<int>(basis->csa.size());
    std::vector<std::vector<double>> labels_of(dim, std::vector<double>(rank, 0.0));
    for (int slot = 0; slot < rank; ++slot) {
        const Mat obs = to_matrix(basis->csa_observable(slot), n);
        const std::vector<double> spectrum = basis->csa_spectrum(slot);
        for (int s = 0; s < dim; ++s) {
            const double raw = std::real(obs(s, s));
            double snapped = spectrum.front();
            for (double u : spectrum)
                if (std::abs(u - raw) < std::abs(snapped - raw)) snapped = u;
            labels_of[s][slot] = snapped;
        }
    }

    rep.states.resize(dim);
    for (int s = 0; s < dim; ++s) {
        rep.states[s].labels = labels_of[s];
        rep.states[s].basis_index = static_cast<std::uint64_t>(s);
    }

    std::vector<int> non_csa;
    std::vector<std::string> gen_labels(basis->dim());
    std::vector<Mat> dense_gens(basis->dim());
    {
        std::vector<char> in_csa(basis->dim(), 0);
        for (int c : basis->csa) in_csa[c] = 1;
        for (int g = 0; g < basis->dim(); ++g) {
            gen_labels[g] = basis->info[g].label;
            if (!in_csa[g]) {
                non_csa.push_back(g);
                dense_gens[g] = to_matrix(basis->gens[g], n);
            }
        }
    }

    Mat hcur = h0;
    Mat ucum = Mat::Identity(dim, dim);
    const Mat id = Mat::Identity(dim, dim);
    std::vector<char> settled(dim, 0);
    std::vector<std::vector<int>> harvest_sets;
    int total_settled = 0;
    int density_failures = 0;

    for (int level = 1; level <= opts.max_levels && total_settled < dim; ++level) {
        const std::uint64_t level_seed = seed_mix(opts.seed, 0x11ull * level);
        LevelTrace tr;
        tr.level = level;

        std::vector<int> active;
        for (int s = 0; s < dim; ++s)
            if (!settled[s]) active.push_back(s);

        Eigen::VectorXd ident_var(active.size());
        for (std::size_t i = 0; i < active.size(); ++i)
            ident_var(i) = column_variance(hcur, active[i]);

        // generators must commute with the projectors of every earlier level
        std::vector<int> allowed;
        for (int g : non_csa) {
            bool ok = true;
            for (const std::vector<int>& set : harvest_sets) {
                std::vector<char> inside(dim, 0);
                for (int s : set) inside[s] = 1;
                const Mat& gm = dense_gens[g];
                const double gscale = std::max(1.0, gm.norm());
                for (int a = 0; a < dim && ok; ++a)
                    for (int b = 0; b < dim; ++b)
                        if (inside[a] != inside[b] && std::abs(gm(a, b)) > 1e-12 * gscale) {
                            ok = false;
                            break;
                        }
                if (!ok) break;
            }
            if (ok) allowed.push_back(g);
        }

        Eigen::VectorXd theta;
        Ansatz az;
        bool have_rotation = false;

        if (ident_var.size() > 0 && ident_var.maxCoeff() <= tol_abs) {
            // every leftover column is already an eigenvector in this frame
        } else if (allowed.empty()) {
            if (ident_var.minCoeff() > tol_abs) tr.best_leftover = ident_var.minCoeff();
        } else {
            az = make_ansatz(allowed, gen_labels, dense_gens, static_cast<int>(dim));

            VarianceObjective joint;
            joint.h = &hcur;
            joint.ansatz = &az;
            joint.phi = columns_of(id, active);
            const SearchResult all_in =
                run_search(joint, opts.budget, seed_mix(level_seed, 1), tol_abs, {});
            tr.restarts_used += all_in.restarts;

            if (all_in.per.maxCoeff() <= tol_abs) {
                theta = all_in.theta;
                have_rotation = true;
            } else {
                // per-reference sweep, then greedy extension of the best set
                std::vector<double> single_var(active.size());
                std::vector<Eigen::VectorXd> single_theta(active.size());
                for (std::size_t i = 0; i < active.size(); ++i) {
                    VarianceObjective one;
                    one.h = &hcur;
                    one.ansatz = &az;
                    one.phi = columns_of(id, {active[i]});
                    const SearchResult r = run_search(one, opts.budget,
                                                      seed_mix(level_seed, 0x100 + active[i]),
                                                      tol_abs, {all_in.theta});
                    tr.restarts_used += r.restarts;
                    single_var[i] = r.total;
                    single_theta[i] = r.theta;
                }
                std::vector<int> order(active.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    return single_var[a] < single_var[b];
                });

                std::vector<int> chosen;
                Eigen::VectorXd ws;
                double leftover = -1.0;
                for (int i : order) {
                    if (single_var[i] > tol_abs) {
                        if (leftover < 0.0 || single_var[i] < leftover) leftover = single_var[i];
                        continue;
                    }
                    std::vector<int> trial = chosen;
                    trial.push_back(active[i]);
                    VarianceObjective grow;
                    grow.h = &hcur;
                    grow.ansatz = &az;
                    grow.phi = columns_of(id, trial);
                    std::vector<Eigen::VectorXd> warm;
                    if (ws.size() > 0) warm.push_back(ws);
                    warm.push_back(single_theta[i]);
                    const SearchResult r =
                        run_search(grow, std::max(2, opts.budget / 4),
                                   seed_mix(level_seed, 0x10000 + active[i]), tol_abs, warm);
                    tr.restarts_used += r.restarts;
                    if (r.per.maxCoeff() <= tol_abs) {
                        chosen = trial;
                        ws = r.theta;
                    } else if (leftover < 0.0 || r.per.maxCoeff() < leftover) {
                        leftover = r.per.maxCoeff();
                    }
                }
                tr.best_leftover = leftover;
                if (!chosen.empty()) {
                    theta = ws;
                    have_rotation = true;
                }
            }
        }

        Mat ul;
        if (have_rotation) {
            ul = az.unitary(theta);
            for (int k = 0; k < az.size(); ++k)
                if (std::abs(theta(k)) >= 1e-12)
                    tr.rotation.push_back({az.labels[k], theta(k)});
        } else {
            ul = id;
        }
        const Mat hnext = ul.adjoint() * hcur * ul;

        std::vector<int> harvested;
        for (int s : active)
            if (column_variance(hnext, s) <= tol_abs) harvested.push_back(s);

        if (harvested.empty()) {
            if (tr.best_leftover < 0.0 && active.size() > 0) tr.best_leftover = ident_var.minCoeff();
            rep.levels.push_back(tr);
            break;
        }

        hcur = hnext;
        ucum = ucum * ul;
        double worst = 0.0;
        for (int s : harvested) {
            settled[s] = 1;
            ++total_settled;
            const double var_s = column_variance(hcur, s);
            worst = std::max(worst, var_s);
            StateRecord& st = rep.states[s];
            st.level = level;
            st.energy = std::real(hcur(s, s));
            st.variance = var_s;
            st.state = ucum.col(s);
            if (!mf_state_check(st.state, wf, n).ok) ++density_failures;
            tr.harvested.push_back(static_cast<std::uint64_t>(s));
        }
        tr.worst_variance = worst;
        harvest_sets.push_back(harvested);
        rep.levels.push_back(tr);
    }

    rep.certified = total_settled;
    if (total_settled == dim) {
        rep.verdict = Verdict::mf_class;
        rep.klass = static_cast<int>(harvest_sets.size());
    } else if (total_settled > 0) {
        rep.verdict = Verdict::partial;
    } else {
        rep.verdict = Verdict::not_mf;
    }

    if (rep.verdict != Verdict::mf_class) {
        const LevelTrace& last = rep.levels.back();
        if (last.best_leftover >= 0.0 &&
            last.best_leftover <= tol::kInconclusiveFactor * tol_abs) {
            rep.inconclusive = true;
            append_note(rep.note, "inconclusive at level " + std::to_string(last.level) +
                                      ": a leftover reference stalled just above the variance "
                                      "tolerance");
        }
        if (total_settled < dim && !rep.levels.empty() && !rep.levels.back().harvested.empty()) {
            rep.inconclusive = true;
            append_note(rep.note, "level cap reached with references outstanding");
        }
    }
    if (density_failures > 0) {
        rep.inconclusive = true;
        append_note(rep.note, std::to_string(density_failures) +
                                  " harvested states failed the density check");
    }

    // the exact-diagonalization cross-check has the last word
    if (rep.verdict == Verdict::mf_class && rep.oracle.entangled > 0) {
        rep.verdict = Verdict::partial;
        rep.klass = 0;
        rep.inconclusive = true;
        append_note(rep.note, "exact eigenvectors off the mean-field manifold exist; class "
                              "verdict overridden");
    }
    if (rep.verdict != Verdict::mf_class && rep.oracle.entangled == 0 &&
        rep.oracle.undecided == 0) {
        rep.inconclusive = true;
        append_note(rep.note, "every exact eigenvector is mean-field; the variance search is "
                              "optimizer-limited");
    }
    if (rep.verdict == Verdict::not_mf)
        append_note(rep.note, "not-mean-field verdicts are optimizer-limited evidence");

    if (rep.verdict == Verdict::mf_class) {
        ClassSpec disc;
        disc.family = wf;
        disc.n = n;
        for (std::size_t j = 0; j < harvest_sets.size(); ++j) {
            LevelSpec lvl;
            // the builder conjugates as U^+ G U, so the spec carries the
            // inverse of the frame rotation found by the search
            for (auto it = rep.levels[j].rotation.rbegin(); it != rep.levels[j].rotation.rend();
                 ++it)
                lvl.rotation.push_back({it->first, -it->second});
            for (int s : harvest_sets[j]) {
                CsaPolynomial ind = csa_indicator(*basis, labels_of[s]);
                ind *= rep.states[s].energy;
                lvl.f += ind;
            }
            if (j + 1 < harvest_sets.size()) {
                ProjectorSpec proj;
                for (int s : harvest_sets[j]) proj.tuples.push_back(labels_of[s]);
                lvl.projector = proj;
            }
            disc.levels.push_back(std::move(lvl));
        }
        rep.discovered = disc;
        try {
            const BuiltModel rebuilt = build_model(disc);
            const Mat rm = to_matrix(rebuilt.hamiltonian, n);
            rep.reconstruction_error = (rm - h0).norm() / std::max(1.0, h0.norm());
            if (rep.reconstruction_error > tol::kReconstruction) {
                rep.verdict = Verdict::partial;
                rep.klass = 0;
                rep.inconclusive = true;
                append_note(rep.note, "reconstruction residual above tolerance");
            }
        } catch (const constraint_error& e) {
            rep.verdict = Verdict::partial;
            rep.klass = 0;
            rep.inconclusive = true;
            append_note(rep.note, std::string("discovered spec failed to rebuild: ") + e.what());
        }
    }

    return rep;
}

std::string ClassificationReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["verdict"] = verdict_name(verdict);
    if (verdict == Verdict::mf_class) doc["class"] = klass;
    doc["certified"] = certified;
    doc["dimension"] = dimension;
    doc["inconclusive"] = inconclusive;
    if (!note.empty()) doc["note"] = note;
    doc["family"] = family_name(work_family);
    doc["modes"] = modes;
    doc["seed"] = seed;
    doc["budget"] = budget;
    doc["hnorm"] = hnorm;
    doc["tol_variance_abs"] = tol_variance_abs;
    doc["oracle"] = {{"mean_field", oracle.mean_field},
                     {"entangled", oracle.entangled},
                     {"undecided", oracle.undecided},
                     {"worst_defect", oracle.worst_defect}};
    doc["levels"] = nlohmann::ordered_json::array();
    for (const LevelTrace& tr : levels) {
        nlohmann::ordered_json jl;
        jl["level"] = tr.level;
        jl["rotation"] = nlohmann::ordered_json::array();
        for (const auto& [label, angle] : tr.rotation) jl["rotation"].push_back({label, angle});
        jl["harvested"] = tr.harvested;
        jl["restarts_used"] = tr.restarts_used;
        jl["worst_variance"] = tr.worst_variance;
        if (tr.best_leftover >= 0.0) jl["best_leftover"] = tr.best_leftover;
        doc["levels"].push_back(jl);
    }
    doc["states"] = nlohmann::ordered_json::array();
    for (const StateRecord& st : states) {
        nlohmann::ordered_json js;
        js["index"] = st.basis_index;
        js["labels"] = st.labels;
        js["level"] = st.level;
        if (st.level > 0) {
            js["energy"] = st.energy;
            js["variance"] = st.variance;
        }
        doc["states"].push_back(js);
    }
    if (reconstruction_error >= 0.0) doc["reconstruction_error"] = reconstruction_error;
    if (verdict == Verdict::mf_class)
        doc["discovered"] = nlohmann::json::parse(discovered.to_json());
    return doc.dump(2);
}

}
