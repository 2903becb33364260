#include "mfsolv/matrix_rep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mfsolv/tolerances.hpp"

namespace mfs {

std::int64_t dense_dim(Family, int n) {
    if (n < 0) throw constraint_error("negative mode count");
    if (n > tol::kMaxDenseModes)
        throw capacity_error("dense representation refused for " + std::to_string(n) +
                             " modes (cap " + std::to_string(tol::kMaxDenseModes) + ")");
    return std::int64_t{1} << n;
}

namespace {

inline int parity_below(std::uint64_t bits, int p) {
    std::uint64_t mask = (std::uint64_t{1} << (p - 1)) - 1;
    return std::popcount(bits & mask) & 1;
}

}  // namespace

bool apply_term_to_state(const FactorSeq& factors, Family fam, std::uint64_t& bits, cplx& amp) {
    // factors act right to left
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        const Factor& f = *it;
        switch (fam) {
            case Family::fermionic: {
                std::uint64_t bit = std::uint64_t{1} << (f.index - 1);
                bool occupied = bits & bit;
                if (f.tag == 'a') {
                    if (!occupied) return false;
                    if (parity_below(bits, f.index)) amp = -amp;
                    bits &= ~bit;
                } else {
                    if (occupied) return false;
                    if (parity_below(bits, f.index)) amp = -amp;
                    bits |= bit;
                }
                break;
            }
            case Family::majorana: {
                int mode = (f.index + 1) / 2;
                std::uint64_t bit = std::uint64_t{1} << (mode - 1);
                bool occupied = bits & bit;
                if (parity_below(bits, mode)) amp = -amp;
                if (f.index % 2 == 1) {
                    // gamma_{2p-1} = i a_p - i a_p^+
                    amp *= occupied ? cplx(0, 1) : cplx(0, -1);
                } // gamma_{2p} = a_p + a_p^+ leaves the amplitude real
                bits ^= bit;
                break;
            }
            case Family::pauli: {
                std::uint64_t bit = std::uint64_t{1} << (f.index - 1);
                bool down = bits & bit;
                if (f.tag == 'x') {
                    bits ^= bit;
                } else if (f.tag == 'y') {
                    amp *= down ? cplx(0, -1) : cplx(0, 1);
                    bits ^= bit;
                } else {
                    if (down) amp = -amp;
                }
                break;
            }
        }
    }
    return true;
}

namespace {

Mat build_matrix(const OpPoly& p, int n, bool parallel) {
    n = std::max(n, p.modes());
    std::int64_t dim = dense_dim(p.family(), n);
    Mat m = Mat::Zero(dim, dim);

    std::vector<std::pair<FactorSeq, cplx>> terms;
    terms.reserve(p.term_count());
    for (const auto& [key, c] : p.terms()) terms.emplace_back(OpPoly::decode(key), c);

    Family fam = p.family();
#ifdef _OPENMP
    #pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t col = 0; col < dim; ++col) {
        for (const auto& [factors, c] : terms) {
            std::uint64_t bits = static_cast<std::uint64_t>(col);
            cplx amp = c;
            if (apply_term_to_state(factors, fam, bits, amp))
                m(static_cast<std::int64_t>(bits), col) += amp;
        }
    }
    (void)parallel;
    return m;
}

}  // namespace

Mat to_matrix(const OpPoly& p, int n) { return build_matrix(p, n, true); }
Mat to_matrix_serial(const OpPoly& p, int n) { return build_matrix(p, n, false); }

Vec basis_state(int n, std::uint64_t bits) {
    std::int64_t dim = std::int64_t{1} << n;
    Vec v = Vec::Zero(dim);
    v(static_cast<std::int64_t>(bits)) = 1.0;
    return v;
}

int EigenSystem::group_of(int eigen_index) const {
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int idx : groups[g])
            if (idx == eigen_index) return static_cast<int>(g);
    return -1;
}

EigenSystem exact_eigensystem(const Mat& h) {
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    double herm_dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > tol::kUnitarity * scale)
        throw constraint_error("matrix is not hermitian (deviation " + std::to_string(herm_dev) +
                               ")");

    Eigen::SelfAdjointEigenSolver<Mat> solver((h + h.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw constraint_error("eigenvalue decomposition failed to converge");

    EigenSystem sys;
    sys.values = solver.eigenvalues();
    sys.vectors = solver.eigenvectors();
    sys.hnorm = sys.values.size() ? sys.values.cwiseAbs().maxCoeff() : 0.0;

    double resid_tol = tol::kEigResidual * std::max(sys.hnorm, 1.0);
    for (int i = 0; i < sys.values.size(); ++i) {
        double r = (h * sys.vectors.col(i) - sys.values(i) * sys.vectors.col(i)).norm();
        if (r > resid_tol)
            throw constraint_error("eigenpair residual " + std::to_string(r) +
                                   " exceeds tolerance");
    }

    double gap = tol::kDegeneracy * std::max(sys.hnorm, 1e-12);
    for (int i = 0; i < sys.values.size(); ++i) {
        if (!sys.groups.empty() && sys.values(i) - sys.values(sys.groups.back().front()) <= gap)
            sys.groups.back().push_back(i);
        else
            sys.groups.push_back({i});
    }
    return sys;
}

cplx expectation(const Mat& h, const Vec& v) {
    double nrm2 = v.squaredNorm();
    return v.dot(h * v) / nrm2;
}

double variance(const Mat& h, const Vec& v) {
    double nrm2 = v.squaredNorm();
    Vec w = h * v;
    double mean = v.dot(w).real() / nrm2;
    double second = w.squaredNorm() / nrm2;
    return std::max(0.0, second - mean * mean);
}

namespace {

// w <- a_p v or a_p^+ v (matrix-free single-factor application)
Vec apply_single(const Vec& v, int n, int p, bool dagger) {
    std::int64_t dim = std::int64_t{1} << n;
    Vec w = Vec::Zero(dim);
    std::uint64_t bit = std::uint64_t{1} << (p - 1);
    for (std::int64_t s = 0; s < dim; ++s) {
        if (v(s) == cplx{}) continue;
        std::uint64_t bits = static_cast<std::uint64_t>(s);
        bool occupied = bits & bit;
        if (dagger == occupied) continue;
        double sign = parity_below(bits, p) ? -1.0 : 1.0;
        w(static_cast<std::int64_t>(bits ^ bit)) += sign * v(s);
    }
    return w;
}

MeanFieldCheck qubit_product_check(const Vec& v, int n) {
    MeanFieldCheck out;
    std::int64_t dim = std::int64_t{1} << n;
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
        std::uint64_t bit = std::uint64_t{1} << k;
        for (std::int64_t s = 0; s < dim; ++s) {
            std::int64_t partner = static_cast<std::int64_t>(s) | static_cast<std::int64_t>(bit);
            int a = (s & static_cast<std::int64_t>(bit)) ? 1 : 0;
            if (a == 1) continue;
            std::int64_t s0 = s, s1 = partner;
            rho(0, 0) += v(s0) * std::conj(v(s0));
            rho(0, 1) += v(s0) * std::conj(v(s1));
            rho(1, 0) += v(s1) * std::conj(v(s0));
            rho(1, 1) += v(s1) * std::conj(v(s1));
        }
        double purity = (rho * rho).trace().real();
        worst = std::max(worst, 1.0 - purity);
    }
    out.deviation = worst;
    out.ok = worst <= tol::kMeanFieldPurity;
    out.detail = "single-qubit purity";
    return out;
}

MeanFieldCheck fermionic_determinant_check(const Vec& v, int n) {
    MeanFieldCheck out;
    std::int64_t dim = std::int64_t{1} << n;

    double mean_n = 0.0, second_n = 0.0;
    for (std::int64_t s = 0; s < dim; ++s) {
        double w = std::norm(v(s));
        int pc = std::popcount(static_cast<std::uint64_t>(s));
        mean_n += w * pc;
        second_n += w * double(pc) * pc;
    }
    double var_n = std::max(0.0, second_n - mean_n * mean_n);

    std::vector<Vec> ann(n), cre(n);
    for (int p = 0; p < n; ++p) {
        ann[p] = apply_single(v, n, p + 1, false);
        cre[p] = apply_single(v, n, p + 1, true);
    }

    if (var_n <= 1e-10) {
        // number-conserving: 1-RDM idempotency
        Mat d(n, n);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) d(p, q) = ann[p].dot(ann[q]);
        out.deviation = (d * d - d).norm();
        out.detail = "one-body density idempotency";
    } else {
        // generalized density over (a_1..a_N, a_1^+..a_N^+)
        Mat m(2 * n, 2 * n);
        auto vec_of = [&](int mu) -> const Vec& { return mu < n ? ann[mu] : cre[mu - n]; };
        for (int mu = 0; mu < 2 * n; ++mu)
            for (int nu = 0; nu < 2 * n; ++nu) m(mu, nu) = vec_of(mu).dot(vec_of(nu));
        out.deviation = (m * m - m).norm();
        out.detail = "generalized density idempotency";
    }
    out.ok = out.deviation <= tol::kMeanFieldPurity;
    return out;
}

}  // namespace

MeanFieldCheck mf_state_check(const Vec& v0, Family fam, int n) {
    double nrm = v0.norm();
    if (nrm <= 0.0) throw constraint_error("mf_state_check: zero state");
    Vec v = v0 / nrm;
    if (fam == Family::pauli) return qubit_product_check(v, n);
    return fermionic_determinant_check(v, n);
}

}
