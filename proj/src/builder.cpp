#include "mfsolv/builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mfsolv/optim.hpp"

namespace mfs {

// ---- CSA polynomials ----

void CsaPolynomial::add(Monomial mono, double coeff) {
    for (const auto& [slot, power] : mono) {
        if (slot < 0) throw constraint_error("CSA slot must be non-negative");
        if (power < 1) throw constraint_error("monomial powers must be positive");
    }
    std::sort(mono.begin(), mono.end());
    Monomial merged;
    for (const auto& part : mono) {
        if (!merged.empty() && merged.back().first == part.first)
            merged.back().second += part.second;
        else
            merged.push_back(part);
    }
    double& c = terms_[merged];
    c += coeff;
    if (std::abs(c) < tol::kCoeffDrop) terms_.erase(merged);
}

double CsaPolynomial::evaluate(const std::vector<double>& labels) const {
    double total = 0.0;
    for (const auto& [mono, coeff] : terms_) {
        double value = coeff;
        for (const auto& [slot, power] : mono) {
            if (slot >= static_cast<int>(labels.size()))
                throw constraint_error("CSA label tuple is shorter than the polynomial");
            value *= std::pow(labels[slot], power);
        }
        total += value;
    }
    return total;
}

CsaPolynomial& CsaPolynomial::operator+=(const CsaPolynomial& o) {
    for (const auto& [mono, coeff] : o.terms_) add(mono, coeff);
    return *this;
}

CsaPolynomial& CsaPolynomial::operator*=(double s) {
    if (std::abs(s) < tol::kCoeffDrop) {
        terms_.clear();
        return *this;
    }
    for (auto& [mono, coeff] : terms_) coeff *= s;
    return *this;
}

CsaPolynomial operator*(const CsaPolynomial& a, const CsaPolynomial& b) {
    CsaPolynomial out;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            CsaPolynomial::Monomial mono = ma;
            mono.insert(mono.end(), mb.begin(), mb.end());
            out.add(std::move(mono), ca * cb);
        }
    return out;
}

CsaPolynomial csa_indicator(const AlgebraBasis& basis, const std::vector<double>& labels) {
    if (labels.size() != basis.csa.size())
        throw constraint_error("label tuple length does not match the CSA rank");
    CsaPolynomial out;
    out.add_constant(1.0);
    for (int slot = 0; slot < static_cast<int>(basis.csa.size()); ++slot) {
        const std::vector<double> spectrum = basis.csa_spectrum(slot);
        auto hit = std::find_if(spectrum.begin(), spectrum.end(),
                                [&](double u) { return std::abs(u - labels[slot]) <= 1e-9; });
        if (hit == spectrum.end())
            throw constraint_error("label outside the spectrum of CSA slot " +
                                   std::to_string(slot + 1));
        for (double u : spectrum) {
            if (std::abs(u - *hit) <= 1e-9) continue;
            if (std::abs(*hit - u) < 1e-12)
                throw constraint_error("repeated spectrum value makes a projector denominator vanish");
            CsaPolynomial factor;
            factor.add({{slot, 1}}, 1.0 / (*hit - u));
            factor.add_constant(-u / (*hit - u));
            out = out * factor;
        }
    }
    return out;
}

OpPoly CsaPolynomial::to_poly(const AlgebraBasis& basis) const {
    std::vector<OpPoly> obs(basis.csa.size());
    OpPoly out(basis.family, basis.n);
    for (const auto& [mono, coeff] : terms_) {
        OpPoly term = identity_poly(basis.family, basis.n);
        for (const auto& [slot, power] : mono) {
            if (slot >= static_cast<int>(basis.csa.size()))
                throw constraint_error("CSA slot out of range for this basis");
            if (obs[slot].is_zero()) obs[slot] = basis.csa_observable(slot);
            for (int k = 0; k < power; ++k) term = multiply(term, obs[slot]);
        }
        term *= cplx(coeff, 0.0);
        out += term;
    }
    out.prune();
    return out;
}

// ---- spectral projectors ----

OpPoly lowdin_projector(const AlgebraBasis& basis, int slot, double target) {
    const std::vector<double> spectrum = basis.csa_spectrum(slot);
    auto hit = std::find_if(spectrum.begin(), spectrum.end(),
                            [&](double u) { return std::abs(u - target) <= 1e-9; });
    if (hit == spectrum.end()) {
        std::ostringstream msg;
        msg << "value " << target << " is not in the spectrum of CSA slot " << slot + 1 << " {";
        for (std::size_t i = 0; i < spectrum.size(); ++i)
            msg << (i ? ", " : "") << spectrum[i];
        msg << "}";
        throw constraint_error(msg.str());
    }
    const OpPoly obs = basis.csa_observable(slot);
    OpPoly proj = identity_poly(basis.family, basis.n);
    for (double u : spectrum) {
        if (std::abs(u - *hit) <= 1e-9) continue;
        if (std::abs(*hit - u) < 1e-12)
            throw constraint_error("repeated spectrum value makes a projector denominator vanish");
        OpPoly factor = obs;
        factor.add_identity(-u);
        proj = multiply(proj, factor);
        proj *= cplx(1.0 / (*hit - u), 0.0);
    }
    proj.prune();
    return proj;
}

namespace {

bool tuple_matches(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-9) return false;
    return true;
}

}

bool ProjectorSpec::accepts(const std::vector<double>& labels) const {
    if (!tuples.empty()) {
        if (!pins.empty())
            throw constraint_error("projector spec mixes pinned slots with an explicit tuple list");
        for (const auto& tup : tuples)
            if (tuple_matches(tup, labels)) return true;
        return false;
    }
    for (const auto& [slot, value] : pins) {
        if (slot < 0 || slot >= static_cast<int>(labels.size()))
            throw constraint_error("projector pin outside the CSA label tuple");
        if (std::abs(labels[slot] - value) > 1e-9) return false;
    }
    return true;
}

OpPoly ProjectorSpec::to_poly(const AlgebraBasis& basis) const {
    if (!tuples.empty()) {
        if (!pins.empty())
            throw constraint_error("projector spec mixes pinned slots with an explicit tuple list");
        OpPoly proj(basis.family, basis.n);
        for (const auto& tup : tuples) {
            if (tup.size() != basis.csa.size())
                throw constraint_error("projector tuple length does not match the CSA rank");
            OpPoly rank_one = identity_poly(basis.family, basis.n);
            for (int slot = 0; slot < static_cast<int>(tup.size()); ++slot)
                rank_one = multiply(rank_one, lowdin_projector(basis, slot, tup[slot]));
            proj += rank_one;
        }
        proj.prune();
        return proj;
    }
    OpPoly proj = identity_poly(basis.family, basis.n);
    for (const auto& [slot, value] : pins)
        proj = multiply(proj, lowdin_projector(basis, slot, value));
    proj.prune();
    return proj;
}

// ---- class spec serialization ----

std::string ClassSpec::to_json() const {
    nlohmann::ordered_json doc;
    doc["family"] = family_name(family);
    doc["modes"] = n;
    doc["levels"] = nlohmann::ordered_json::array();
    for (const LevelSpec& lvl : levels) {
        nlohmann::ordered_json jl;
        jl["f"] = nlohmann::ordered_json::array();
        for (const auto& [mono, coeff] : lvl.f.terms()) {
            nlohmann::ordered_json jt;
            jt["coeff"] = coeff;
            jt["monomial"] = nlohmann::ordered_json::array();
            for (const auto& [slot, power] : mono)
                jt["monomial"].push_back({slot + 1, power});
            jl["f"].push_back(jt);
        }
        jl["rotation"] = nlohmann::ordered_json::array();
        for (const auto& [label, angle] : lvl.rotation)
            jl["rotation"].push_back({label, angle});
        if (lvl.projector) {
            if (!lvl.projector->tuples.empty()) {
                nlohmann::ordered_json jp;
                jp["tuples"] = lvl.projector->tuples;
                jl["projector"] = jp;
            } else {
                jl["projector"] = nlohmann::ordered_json::array();
                for (const auto& [slot, value] : lvl.projector->pins)
                    jl["projector"].push_back({slot + 1, value});
            }
        }
        doc["levels"].push_back(jl);
    }
    return doc.dump(2);
}

ClassSpec ClassSpec::from_json(const std::string& text) {
    ClassSpec spec;
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        spec.family = family_from_name(doc.at("family").get<std::string>());
        spec.n = doc.at("modes").get<int>();
        if (spec.n < 1) throw parse_error("modes must be positive");
        for (const auto& jl : doc.at("levels")) {
            LevelSpec lvl;
            for (const auto& jt : jl.at("f")) {
                CsaPolynomial::Monomial mono;
                for (const auto& jp : jt.at("monomial")) {
                    const int slot = jp.at(0).get<int>();
                    const int power = jp.at(1).get<int>();
                    if (slot < 1) throw parse_error("CSA slots are 1-based in the JSON form");
                    mono.push_back({slot - 1, power});
                }
                lvl.f.add(mono, jt.at("coeff").get<double>());
            }
            if (jl.contains("rotation"))
                for (const auto& js : jl.at("rotation"))
                    lvl.rotation.push_back({js.at(0).get<std::string>(), js.at(1).get<double>()});
            if (jl.contains("projector")) {
                ProjectorSpec proj;
                const auto& jproj = jl.at("projector");
                if (jproj.is_object()) {
                    proj.tuples = jproj.at("tuples").get<std::vector<std::vector<double>>>();
                } else {
                    for (const auto& jp : jproj) {
                        const int slot = jp.at(0).get<int>();
                        if (slot < 1) throw parse_error("CSA slots are 1-based in the JSON form");
                        proj.pins.push_back({slot - 1, jp.at(1).get<double>()});
                    }
                }
                lvl.projector = proj;
            }
            spec.levels.push_back(std::move(lvl));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad class spec document: ") + e.what());
    }
    if (spec.levels.empty()) throw parse_error("class spec has no levels");
    return spec;
}

// ---- model construction ----

namespace {

std::shared_ptr<const AlgebraBasis> basis_for(Family fam, int n) {
    switch (fam) {
        case Family::fermionic:
            return std::make_shared<const AlgebraBasis>(one_body_basis(n));
        case Family::majorana:
            return std::make_shared<const AlgebraBasis>(majorana_basis(n, true));
        case Family::pauli:
            return std::make_shared<const AlgebraBasis>(qubit_basis(n));
    }
    throw constraint_error("unknown operator family");
}

std::vector<std::pair<std::string, double>> rotation_steps(const MFRotation& rot) {
    if (!rot.basis) throw constraint_error("rotation carries no generator basis");
    std::vector<std::pair<std::string, double>> steps;
    for (const RotationFactor& f : rot.factors)
        steps.push_back({rot.basis->info[f.gen].label, f.angle});
    return steps;
}

bool occupied_bit(const GenInfo& gi, double label) {
    switch (gi.kind) {
        case GenInfo::Kind::one_body_phase:
            return label > 0.5;
        case GenInfo::Kind::majorana_pair:
        case GenInfo::Kind::qubit_axis:
            return label < 0.0;
        default:
            throw constraint_error("CSA slot has no occupation-number convention");
    }
}

struct LabelTable {
    std::vector<std::vector<double>> spectra;
    std::vector<std::vector<double>> tuples;
    std::vector<std::uint64_t> indices;
};

LabelTable enumerate_labels(const AlgebraBasis& basis) {
    LabelTable table;
    const int r = static_cast<int>(basis.csa.size());
    std::uint64_t total = 1;
    for (int i = 0; i < r; ++i) {
        table.spectra.push_back(basis.csa_spectrum(i));
        total *= table.spectra.back().size();
        if (total > (1ull << 22))
            throw capacity_error("CSA eigenvalue table is too large to enumerate");
    }
    for (std::uint64_t t = 0; t < total; ++t) {
        std::vector<double> labels(r);
        std::uint64_t rest = t;
        std::uint64_t index = 0;
        for (int i = 0; i < r; ++i) {
            const auto& sp = table.spectra[i];
            labels[i] = sp[rest % sp.size()];
            rest /= sp.size();
            if (occupied_bit(basis.info[basis.csa[i]], labels[i])) index |= 1ull << i;
        }
        table.tuples.push_back(std::move(labels));
        table.indices.push_back(index);
    }
    return table;
}

}  // namespace

BuiltModel build_model(const ClassSpec& spec) {
    const int depth = spec.depth();
    if (spec.n < 1) throw constraint_error("model needs at least one mode");
    if (depth == 0) throw constraint_error("class spec has no levels");
    for (int j = 0; j < depth; ++j) {
        const bool last = (j == depth - 1);
        if (last && spec.levels[j].projector)
            throw constraint_error("the last level must not carry a projector");
        if (!last && !spec.levels[j].projector)
            throw constraint_error("level " + std::to_string(j + 1) + " must carry a projector");
        if (spec.levels[j].f.empty())
            throw constraint_error("level " + std::to_string(j + 1) + " has an empty CSA polynomial");
    }

    BuiltModel model;
    model.basis = basis_for(spec.family, spec.n);
    const AlgebraBasis& basis = *model.basis;
    for (int j = 0; j < depth; ++j)
        model.rotations.push_back(make_rotation(model.basis, spec.levels[j].rotation));

    std::vector<OpPoly> proj_polys(depth);
    std::vector<Mat> proj_mats(depth);
    for (int j = 0; j + 1 < depth; ++j) {
        proj_polys[j] = spec.levels[j].projector->to_poly(basis);
        proj_mats[j] = to_matrix(proj_polys[j], spec.n);
    }

    for (int j = 1; j < depth; ++j) {
        for (int i = 0; i < j; ++i) {
            std::vector<std::string> offenders;
            for (const RotationFactor& f : model.rotations[j].factors) {
                const Mat g = to_matrix(basis.gens[f.gen], spec.n);
                const double scale = std::max(1.0, g.norm() * proj_mats[i].norm());
                if ((g * proj_mats[i] - proj_mats[i] * g).norm() > tol::kUnitarity * scale)
                    offenders.push_back(basis.info[f.gen].label);
            }
            if (!offenders.empty()) {
                std::ostringstream msg;
                msg << "level " << j + 1 << " rotation generator";
                msg << (offenders.size() > 1 ? "s " : " ");
                for (std::size_t t = 0; t < offenders.size(); ++t)
                    msg << (t ? ", " : "") << offenders[t];
                msg << (offenders.size() > 1 ? " do" : " does");
                msg << " not commute with the level " << i + 1 << " projector";
                throw constraint_error(msg.str());
            }
        }
    }

    const LabelTable table = enumerate_labels(basis);
    std::vector<int> level_of(table.tuples.size(), depth - 1);
    std::vector<int> captured(depth, 0);
    for (std::size_t t = 0; t < table.tuples.size(); ++t) {
        for (int j = 0; j + 1 < depth; ++j) {
            if (spec.levels[j].projector->accepts(table.tuples[t])) {
                level_of[t] = j;
                break;
            }
        }
        ++captured[level_of[t]];
    }
    for (int j = 0; j < depth; ++j)
        if (captured[j] == 0)
            throw constraint_error("level " + std::to_string(j + 1) +
                                   " captures no CSA eigenvalue tuples");

    OpPoly g = spec.levels[depth - 1].f.to_poly(basis);
    for (int j = depth - 2; j >= 0; --j) {
        OpPoly complement = identity_poly(spec.family, spec.n);
        complement -= proj_polys[j];
        g = multiply(spec.levels[j].f.to_poly(basis), proj_polys[j]) +
            multiply(apply_rotation(model.rotations[j + 1], g), complement);
    }
    model.hamiltonian = apply_rotation(model.rotations[0], g);
    model.hamiltonian.prune();
    if (!is_hermitian(model.hamiltonian,
                      1e-9 * std::max(1.0, max_abs_coeff(model.hamiltonian))))
        throw constraint_error("built operator is not hermitian");

    std::vector<Mat> prefix(depth);
    Mat acc = Mat::Identity(dense_dim(spec.family, spec.n), dense_dim(spec.family, spec.n));
    for (int j = 0; j < depth; ++j) {
        acc = acc * rotation_matrix(model.rotations[j]).adjoint();
        prefix[j] = acc;
    }
    for (std::size_t t = 0; t < table.tuples.size(); ++t) {
        Certificate cert;
        cert.labels = table.tuples[t];
        cert.level = level_of[t] + 1;
        cert.energy = spec.levels[level_of[t]].f.evaluate(cert.labels);
        cert.basis_index = table.indices[t];
        cert.state = prefix[level_of[t]].col(cert.basis_index);
        model.certificates.push_back(std::move(cert));
    }
    return model;
}

OpPoly build_class1(const CsaPolynomial& f, const MFRotation& u) {
    if (!u.basis) throw constraint_error("rotation carries no generator basis");
    ClassSpec spec;
    spec.family = u.basis->family;
    spec.n = u.basis->n;
    spec.levels.push_back({f, rotation_steps(u), std::nullopt});
    return build_model(spec).hamiltonian;
}

OpPoly build_class2(const CsaPolynomial& f1, const CsaPolynomial& f2,
                    const ProjectorSpec& p1,
                    const MFRotation& u1, const MFRotation& u2) {
    if (!u1.basis || !u2.basis) throw constraint_error("rotation carries no generator basis");
    if (u1.basis->family != u2.basis->family || u1.basis->n != u2.basis->n)
        throw constraint_error("the two rotations act on different spaces");
    ClassSpec spec;
    spec.family = u1.basis->family;
    spec.n = u1.basis->n;
    spec.levels.push_back({f1, rotation_steps(u1), p1});
    spec.levels.push_back({f2, rotation_steps(u2), std::nullopt});
    return build_model(spec).hamiltonian;
}

OpPoly build_class_k(const ClassSpec& spec) { return build_model(spec).hamiltonian; }

// ---- reference models ----

namespace {

FactorSeq pair_term(int c1, int c0, int a1, int a0) {
    return {{'c', c1}, {'c', c0}, {'a', a1}, {'a', a0}};
}

FactorSeq hop_term(int p, int q) { return {{'c', p}, {'a', q}}; }

ReferenceModel make_class1_u3() {
    ReferenceModel ref;
    ref.name = "class1_u3";
    ref.spec.family = Family::fermionic;
    ref.spec.n = 3;
    LevelSpec lvl;
    lvl.f.add({{0, 1}, {1, 1}}, -27.0);
    lvl.f.add({{0, 1}, {2, 1}}, -9.0);
    lvl.f.add({{1, 1}, {2, 1}}, -9.0);
    lvl.rotation = {{"k_2_3", 2.214}, {"k_1_3", 1.459}, {"k_1_2", 2.214}};
    ref.spec.levels.push_back(lvl);

    OpPoly expected(Family::fermionic, 3);
    expected.add_term(pair_term(2, 1, 2, 1), 11.0);
    expected.add_term(pair_term(2, 1, 3, 1), 4.0);
    expected.add_term(pair_term(2, 1, 3, 2), 4.0);
    expected.add_term(pair_term(3, 1, 2, 1), 4.0);
    expected.add_term(pair_term(3, 1, 3, 1), 17.0);
    expected.add_term(pair_term(3, 1, 3, 2), 8.0);
    expected.add_term(pair_term(3, 2, 2, 1), 4.0);
    expected.add_term(pair_term(3, 2, 3, 1), 8.0);
    expected.add_term(pair_term(3, 2, 3, 2), 17.0);
    ref.expected = expected;
    ref.coeff_tol = 0.05;
    return ref;
}

ReferenceModel make_class2_u3() {
    ReferenceModel ref;
    ref.name = "class2_u3";
    ref.spec.family = Family::fermionic;
    ref.spec.n = 3;
    LevelSpec l1;
    l1.f.add({{0, 1}}, 0.44);
    l1.f.add({{1, 1}}, 0.61);
    l1.f.add({{2, 1}}, 0.95);
    l1.projector = ProjectorSpec{{{0, 1.0}}, {}};
    ref.spec.levels.push_back(l1);
    LevelSpec l2;
    l2.f.add({{0, 1}}, 0.34);
    l2.f.add({{1, 1}}, 0.69);
    l2.f.add({{2, 1}}, 0.23);
    l2.rotation = {{"k_2_3", 3.10}};
    ref.spec.levels.push_back(l2);

    OpPoly expected(Family::fermionic, 3);
    expected.add_term(hop_term(1, 1), 0.44);
    expected.add_term(hop_term(2, 2), 0.23);
    expected.add_term(hop_term(3, 3), 0.69);
    expected.add_term(hop_term(2, 3), 0.01);
    expected.add_term(hop_term(3, 2), 0.01);
    expected.add_term(pair_term(2, 1, 2, 1), -0.38);
    expected.add_term(pair_term(3, 1, 3, 1), -0.26);
    expected.add_term(pair_term(2, 1, 3, 1), 0.01);
    expected.add_term(pair_term(3, 1, 2, 1), 0.01);
    ref.expected = expected;
    ref.coeff_tol = 0.01;
    return ref;
}

ReferenceModel make_qubit_pair() {
    const double pi = 3.14159265358979323846;
    ReferenceModel ref;
    ref.name = "qubit_pair";
    ref.spec.family = Family::pauli;
    ref.spec.n = 2;
    LevelSpec l1;
    l1.f.add({{1, 1}}, std::sqrt(2.0));
    l1.rotation = {{"rx_2", -pi / 8.0}, {"ry_2", pi / 4.0}};
    l1.projector = ProjectorSpec{{{0, 1.0}}, {}};
    ref.spec.levels.push_back(l1);
    LevelSpec l2;
    l2.f.add({{1, 1}}, std::sqrt(2.0));
    l2.rotation = {{"rx_2", pi / 4.0}};
    ref.spec.levels.push_back(l2);

    OpPoly expected(Family::pauli, 2);
    expected.add_term({{'x', 2}}, 1.0);
    expected.add_term({{'z', 1}, {'y', 2}}, 1.0);
    ref.expected = expected;
    ref.coeff_tol = 1e-9;
    return ref;
}

ReferenceModel make_qubit_nested3() {
    ReferenceModel ref;
    ref.name = "qubit_nested3";
    ref.spec.family = Family::pauli;
    ref.spec.n = 3;
    LevelSpec l1;
    l1.f.add({{1, 1}}, 1.0);
    l1.f.add({{2, 1}}, 2.0);
    l1.projector = ProjectorSpec{{{0, 1.0}}, {}};
    ref.spec.levels.push_back(l1);
    LevelSpec l2;
    l2.f.add_constant(4.0);
    l2.f.add({{2, 1}}, 2.0);
    l2.rotation = {{"rx_2", 0.7}};
    l2.projector = ProjectorSpec{{{1, 1.0}}, {}};
    ref.spec.levels.push_back(l2);
    LevelSpec l3;
    l3.f.add({{2, 1}}, 5.0);
    l3.rotation = {{"ry_3", 0.9}};
    ref.spec.levels.push_back(l3);
    return ref;
}

}  // namespace

std::vector<ReferenceModel> reference_models() {
    return {make_class1_u3(), make_class2_u3(), make_qubit_pair(), make_qubit_nested3()};
}

ReferenceModel reference_model(const std::string& name) {
    for (ReferenceModel& ref : reference_models())
        if (ref.name == name) return std::move(ref);
    std::string known;
    for (const ReferenceModel& ref : reference_models())
        known += (known.empty() ? "" : ", ") + ref.name;
    throw parse_error("unknown reference model '" + name + "' (known: " + known + ")");
}

// ---- random model drawing ----

namespace {

double frame_spread_fermionic(const BuiltModel& model) {
    const int n = model.basis->n;
    std::vector<Mat> hops(n * n);
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q)
            hops[(p - 1) * n + q - 1] = to_matrix(transfer_op(p, q, n), n);
    std::vector<Mat> rdms;
    std::vector<int> levels;
    for (const Certificate& cert : model.certificates) {
        Mat d(n, n);
        for (int p = 1; p <= n; ++p)
            for (int q = 1; q <= n; ++q)
                d(p - 1, q - 1) = cert.state.dot(hops[(p - 1) * n + q - 1] * cert.state);
        rdms.push_back(d);
        levels.push_back(cert.level);
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < rdms.size(); ++a)
        for (std::size_t b = a + 1; b < rdms.size(); ++b) {
            if (levels[a] == levels[b]) continue;
            spread = std::max(spread, (rdms[a] * rdms[b] - rdms[b] * rdms[a]).norm());
        }
    return spread;
}

double frame_spread_qubit(const BuiltModel& model) {
    const int n = model.basis->n;
    std::vector<Mat> axes;
    for (int k = 1; k <= n; ++k)
        for (char ax : {'x', 'y', 'z'})
            axes.push_back(to_matrix(pauli_op(ax, k, n), n));
    std::vector<std::vector<Eigen::Vector3d>> bloch;
    std::vector<int> levels;
    for (const Certificate& cert : model.certificates) {
        std::vector<Eigen::Vector3d> dirs(n);
        for (int k = 0; k < n; ++k)
            for (int c = 0; c < 3; ++c)
                dirs[k](c) = cert.state.dot(axes[3 * k + c] * cert.state).real();
        bloch.push_back(dirs);
        levels.push_back(cert.level);
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < bloch.size(); ++a)
        for (std::size_t b = a + 1; b < bloch.size(); ++b) {
            if (levels[a] == levels[b]) continue;
            for (int k = 0; k < n; ++k)
                spread = std::max(spread, bloch[a][k].cross(bloch[b][k]).norm());
        }
    return spread;
}

}  // namespace

ClassSpec random_class_spec(Family fam, int n, int k, std::uint64_t seed) {
    if (fam == Family::majorana)
        throw constraint_error("random model drawing covers the fermionic and pauli families");
    if (k < 1) throw constraint_error("depth must be at least 1");
    if (k > n) throw constraint_error("depth exceeds the mode count");
    const auto basis = basis_for(fam, n);
    const int r = static_cast<int>(basis->csa.size());
    std::vector<Mat> gen_mats(basis->dim());
    for (int g = 0; g < basis->dim(); ++g)
        gen_mats[g] = to_matrix(basis->gens[g], n);

    std::uint64_t chain = seed_mix(seed_mix(0xC1A55ull, seed),
                                   static_cast<std::uint64_t>(n * 64 + k * 8 + static_cast<int>(fam)));
    for (int attempt = 0; attempt < 200; ++attempt) {
        ClassSpec spec;
        spec.family = fam;
        spec.n = n;
        for (int j = 0; j < k; ++j) {
            LevelSpec lvl;
            lvl.f.add_constant(2.0 * uniform_unit(chain) - 1.0);
            for (int s = 0; s < r; ++s)
                lvl.f.add({{s, 1}}, 4.0 * uniform_unit(chain) - 2.0);
            for (int s1 = 0; s1 < r; ++s1)
                for (int s2 = s1 + 1; s2 < r; ++s2)
                    lvl.f.add({{s1, 1}, {s2, 1}}, 4.0 * uniform_unit(chain) - 2.0);
            if (j + 1 < k) {
                const std::vector<double> sp = basis->csa_spectrum(j);
                lvl.projector = ProjectorSpec{
                    {{j, sp[splitmix64_next(chain) % sp.size()]}}, {}};
            }
            spec.levels.push_back(std::move(lvl));
        }

        std::vector<Mat> pins;
        for (int j = 0; j + 1 < k; ++j)
            pins.push_back(to_matrix(spec.levels[j].projector->to_poly(*basis), n));
        bool drawable = true;
        for (int j = 0; j < k && drawable; ++j) {
            std::vector<int> allowed;
            for (int g = 0; g < basis->dim(); ++g) {
                bool ok = true;
                for (int i = 0; i < j; ++i) {
                    const double scale = std::max(1.0, gen_mats[g].norm() * pins[i].norm());
                    if ((gen_mats[g] * pins[i] - pins[i] * gen_mats[g]).norm() > 1e-12 * scale) {
                        ok = false;
                        break;
                    }
                }
                if (ok) allowed.push_back(g);
            }
            if (allowed.empty()) {
                drawable = false;
                break;
            }
            const int steps = std::min<int>(static_cast<int>(allowed.size()), 4);
            for (int s = 0; s < steps; ++s) {
                const int g = allowed[splitmix64_next(chain) % allowed.size()];
                spec.levels[j].rotation.push_back({basis->info[g].label, uniform_angle(chain)});
            }
        }
        if (!drawable) continue;

        BuiltModel model;
        try {
            model = build_model(spec);
        } catch (const std::exception&) {
            continue;
        }
        std::vector<double> energies;
        for (const Certificate& cert : model.certificates) energies.push_back(cert.energy);
        std::sort(energies.begin(), energies.end());
        bool separated = true;
        for (std::size_t t = 1; t < energies.size(); ++t)
            if (energies[t] - energies[t - 1] < 1e-3) separated = false;
        if (!separated) continue;
        if (k >= 2) {
            const double spread = (fam == Family::fermionic)
                                      ? frame_spread_fermionic(model)
                                      : frame_spread_qubit(model);
            if (spread < (fam == Family::fermionic ? 1e-2 : 5e-2)) continue;
        }
        return spec;
    }
    throw constraint_error("failed to draw a well-separated random model");
}

}
