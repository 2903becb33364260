#include "mfsolv/transforms.hpp"

#include <functional>

namespace mfs {

OpPoly substitute_factors(const OpPoly& p, Family target, int n,
                          const std::function<OpPoly(const Factor&)>& image) {
    OpPoly out(target, n);
    for (const auto& [key, c] : p.terms()) {
        OpPoly term(target, n);
        term.add_identity(c);
        for (const Factor& f : OpPoly::decode(key)) term = multiply(term, image(f));
        out += term;
    }
    out.prune();
    return out;
}

OpPoly majorana_from_fermionic(const OpPoly& p) {
    if (p.family() == Family::majorana) return p;
    if (p.family() != Family::fermionic)
        throw constraint_error("majorana_from_fermionic expects a fermionic polynomial");
    int n = p.modes();
    return substitute_factors(p, Family::majorana, n, [n](const Factor& f) {
        OpPoly img(Family::majorana, n);
        // a_p = (gamma_{2p} - i gamma_{2p-1}) / 2, creation is the adjoint
        cplx odd = (f.tag == 'a') ? cplx(0, -0.5) : cplx(0, 0.5);
        img.add_term({{'g', 2 * f.index}}, 0.5);
        img.add_term({{'g', 2 * f.index - 1}}, odd);
        return img;
    });
}

OpPoly fermionic_from_majorana(const OpPoly& p) {
    if (p.family() == Family::fermionic) return p;
    if (p.family() != Family::majorana)
        throw constraint_error("fermionic_from_majorana expects a majorana polynomial");
    int n = p.modes();
    return substitute_factors(p, Family::fermionic, n, [n](const Factor& f) {
        OpPoly img(Family::fermionic, n);
        int mode = (f.index + 1) / 2;
        if (f.index % 2 == 1) {  // gamma_{2p-1} = i a_p - i a_p^+
            img.add_term({{'a', mode}}, cplx(0, 1));
            img.add_term({{'c', mode}}, cplx(0, -1));
        } else {  // gamma_{2p} = a_p + a_p^+
            img.add_term({{'a', mode}}, 1.0);
            img.add_term({{'c', mode}}, 1.0);
        }
        return img;
    });
}

OpPoly jordan_wigner(const OpPoly& p) {
    if (p.family() == Family::pauli) return p;
    const OpPoly src = (p.family() == Family::majorana) ? p : majorana_from_fermionic(p);
    int n = src.modes();
    // gamma_{2p-1} -> -y_p z_{p-1} ... z_1,  gamma_{2p} -> x_p z_{p-1} ... z_1
    return substitute_factors(src, Family::pauli, n, [n](const Factor& f) {
        OpPoly img(Family::pauli, n);
        int mode = (f.index + 1) / 2;
        FactorSeq seq;
        seq.push_back({f.index % 2 == 1 ? 'y' : 'x', mode});
        for (int q = mode - 1; q >= 1; --q) seq.push_back({'z', q});
        img.add_term(seq, f.index % 2 == 1 ? -1.0 : 1.0);
        return img;
    });
}

}
