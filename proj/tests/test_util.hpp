#pragma once

#include <random>
#include <string>

#include "mfsolv/ops.hpp"

namespace testutil {

inline mfs::OpPoly random_poly(std::mt19937& rng, mfs::Family fam, int n, int n_terms,
                               int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> idx(1, fam == mfs::Family::majorana ? 2 * n : n);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> tag2(0, 1);
    std::uniform_int_distribution<int> tag3(0, 2);

    mfs::OpPoly p(fam, n);
    for (int t = 0; t < n_terms; ++t) {
        mfs::FactorSeq seq;
        int d = deg(rng);
        for (int j = 0; j < d; ++j) {
            char tag = 'g';
            if (fam == mfs::Family::fermionic) tag = tag2(rng) ? 'c' : 'a';
            if (fam == mfs::Family::pauli) tag = "xyz"[tag3(rng)];
            seq.push_back({tag, idx(rng)});
        }
        p.add_term(seq, {coeff(rng), coeff(rng)});
    }
    return p;
}

inline mfs::OpPoly hermitized(const mfs::OpPoly& p) {
    mfs::OpPoly out = p;
    out += mfs::adjoint(p);
    out *= mfs::cplx(0.5, 0.0);
    return out;
}

inline std::string fixture_path(const std::string& name) {
    return std::string(FIXTURES_DIR) + "/" + name;
}

}
