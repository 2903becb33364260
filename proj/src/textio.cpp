#include "mfsolv/textio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mfs {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& s, int line_no) {
    if (s.empty()) throw parse_error("line " + std::to_string(line_no) + ": empty number");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw parse_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

cplx parse_coeff(const std::string& tok, int line_no) {
    if (tok.empty()) throw parse_error("line " + std::to_string(line_no) + ": missing coefficient");
    if (tok.back() != 'i') return {parse_real(tok, line_no), 0.0};
    std::string body = tok.substr(0, tok.size() - 1);
    for (std::size_t pos = body.size(); pos-- > 1;) {
        if ((body[pos] == '+' || body[pos] == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') {
            double re = parse_real(body.substr(0, pos), line_no);
            std::string imag = body.substr(pos);
            double im = (imag == "+") ? 1.0 : (imag == "-") ? -1.0 : parse_real(imag, line_no);
            return {re, im};
        }
    }
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    return {0.0, parse_real(body, line_no)};
}

bool all_digits(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int parse_index(const std::string& s, int line_no) {
    if (!all_digits(s))
        throw parse_error("line " + std::to_string(line_no) + ": bad factor index '" + s + "'");
    long v = std::strtol(s.c_str(), nullptr, 10);
    if (v < 1 || v > 200)
        throw parse_error("line " + std::to_string(line_no) + ": factor index out of range");
    return static_cast<int>(v);
}

struct RawFactor {
    Factor f;
    Family fam;
};

std::optional<RawFactor> parse_factor(const std::string& tok, int line_no) {
    if (tok == "I") return std::nullopt;  // identity factor
    char head = tok.front();
    if (head == 'g')
        return RawFactor{{'g', parse_index(tok.substr(1), line_no)}, Family::majorana};
    if (head == 'x' || head == 'y' || head == 'z')
        return RawFactor{{head, parse_index(tok.substr(1), line_no)}, Family::pauli};
    if (std::isdigit(static_cast<unsigned char>(head))) {
        bool dagger = tok.back() == '^';
        std::string digits = dagger ? tok.substr(0, tok.size() - 1) : tok;
        return RawFactor{{dagger ? 'c' : 'a', parse_index(digits, line_no)}, Family::fermionic};
    }
    throw parse_error("line " + std::to_string(line_no) + ": unrecognized factor '" + tok + "'");
}

}  // namespace

OpPoly parse_poly(std::istream& in, std::optional<Family> fam) {
    struct PendingTerm {
        FactorSeq factors;
        cplx coeff;
    };
    std::vector<PendingTerm> pending;
    int declared_modes = 0;
    int line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::istringstream words(line);
        std::string first;
        words >> first;
        if (first == "modes" || first == "qubits") {
            std::string count;
            if (!(words >> count) || !all_digits(count))
                throw parse_error("line " + std::to_string(line_no) + ": bad " + first +
                                  " directive");
            declared_modes = std::max(declared_modes, parse_index(count, line_no));
            std::string extra;
            if (words >> extra)
                throw parse_error("line " + std::to_string(line_no) + ": trailing text after " +
                                  first + " directive");
            continue;
        }

        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw parse_error("line " + std::to_string(line_no) +
                              ": expected '<coefficient> : <factors>'");
        cplx coeff = parse_coeff(trim(line.substr(0, colon)), line_no);

        PendingTerm term;
        term.coeff = coeff;
        std::istringstream factors(line.substr(colon + 1));
        std::string tok;
        bool any_token = false;
        while (factors >> tok) {
            any_token = true;
            auto raw = parse_factor(tok, line_no);
            if (!raw) continue;
            if (fam && raw->fam != *fam)
                throw parse_error("line " + std::to_string(line_no) + ": factor '" + tok +
                                  "' does not belong to the " + family_name(*fam) + " family");
            if (!fam) fam = raw->fam;
            term.factors.push_back(raw->f);
        }
        if (!any_token)
            throw parse_error("line " + std::to_string(line_no) +
                              ": term has no factors (use 'I' for the identity)");
        pending.push_back(std::move(term));
    }

    OpPoly poly(fam.value_or(Family::fermionic));
    for (const PendingTerm& t : pending) poly.add_term(t.factors, t.coeff);
    poly.set_modes(declared_modes);
    return poly;
}

OpPoly parse_poly_file(const std::string& path, std::optional<Family> fam) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return parse_poly(in, fam);
}

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string format_coeff(cplx c) {
    double re = c.real(), im = c.imag();
    if (std::abs(im) <= tol::kCoeffDrop) return format_real(re);
    if (std::abs(re) <= tol::kCoeffDrop) return format_real(im) + "i";
    return format_real(re) + (im < 0 ? "-" : "+") + format_real(std::abs(im)) + "i";
}

std::string format_term(const FactorSeq& factors) {
    if (factors.empty()) return "I";
    std::string out;
    for (const Factor& f : factors) {
        if (!out.empty()) out.push_back(' ');
        switch (f.tag) {
            case 'c': out += std::to_string(f.index) + "^"; break;
            case 'a': out += std::to_string(f.index); break;
            default: out += std::string(1, f.tag) + std::to_string(f.index); break;
        }
    }
    return out;
}

void print_poly(std::ostream& out, const OpPoly& poly, const std::vector<std::string>& header) {
    for (const std::string& h : header) out << "# " << h << "\n";
    out << (poly.family() == Family::pauli ? "qubits " : "modes ") << poly.modes() << "\n";
    std::vector<const std::pair<const std::string, cplx>*> rows;
    rows.reserve(poly.term_count());
    for (const auto& kv : poly.terms()) rows.push_back(&kv);
    std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        if (a->first.size() != b->first.size()) return a->first.size() < b->first.size();
        return a->first < b->first;
    });
    for (const auto* kv : rows)
        out << format_coeff(kv->second) << " : " << format_term(OpPoly::decode(kv->first)) << "\n";
}

std::string poly_to_string(const OpPoly& poly, const std::vector<std::string>& header) {
    std::ostringstream out;
    print_poly(out, poly, header);
    return out.str();
}

void write_poly_file(const std::string& path, const OpPoly& poly,
                     const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    print_poly(out, poly, header);
}

}
