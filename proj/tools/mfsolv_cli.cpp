#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <mfsolv/algebra.hpp>
#include <mfsolv/builder.hpp>
#include <mfsolv/detector.hpp>
#include <mfsolv/errors.hpp>
#include <mfsolv/matrix_rep.hpp>
#include <mfsolv/textio.hpp>
#include <mfsolv/tolerances.hpp>
#include <mfsolv/transforms.hpp>

using namespace mfs;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kToolName = "mfsolv";
constexpr const char* kToolVersion = "1.0.0";

struct CliConfig {
    std::string in_path;
    std::string spec_path;
    std::string out_path;
    std::string family;
    int modes = 0;
    std::uint64_t seed = 1;
    int budget = 32;
    double tol_variance = tol::kVariance;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string short_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::optional<Family> family_option(const CliConfig& cfg) {
    if (cfg.family.empty()) return std::nullopt;
    return family_from_name(cfg.family);
}

std::vector<std::string> text_provenance(const CliConfig& cfg) {
    return {std::string(kToolName) + " " + kToolVersion,
            "seed " + std::to_string(cfg.seed),
            "tol variance " + short_double(cfg.tol_variance)};
}

ojson json_provenance(const CliConfig& cfg) {
    ojson p;
    p["tool"] = kToolName;
    p["version"] = kToolVersion;
    p["seed"] = cfg.seed;
    p["tolerances"]["variance"] = cfg.tol_variance;
    p["tolerances"]["reconstruction"] = tol::kReconstruction;
    return p;
}

void emit(const CliConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(cfg.out_path);
    if (!out) throw parse_error("cannot write '" + cfg.out_path + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

OpPoly load_operator(const CliConfig& cfg) {
    OpPoly p = parse_poly_file(cfg.in_path, family_option(cfg));
    if (cfg.modes > 0) {
        if (p.modes() > cfg.modes)
            throw parse_error("operator uses index " + std::to_string(p.modes()) +
                              " beyond the declared " + std::to_string(cfg.modes) + " modes");
        p.set_modes(cfg.modes);
    }
    return p;
}

int cmd_parse(const CliConfig& cfg) {
    const OpPoly p = load_operator(cfg);
    emit(cfg, poly_to_string(p, text_provenance(cfg)));
    return 0;
}

int cmd_generate(const CliConfig& cfg) {
    const std::string text = slurp(cfg.in_path);
    const ClassSpec spec = ClassSpec::from_json(text);
    const BuiltModel bm = build_model(spec);

    std::vector<std::string> header = text_provenance(cfg);
    header.push_back("spec " + hex64(fnv1a(text)));
    header.push_back("class " + std::to_string(spec.depth()));
    emit(cfg, poly_to_string(bm.hamiltonian, header));
    return 0;
}

int cmd_classify(const CliConfig& cfg) {
    const OpPoly h = load_operator(cfg);
    DetectorOptions opts;
    opts.seed = cfg.seed;
    opts.budget = cfg.budget;
    opts.tol_variance = cfg.tol_variance;

    const ClassificationReport rep = classify(h, opts);
    ojson doc = ojson::parse(rep.to_json());
    doc["provenance"] = json_provenance(cfg);
    emit(cfg, doc.dump(2));
    return rep.inconclusive ? 5 : 0;
}

int cmd_solve(const CliConfig& cfg) {
    const OpPoly h = load_operator(cfg);
    const int n = h.modes();
    const Mat hm = to_matrix(h, n);
    const EigenSystem es = exact_eigensystem(hm);

    ojson doc;
    doc["family"] = family_name(h.family());
    doc["modes"] = n;
    doc["dimension"] = static_cast<std::int64_t>(hm.rows());
    doc["hnorm"] = es.hnorm;
    doc["eigenvalues"] = std::vector<double>(es.values.data(), es.values.data() + es.values.size());
    doc["groups"] = es.groups;
    ojson states = ojson::array();
    for (int j = 0; j < es.values.size(); ++j) {
        const MeanFieldCheck mc = mf_state_check(es.vectors.col(j), h.family(), n);
        ojson row;
        row["index"] = j;
        row["energy"] = es.values(j);
        row["degenerate"] = es.groups[es.group_of(j)].size() > 1;
        row["mean_field"] = mc.ok;
        row["deviation"] = mc.deviation;
        states.push_back(row);
    }
    doc["states"] = states;
    doc["provenance"] = json_provenance(cfg);
    emit(cfg, doc.dump(2));
    return 0;
}

int cmd_verify(const CliConfig& cfg) {
    const OpPoly h = load_operator(cfg);
    const ClassSpec spec = ClassSpec::from_json(slurp(cfg.spec_path));
    const BuiltModel bm = build_model(spec);
    if (h.family() != bm.hamiltonian.family())
        throw constraint_error("operator family does not match the specification");

    const int n = std::max(h.modes(), bm.hamiltonian.modes());
    const Mat a = to_matrix(h, n);
    const Mat b = to_matrix(bm.hamiltonian, n);
    const double distance = (a - b).norm();
    const double bound = tol::kReconstruction * std::max(1.0, b.norm());
    const bool match = distance <= bound;

    ojson doc;
    doc["match"] = match;
    doc["distance"] = distance;
    doc["bound"] = bound;
    doc["class"] = spec.depth();
    doc["provenance"] = json_provenance(cfg);
    emit(cfg, doc.dump(2));
    return match ? 0 : 3;
}

int cmd_jw(const CliConfig& cfg) {
    const OpPoly p = load_operator(cfg);
    if (p.family() != Family::fermionic)
        throw constraint_error("the ladder-to-qubit map expects a fermionic operator");
    emit(cfg, poly_to_string(jordan_wigner(p), text_provenance(cfg)));
    return 0;
}

int cmd_closure(const CliConfig& cfg) {
    const std::string text = slurp(cfg.in_path);
    std::vector<OpPoly> seeds;
    std::string block;
    auto flush = [&]() {
        bool has_term = false;
        for (char c : block)
            if (!std::isspace(static_cast<unsigned char>(c))) has_term = true;
        if (has_term) {
            std::istringstream in(block);
            seeds.push_back(parse_poly(in, family_option(cfg)));
        }
        block.clear();
    };
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string trimmed = line;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty())
            flush();
        else
            block += line + "\n";
    }
    flush();
    if (seeds.empty()) throw parse_error("no generators found in '" + cfg.in_path + "'");

    const AlgebraBasis basis = lie_closure(seeds);
    const StructureConstants sc = structure_constants(basis);

    ojson doc;
    doc["family"] = family_name(basis.family);
    doc["modes"] = basis.n;
    doc["dimension"] = basis.dim();
    doc["seeds"] = seeds.size();
    ojson csa = ojson::array();
    for (int c : basis.csa) csa.push_back(basis.info[c].label);
    doc["csa"] = csa;
    doc["structure_constants"]["max_imag"] = sc.max_imag;
    doc["structure_constants"]["max_residual"] = sc.max_residual;
    ojson gens = ojson::array();
    for (const GenInfo& gi : basis.info) gens.push_back(gi.label);
    doc["generators"] = gens;
    doc["provenance"] = json_provenance(cfg);
    emit(cfg, doc.dump(2));
    return 0;
}

void add_common_flags(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--family", cfg.family, "operator family: fermionic, majorana or pauli")
        ->check(CLI::IsMember({"fermionic", "majorana", "pauli"}));
    sub->add_option("--modes", cfg.modes, "declared mode/qubit count")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", cfg.seed, "seed for every stochastic search");
    sub->add_option("--budget", cfg.budget, "optimizer restarts per search")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-variance", cfg.tol_variance, "relative zero-variance tolerance");
    sub->add_option("--out", cfg.out_path, "write the result to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field structure toolkit: build, classify and verify solvable operators"};
    app.require_subcommand(1);
    CliConfig cfg;

    CLI::App* parse = app.add_subcommand("parse", "echo an operator file in canonical form");
    parse->add_option("input", cfg.in_path, "operator file")->required();

    CLI::App* generate =
        app.add_subcommand("generate", "build a model from a level specification");
    generate->add_option("input", cfg.in_path, "specification JSON")->required();

    CLI::App* classify_cmd =
        app.add_subcommand("classify", "report the solvable depth of an operator");
    classify_cmd->add_option("input", cfg.in_path, "operator file")->required();

    CLI::App* solve = app.add_subcommand("solve", "exact eigen-table with mean-field checks");
    solve->add_option("input", cfg.in_path, "operator file")->required();

    CLI::App* verify =
        app.add_subcommand("verify", "compare an operator file against a specification");
    verify->add_option("input", cfg.in_path, "operator file")->required();
    verify->add_option("spec", cfg.spec_path, "specification JSON")->required();

    CLI::App* jw = app.add_subcommand("jw", "map a fermionic operator to its qubit image");
    jw->add_option("input", cfg.in_path, "operator file")->required();

    CLI::App* closure =
        app.add_subcommand("closure", "close generators under commutators and report the algebra");
    closure->add_option("input", cfg.in_path, "generators file, one block per blank line");
    closure->get_option("input")->required();

    for (CLI::App* sub : {parse, generate, classify_cmd, solve, verify, jw, closure})
        add_common_flags(sub, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (parse->parsed()) return cmd_parse(cfg);
        if (generate->parsed()) return cmd_generate(cfg);
        if (classify_cmd->parsed()) return cmd_classify(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (jw->parsed()) return cmd_jw(cfg);
        if (closure->parsed()) return cmd_closure(cfg);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const constraint_error& e) {
        std::cerr << "constraint violation: " << e.what() << "\n";
        return 3;
    } catch (const capacity_error& e) {
        std::cerr << "capacity exceeded: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
