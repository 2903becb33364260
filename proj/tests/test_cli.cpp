#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <mfsolv/builder.hpp>
#include <mfsolv/matrix_rep.hpp>
#include <mfsolv/textio.hpp>
#include <mfsolv/transforms.hpp>

#include "test_util.hpp"

using namespace mfs;
using njson = nlohmann::json;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(MFSOLV_CLI_BIN) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    CmdResult r;
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WEXITSTATUS(status);
    return r;
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "mfsolv_cli_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string scratch_file(const std::string& name, const std::string& content) {
    const auto path = scratch_dir() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int term_lines(const std::string& text) {
    int count = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) count += line.find(" : ") != std::string::npos;
    return count;
}

std::string generated_class1() {
    static std::string path;
    if (path.empty()) {
        path = (scratch_dir() / "class1_generated.txt").string();
        const CmdResult r =
            run_cli("generate " + testutil::fixture_path("class1_u3.json") + " --out " + path);
        REQUIRE(r.code == 0);
    }
    return path;
}

}  // namespace

TEST_CASE("parse_echoes_the_shipped_operator_canonically") {
    const CmdResult r = run_cli("parse " + testutil::fixture_path("nonmf_4mode.txt"));
    CHECK(r.code == 0);
    CHECK(term_lines(r.out) == 18);
    CHECK(r.out.find("modes 4") != std::string::npos);
    CHECK(r.out.find("# mfsolv " ) != std::string::npos);
}

TEST_CASE("parse_is_the_identity_on_its_own_output") {
    const std::string first = (scratch_dir() / "echo1.txt").string();
    const CmdResult a =
        run_cli("parse " + testutil::fixture_path("gated_4mode.txt") + " --out " + first);
    REQUIRE(a.code == 0);
    const CmdResult b = run_cli("parse " + first);
    CHECK(b.code == 0);
    CHECK(b.out == slurp(first));
}

TEST_CASE("parse_flags_syntax_errors_with_their_line") {
    const std::string bad = scratch_file("bad.txt", "modes 2\n0.5 : 3^^\n");
    const CmdResult r = run_cli("parse " + bad, true);
    CHECK(r.code == 2);
    CHECK(r.out.find("line 2") != std::string::npos);
}

TEST_CASE("parse_rejects_indices_beyond_the_declared_count") {
    const std::string wide = scratch_file("wide.txt", "1 : 4^ 4\n");
    const CmdResult r = run_cli("parse " + wide + " --modes 3", true);
    CHECK(r.code == 2);

    const CmdResult ok = run_cli("parse " + wide + " --modes 6");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("modes 6") != std::string::npos);
}

TEST_CASE("parse_accepts_an_empty_file_as_the_zero_polynomial") {
    const std::string empty = scratch_file("empty.txt", "");
    const CmdResult r = run_cli("parse " + empty + " --family fermionic");
    CHECK(r.code == 0);
    CHECK(term_lines(r.out) == 0);
}

TEST_CASE("generate_matches_the_expected_coefficients") {
    const OpPoly got = parse_poly_file(generated_class1());
    const OpPoly want = parse_poly_file(testutil::fixture_path("class1_u3_expected.txt"));
    REQUIRE(got.term_count() == want.term_count());
    for (const auto& [key, c] : want.terms()) {
        REQUIRE(got.terms().count(key) == 1);
        CHECK(std::abs(got.terms().at(key) - c) <= 0.05);
    }
}

TEST_CASE("generate_stamps_provenance_on_the_output") {
    const std::string text = slurp(generated_class1());
    CHECK(text.find("# mfsolv ") != std::string::npos);
    CHECK(text.find("# seed 1") != std::string::npos);
    CHECK(text.find("# spec ") != std::string::npos);
    CHECK(text.find("# class 1") != std::string::npos);
}

TEST_CASE("generate_surfaces_commutation_violations_with_the_offender") {
    std::string spec = slurp(testutil::fixture_path("class2_u3.json"));
    const auto at = spec.find("k_2_3");
    REQUIRE(at != std::string::npos);
    spec.replace(at, 5, "k_1_2");
    const std::string bad = scratch_file("bad_spec.json", spec);

    const CmdResult r = run_cli("generate " + bad, true);
    CHECK(r.code == 3);
    CHECK(r.out.find("k_1_2") != std::string::npos);
}

TEST_CASE("classify_reports_the_depth_in_json") {
    const CmdResult r = run_cli("classify " + generated_class1() + " --budget 8");
    CHECK(r.code == 0);
    const njson doc = njson::parse(r.out);
    CHECK(doc.at("verdict").get<std::string>() == "class");
    CHECK(doc.at("class").get<int>() == 1);
    CHECK(doc.at("provenance").at("tool").get<std::string>() == "mfsolv");
    CHECK(doc.at("provenance").at("seed").get<int>() == 1);
}

TEST_CASE("classify_runs_are_byte_reproducible_for_a_seed") {
    const std::string a = (scratch_dir() / "rep_a.json").string();
    const std::string b = (scratch_dir() / "rep_b.json").string();
    REQUIRE(run_cli("classify " + generated_class1() + " --budget 4 --seed 9 --out " + a).code == 0);
    REQUIRE(run_cli("classify " + generated_class1() + " --budget 4 --seed 9 --out " + b).code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("classify_signals_an_inconclusive_run_in_the_exit_code") {
    const std::string pert =
        scratch_file("perturbed.txt", slurp(generated_class1()) + "0.003 : 2^ 1^ 2 1\n");
    const std::string out = (scratch_dir() / "pert.json").string();
    const CmdResult r = run_cli("classify " + pert + " --budget 8 --out " + out);
    CHECK(r.code == 5);
    const njson doc = njson::parse(slurp(out));
    CHECK(doc.at("inconclusive").get<bool>());
}

TEST_CASE("solve_tabulates_the_spectrum_with_mean_field_checks") {
    const CmdResult r = run_cli("solve " + generated_class1());
    CHECK(r.code == 0);
    const njson doc = njson::parse(r.out);
    const std::vector<double> want = {-45.0, -27.0, -9.0, -9.0, 0.0, 0.0, 0.0, 0.0};
    const auto got = doc.at("eigenvalues").get<std::vector<double>>();
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
    for (const auto& st : doc.at("states")) CHECK(st.at("mean_field").get<bool>());
}

TEST_CASE("verify_accepts_the_built_model") {
    const CmdResult r = run_cli("verify " + generated_class1() + " " +
                                testutil::fixture_path("class1_u3.json"));
    CHECK(r.code == 0);
    const njson doc = njson::parse(r.out);
    CHECK(doc.at("match").get<bool>());
    CHECK(doc.at("distance").get<double>() < 1e-8);
}

TEST_CASE("verify_flags_a_mismatched_operator") {
    const std::string pert =
        scratch_file("mismatch.txt", slurp(generated_class1()) + "0.2 : 2^ 1^ 2 1\n");
    const CmdResult r = run_cli(
        "verify " + pert + " " + testutil::fixture_path("class1_u3.json"), true);
    CHECK(r.code == 3);
}

TEST_CASE("the_dense_capacity_cap_gets_its_own_exit_code") {
    const std::string big = scratch_file("big.txt", "modes 16\n1 : 1^ 1\n");
    CHECK(run_cli("solve " + big, true).code == 4);
    CHECK(run_cli("classify " + big, true).code == 4);
}

TEST_CASE("jw_writes_the_qubit_image_of_a_fermionic_operator") {
    const std::string hop = scratch_file("hop.txt", "modes 2\n1 : 1^ 2\n1 : 2^ 1\n0.5 : 1^ 1\n");
    const std::string out = (scratch_dir() / "hop_pauli.txt").string();
    const CmdResult r = run_cli("jw " + hop + " --out " + out);
    REQUIRE(r.code == 0);

    const OpPoly image = parse_poly_file(out);
    REQUIRE(image.family() == Family::pauli);
    const OpPoly direct = jordan_wigner(parse_poly_file(hop));
    CHECK((to_matrix(image, 2) - to_matrix(direct, 2)).norm() <= 1e-12);
}

TEST_CASE("jw_refuses_non_fermionic_input") {
    const std::string q = scratch_file("qubit.txt", "qubits 1\n1 : x1\n");
    const CmdResult r = run_cli("jw " + q, true);
    CHECK(r.code == 3);
}

TEST_CASE("closure_summarizes_a_generator_algebra") {
    const std::string gens = scratch_file("su2.txt", "qubits 1\n1i : z1\n\n1i : x1\n");
    const CmdResult r = run_cli("closure " + gens);
    CHECK(r.code == 0);
    const njson doc = njson::parse(r.out);
    CHECK(doc.at("dimension").get<int>() == 3);
    CHECK(doc.at("csa").size() == 1);
    CHECK(doc.at("structure_constants").at("max_imag").get<double>() < 1e-10);
}

TEST_CASE("usage_errors_and_help_behave") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("frobnicate", true).code == 2);
    CHECK(run_cli("parse", true).code == 2);
}
