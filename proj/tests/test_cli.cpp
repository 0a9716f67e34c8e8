#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("QSCISSOR_CLI");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        output.append(buf.data(), got);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

TEST_CASE("selftest passes") {
    auto r = run_cli("selftest");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS permanent-identity") != std::string::npos);
    CHECK(r.output.find("PASS oracle-equivalence") != std::string::npos);
    CHECK(r.output.find("PASS legacy-scattering") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("amplify sweep is deterministic and carries a parameter header") {
    std::string args =
        "amplify --n 1 --n 2 --alpha 0.3 --sweep g:0.5:3:6:lin --cutoff 14";
    auto a = run_cli(args);
    auto b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.rfind("# qscissor", 0) == 0);
    CHECK(a.output.find("command=amplify") != std::string::npos);
    CHECK(a.output.find("cutoff=14") != std::string::npos);

    auto rows = data_lines(a.output);
    REQUIRE(rows.size() == 1 + 12);  // column header + 6 points x 2 sizes
    CHECK(rows[0] == "axis,n,fidelity,infidelity,P,P_BP,P_SP,P_XP");
    // g = 0.5, n = 1 row: fidelity is the Poisson head ratio.
    auto fields = split(rows[1]);
    REQUIRE(fields.size() == 8);
    CHECK(std::stod(fields[2]) > 0.99);
    CHECK(std::stod(fields[2]) == doctest::Approx(1.0 - std::stod(fields[3])));
}

TEST_CASE("rows follow axis-major order regardless of thread count") {
    std::string args = "amplify --n 1 --n 3 --sweep g:1:2:3:lin --cutoff 12";
    const char* bin = std::getenv("QSCISSOR_CLI");
    REQUIRE(bin != nullptr);
    auto one = run_cli(args);
    std::string forced = "QSCISSOR_THREADS=1 " + std::string(bin) + " " + args;
    FILE* pipe = popen(forced.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        output.append(buf.data(), got);
    pclose(pipe);
    // Header differs in the reported thread count; the rows must not.
    CHECK(data_lines(one.output) == data_lines(output));
}

TEST_CASE("degenerate sweep is rejected with the validation exit code") {
    auto r = run_cli("amplify --sweep g:2:2:5:lin");
    CHECK(r.exit_code == 2);
    auto r2 = run_cli("amplify --sweep g:1:2:1:lin");
    CHECK(r2.exit_code == 2);
    auto r3 = run_cli("amplify --sweep banana");
    CHECK(r3.exit_code == 2);
    auto r4 = run_cli("amplify --no-such-flag 1 --sweep g:1:2:3:lin");
    CHECK(r4.exit_code == 2);
}

TEST_CASE("noisy size guard returns the dedicated exit code") {
    const char* tmp = "/tmp/qscissor_profile_test.txt";
    {
        std::ofstream out(tmp);
        out << "tau_d = 0.7\ndark_count = 1e-8\ntau_r = 0.7\n";
    }
    auto r = run_cli(std::string("noisy --profile ") + tmp +
                     " --n 3 --sweep g:0.5:2:3:lin");
    CHECK(r.exit_code == 3);
}

TEST_CASE("noisy with the ideal profile matches amplify byte for byte") {
    std::string tail = " --n 1 --n 2 --alpha 0.3 --sweep g:0.5:2.5:5:lin --cutoff 12";
    auto ideal = run_cli("noisy" + tail);
    auto plain = run_cli("amplify" + tail);
    CHECK(ideal.exit_code == 0);
    auto a = data_lines(ideal.output);
    auto b = data_lines(plain.output);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("noisy profile changes the numbers and adds profile columns") {
    const char* tmp = "/tmp/qscissor_profile_test2.txt";
    {
        std::ofstream out(tmp);
        out << "tau_d = 0.7\ndark_count = 1e-8\ntau_r = 0.7\n";
    }
    auto r = run_cli(std::string("noisy --profile ") + tmp +
                     " --n 1 --sweep g:1:2:2:lin --cutoff 8");
    CHECK(r.exit_code == 0);
    auto rows = data_lines(r.output);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] ==
          "axis,n,fidelity,infidelity,P,P_BP,P_SP,P_XP,tau_d,dark_count,tau_r");
    auto fields = split(rows[1]);
    REQUIRE(fields.size() == 11);
    CHECK(std::stod(fields[2]) < 1.0);   // fidelity degraded
    CHECK(std::stod(fields[8]) == 0.7);  // tau_d column
}

TEST_CASE("teleport alpha sweep starts at perfect fidelity") {
    auto r = run_cli(
        "teleport --input cat --n 2 --n 4 --sweep alpha:0:1.2:4:lin --cutoff 24");
    CHECK(r.exit_code == 0);
    auto rows = data_lines(r.output);
    REQUIRE(rows.size() == 1 + 8);
    // alpha = 0 rows have F = 1 for every n.
    for (int i = 1; i <= 2; ++i) {
        auto fields = split(rows[i]);
        CHECK(std::stod(fields[0]) == 0.0);
        CHECK(std::stod(fields[2]) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // teleport refuses g != 1.
    auto bad = run_cli("teleport --g 2 --sweep alpha:0.1:1:3:lin");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("relay distance sweep emits scaling fits") {
    auto r = run_cli(
        "relay --n 1 --chi 0.25 --placement middle --sweep "
        "distance:50:150:9:lin");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("# fit n=1 placement=middle exponent=") !=
          std::string::npos);
    auto rows = data_lines(r.output);
    CHECK(rows[0] == "axis,n,placement,LN_full,LN_gaussian,RCI,P_loss,PLOB");

    // The fitted exponent sits near n/2 for the middle placement.
    auto pos = r.output.find("exponent=");
    double slope = std::stod(r.output.substr(pos + 9));
    CHECK(std::abs(slope - 0.5) < 0.05);
}

TEST_CASE("relay g sweep columns are consistent") {
    auto r = run_cli(
        "relay --n 1 --n 2 --chi 0.25 --eta 0.05 --sweep g:2:6:5:lin");
    CHECK(r.exit_code == 0);
    auto rows = data_lines(r.output);
    REQUIRE(rows.size() == 1 + 10);
    for (size_t i = 1; i < rows.size(); ++i) {
        auto fields = split(rows[i]);
        REQUIRE(fields.size() == 8);
        CHECK(std::stod(fields[3]) >= 0.0);                      // LN_full
        CHECK(std::stod(fields[6]) > 0.0);                       // P_loss
        CHECK(std::stod(fields[7]) ==
              doctest::Approx(-std::log2(0.95)).epsilon(1e-9));  // PLOB
    }
}

TEST_CASE("config file supplies defaults and flags win") {
    const char* tmp = "/tmp/qscissor_config_test.ini";
    {
        std::ofstream out(tmp);
        out << "[amplify]\nalpha = 0.5\ncutoff = 13\nsweep = g:1:2:3:lin\n";
    }
    auto from_config = run_cli(std::string("--config ") + tmp + " amplify");
    CHECK(from_config.exit_code == 0);
    CHECK(from_config.output.find("alpha=0.5") != std::string::npos);
    CHECK(from_config.output.find("cutoff=13") != std::string::npos);

    auto overridden =
        run_cli(std::string("--config ") + tmp + " amplify --alpha 0.25");
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.output.find("alpha=0.25") != std::string::npos);
}

TEST_CASE("smsv gain sweep shows the odd-size parity") {
    auto r = run_cli(
        "amplify --input smsv --s 0.29 --n 2 --n 3 --sweep g:0.3:1.8:4:lin "
        "--cutoff 600");
    CHECK(r.exit_code == 0);
    auto rows = data_lines(r.output);
    REQUIRE(rows.size() == 1 + 8);
    for (size_t i = 1; i + 1 < rows.size(); i += 2) {
        auto even = split(rows[i]), odd = split(rows[i + 1]);
        REQUIRE(even[1] == "2");
        REQUIRE(odd[1] == "3");
        CHECK(even[2] == odd[2]);  // byte-identical fidelity column
    }
    // The grid reaching g^2 s = 1 is refused up front.
    auto too_far = run_cli(
        "amplify --input smsv --s 0.29 --n 2 --sweep g:0.5:2.5:5:lin");
    CHECK(too_far.exit_code == 2);
}

TEST_CASE("cat-state teleportation anchor appears in the table") {
    auto r = run_cli(
        "teleport --input cat --n 10 --sweep alpha:1:2:2:lin --cutoff 60");
    CHECK(r.exit_code == 0);
    auto rows = data_lines(r.output);
    REQUIRE(rows.size() == 3);
    auto fields = split(rows[2]);  // alpha = 2 row
    CHECK(std::stod(fields[0]) == 2.0);
    CHECK(std::stod(fields[2]) > 0.99);
}

TEST_CASE("output file option writes the same bytes as stdout") {
    const char* tmp = "/tmp/qscissor_out_test.csv";
    std::string args = "amplify --n 2 --sweep g:1:3:4:lin --cutoff 12";
    auto direct = run_cli(args);
    auto to_file = run_cli(args + " --out " + tmp);
    CHECK(to_file.exit_code == 0);
    CHECK(to_file.output.empty());
    std::ifstream in(tmp);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == direct.output);
}
