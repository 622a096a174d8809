// End-to-end checks of the prop-lab binary, driven through std::system.
// Invoked as: test_cli <prop-lab-path> <workdir>
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "proplab/envs.hpp"
#include "proplab/oracle.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;
std::string g_dir;

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_all(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// returns the process exit code (not the raw wait status)
int run_cli(const std::string& args) {
    std::string cmd = "'" + g_cli + "' " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status < 0) return -1;
#ifdef WEXITSTATUS
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    return status;
#endif
}

std::string sample_config() {
    return "[experiment]\nid = \"cli\"\nepisodes = 40\nseeds = [3, 4]\n"
           "[env]\nbuilder = \"random_finite\"\nT = 6\nS = 3\nA = 2\n"
           "min_entry = 0.05\nenv_seed = 11\n"
           "[baseline]\ntype = \"tabular_uniform\"\n"
           "[advice]\ntype = \"exact\"\n"
           "[prop]\nmode = \"black\"\nlambda = 0.5\n";
}

} // namespace

TEST_CASE("run reruns are byte-identical") {
    std::string cfg = g_dir + "/cli_cfg.toml";
    write_all(cfg, sample_config());
    std::string o1 = g_dir + "/cli_run1.csv", o2 = g_dir + "/cli_run2.csv";
    REQUIRE(run_cli("run --config '" + cfg + "' --out '" + o1 + "'") == 0);
    REQUIRE(run_cli("run --config '" + cfg + "' --out '" + o2 + "'") == 0);
    std::string a = read_all(o1);
    CHECK(!a.empty());
    CHECK(a == read_all(o2));
    // --seed restricts output to a single row
    std::string o3 = g_dir + "/cli_run3.csv";
    REQUIRE(run_cli("run --config '" + cfg + "' --seed 3 --out '" + o3 + "'") == 0);
    std::string b = read_all(o3);
    CHECK(std::count(b.begin(), b.end(), '\n') == 2);
}

TEST_CASE("sweep reruns are byte-identical and cover the grid") {
    std::string cfg = g_dir + "/cli_cfg.toml";
    write_all(cfg, sample_config());
    std::string o1 = g_dir + "/cli_sw1.csv", o2 = g_dir + "/cli_sw2.csv";
    std::string args = "sweep --config '" + cfg + "' --param lambda --grid 0,0.5,1 --out '";
    REQUIRE(run_cli(args + o1 + "'") == 0);
    REQUIRE(run_cli(args + o2 + "'") == 0);
    std::string a = read_all(o1);
    CHECK(!a.empty());
    CHECK(a == read_all(o2));
    // 3 grid points x 2 seeds + header
    CHECK(std::count(a.begin(), a.end(), '\n') == 7);
}

TEST_CASE("certify exits 2 on a non-mixing chain") {
    // identity transitions never contract in TV
    proplab::envs::FiniteMdp mdp;
    mdp.num_states = 2;
    mdp.num_actions = 1;
    mdp.horizon = 4;
    for (int t = 0; t < 4; ++t) {
        mdp.transitions.push_back(proplab::Matrix::Identity(2, 2));
        mdp.costs.push_back(proplab::Matrix::Constant(2, 1, 1.0));
    }
    std::string env = g_dir + "/cli_identity.json";
    write_all(env, proplab::envs::finite_mdp_to_json(mdp));
    std::string out = g_dir + "/cli_cert.json";
    CHECK(run_cli("certify --env '" + env + "' --out '" + out + "'") == 2);
    auto j = nlohmann::json::parse(read_all(out));
    CHECK(j.at("pass").get<bool>() == false);

    // a well-mixed chain passes
    proplab::envs::Rng rng(9);
    auto good = proplab::envs::random_finite_mdp(3, 2, 5, 0.1, rng);
    write_all(env, proplab::envs::finite_mdp_to_json(good));
    CHECK(run_cli("certify --env '" + env + "' --out '" + out + "'") == 0);
}

TEST_CASE("oracle output matches the in-process oracle") {
    proplab::envs::Rng rng(21);
    auto mdp = proplab::envs::random_finite_mdp(3, 2, 5, 0.05, rng);
    std::string env = g_dir + "/cli_env.json";
    write_all(env, proplab::envs::finite_mdp_to_json(mdp));
    std::string out = g_dir + "/cli_oracle.json";
    REQUIRE(run_cli("oracle --env '" + env + "' --out '" + out + "'") == 0);
    auto tables = proplab::oracle::backward_induction(mdp);
    auto expected = proplab::oracle::qstar_to_json(tables);
    CHECK(nlohmann::json::parse(read_all(out)) == nlohmann::json::parse(expected));
}

TEST_CASE("bad inputs exit 1") {
    CHECK(run_cli("run --config '" + g_dir + "/no_such_file.toml'") == 1);
    std::string bad = g_dir + "/cli_bad.json";
    write_all(bad, "{ not json");
    CHECK(run_cli("oracle --env '" + bad + "'") == 1);
}

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    if (argc > 2) g_dir = argv[2];
    if (g_cli.empty() || g_dir.empty()) {
        std::fprintf(stderr, "usage: test_cli <prop-lab> <workdir>\n");
        return 1;
    }
    doctest::Context ctx;
    return ctx.run();
}
