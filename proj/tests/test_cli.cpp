#include "test_util.hpp"

#include <filesystem>
#include <fstream>
#include <gtest/gtest.h>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
	int code;
	std::string out, err;
};

std::string Slurp(const fs::path &p) {
	std::ifstream in(p);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

fs::path Scratch() {
	static fs::path dir = [] {
		auto d = fs::temp_directory_path() / ("pacq_cli_" + std::to_string(::getpid()));
		fs::create_directories(d);
		return d;
	}();
	return dir;
}

Result Pacq(const std::string &args) {
	auto out = Scratch() / "stdout", err = Scratch() / "stderr";
	std::string cmd = std::string(PACQ_BIN) + " " + args + " >" + out.string() + " 2>" + err.string();
	int st = std::system(cmd.c_str());
	return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, Slurp(out), Slurp(err)};
}

std::string Query(const std::string &name, const std::string &sql) {
	auto p = Scratch() / (name + ".sql");
	std::ofstream(p) << sql << "\n";
	return p.string();
}

std::string Data() {
	static std::string dir = [] {
		auto d = Scratch() / "data";
		auto r = Pacq("gen --mini-tpch --rows 10000 --seed 1 --out " + d.string());
		EXPECT_EQ(r.code, 0) << r.err;
		return d.string();
	}();
	return dir;
}

std::string On(const std::string &q) {
	return "--schema " + Data() + "/schema.pac.sql --data " + Data() + " --query " + q;
}

const char *kQ01 = "SELECT l_returnflag, l_linestatus, sum(l_quantity) AS sum_qty, avg(l_extendedprice) AS p, "
                   "count(*) AS n FROM lineitem WHERE l_shipdate <= DATE '1998-09-02' "
                   "GROUP BY l_returnflag, l_linestatus ORDER BY l_returnflag, l_linestatus";

} // namespace

TEST(Cli, RejectedQueryExitsTwo) {
	auto q = Query("q10", "SELECT c_custkey, c_name, sum(l_extendedprice * (1 - l_discount)) AS revenue, c_acctbal "
	                      "FROM customer, orders, lineitem WHERE c_custkey = o_custkey AND l_orderkey = o_orderkey "
	                      "AND l_returnflag = 'R' GROUP BY c_custkey, c_name, c_acctbal ORDER BY revenue DESC LIMIT 20");
	auto r = Pacq("run " + On(q));
	EXPECT_EQ(r.code, 2);
	EXPECT_NE(r.err.find("ProtectedColumnRelease"), std::string::npos) << r.err;
	EXPECT_TRUE(r.out.empty());
}

TEST(Cli, InconspicuousIgnoresNoise) {
	auto q = Query("nations", "SELECT n_name, n_regionkey FROM nation ORDER BY n_name");
	auto a = Pacq("run " + On(q));
	auto b = Pacq("--no-noise run " + On(q));
	EXPECT_EQ(a.code, 0);
	EXPECT_EQ(b.code, 0);
	EXPECT_EQ(a.out, b.out);
	EXPECT_EQ(a.out.substr(0, 19), "n_name,n_regionkey\n");
}

TEST(Cli, FixedSeedIsReproducible) {
	auto q = Query("q01", kQ01);
	auto a = Pacq("--seed 7 run " + On(q));
	auto b = Pacq("run " + On(q) + " --seed 7");
	ASSERT_EQ(a.code, 0) << a.err;
	EXPECT_EQ(a.out, b.out);
	auto c = Pacq("--seed 8 run " + On(q));
	EXPECT_NE(a.out, c.out);
}

TEST(Cli, RunEqualsOracle) {
	auto q = Query("q01", kQ01);
	for (int seed : {1, 2}) {
		auto a = Pacq("--seed " + std::to_string(seed) + " run " + On(q));
		auto b = Pacq("--seed " + std::to_string(seed) + " oracle " + On(q));
		ASSERT_EQ(a.code, 0);
		ASSERT_EQ(b.code, 0) << b.err;
		EXPECT_EQ(a.out, b.out);
	}
}

TEST(Cli, UserErrorsExitOne) {
	auto q = Query("bad", "SELECT FROM");
	auto r = Pacq("run " + On(q));
	EXPECT_EQ(r.code, 1);
	EXPECT_NE(r.err.find("SyntaxError"), std::string::npos);
	EXPECT_NE(r.err.find("^"), std::string::npos);
	EXPECT_EQ(Pacq("--bogus run " + On(q)).code, 1);
	EXPECT_EQ(Pacq("run --schema /nonexistent.sql --data /tmp --sql 'SELECT 1'").code, 1);
	EXPECT_EQ(Pacq("frobnicate").code, 1);
	EXPECT_EQ(Pacq("--help").code, 0);
}

TEST(Cli, SuspiciousGroupIsUserError) {
	auto q = Query("phone", "SELECT c_phone, count(*) AS n FROM customer, orders, lineitem "
	                        "WHERE c_custkey = o_custkey AND o_orderkey = l_orderkey GROUP BY c_phone");
	auto r = Pacq("run " + On(q));
	EXPECT_EQ(r.code, 1);
	EXPECT_NE(r.err.find("SuspiciousGroup"), std::string::npos);
}

TEST(Cli, JsonOutputsParse) {
	auto q = Query("q01", kQ01);
	auto run = Pacq("--json run " + On(q));
	ASSERT_EQ(run.code, 0);
	auto j = nlohmann::json::parse(run.out);
	EXPECT_EQ(j["classification"], "Rewritable");
	EXPECT_EQ(j["columns"].size(), 5u);
	EXPECT_GT(j["rows"].size(), 0u);

	auto ex = Pacq("explain --dump-plan json --schema " + Data() + "/schema.pac.sql --query " + q);
	ASSERT_EQ(ex.code, 0) << ex.err;
	EXPECT_TRUE(nlohmann::json::parse(ex.out).contains("trace"));

	auto diff = Pacq("--json diff --key-cols 2 " + On(q));
	ASSERT_EQ(diff.code, 0) << diff.err;
	auto d = nlohmann::json::parse(diff.out);
	EXPECT_EQ(d["recall"], 1.0);
	EXPECT_TRUE(d.contains("mape"));

	auto mia = Pacq("--json mia-bound --prior 0.5 --total-mi 0.25");
	ASSERT_EQ(mia.code, 0);
	double b = nlohmann::json::parse(mia.out)["bound"];
	EXPECT_NEAR(b, 0.838, 0.002);
}

TEST(Cli, GenAndBench) {
	auto out = (Scratch() / "z.csv").string();
	auto g = Pacq("gen --dist zipf_like --rows 1000 --seed 7 --out " + out);
	ASSERT_EQ(g.code, 0) << g.err;
	std::string csv = Slurp(out);
	EXPECT_EQ(csv.substr(0, csv.find('\n')), "key,hash,val");
	EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1001);
	EXPECT_EQ(Pacq("gen --dist nope --rows 10").code, 1);

	auto b = Pacq("bench --updates 20000 --kernel count --dist uniform_int");
	ASSERT_EQ(b.code, 0) << b.err;
	EXPECT_EQ(b.out.substr(0, b.out.find('\n')), "kernel,tier,distribution,rows,groups,ns_per_row");
	EXPECT_NE(b.out.find("count,swar,uniform_int,20000,1,"), std::string::npos);
}
