#include "test_util.hpp"

#include "pac/hash.hpp"

#include <gtest/gtest.h>
#include <set>

using namespace pac;

TEST(Distributions, NamesRoundTrip) {
	EXPECT_EQ(AllDistributions().size(), 12u);
	for (auto d : AllDistributions()) {
		auto p = ParseDistribution(DistributionName(d));
		ASSERT_TRUE(p.has_value());
		EXPECT_EQ(*p, d);
	}
	EXPECT_FALSE(ParseDistribution("gaussian").has_value());
}

TEST(Distributions, AllSame) {
	auto v = GenerateValues(Distribution::AllSame, 500, 1);
	ASSERT_EQ(v.size(), 500u);
	for (auto x : v) {
		EXPECT_EQ(x, v[0]);
	}
}

TEST(Distributions, Monotone) {
	auto inc = GenerateValues(Distribution::MonotonicInc, 1000, 1);
	for (size_t i = 1; i < inc.size(); i++) {
		EXPECT_LT(inc[i - 1], inc[i]);
	}
	auto dec = GenerateValues(Distribution::MonotonicDec, 1000, 1);
	for (size_t i = 1; i < dec.size(); i++) {
		EXPECT_GT(dec[i - 1], dec[i]);
	}
}

TEST(Distributions, NegativeMixedCancels) {
	auto v = GenerateValues(Distribution::NegativeMixed, 100001, 3);
	int64_t total = 0, abs_total = 0;
	bool pos = false, neg = false;
	for (auto x : v) {
		total += x;
		abs_total += std::abs(x);
		pos |= x > 0;
		neg |= x < 0;
	}
	EXPECT_TRUE(pos && neg);
	EXPECT_LT(std::abs(double(total)) / double(abs_total), 0.01);
}

TEST(Distributions, RangesAndDeterminism) {
	for (auto d : AllDistributions()) {
		auto a = GenerateValues(d, 5000, 9), b = GenerateValues(d, 5000, 9);
		EXPECT_EQ(a, b) << DistributionName(d);
	}
	for (auto x : GenerateValues(Distribution::UniformTinyint, 5000, 2)) {
		EXPECT_GE(x, 0);
		EXPECT_LE(x, 100);
	}
	auto sparse = GenerateValues(Distribution::SparseLarge, 100000, 2);
	size_t zeros = std::count(sparse.begin(), sparse.end(), 0);
	EXPECT_NEAR(zeros / 100000.0, 0.99, 0.003);
}

TEST(Generate, BenchTable) {
	DistributionSpec spec;
	spec.rows = 1000;
	spec.groups = 10;
	Relation r = Generate(spec);
	ASSERT_EQ(r.rows(), 1000u);
	ASSERT_EQ(r.schema.size(), 3u);
	EXPECT_EQ(r.schema[1].type, Type::Hash);
	std::set<int64_t> keys;
	for (size_t i = 0; i < r.rows(); i++) {
		keys.insert(r.cols[0][i].as_int());
		EXPECT_EQ(r.cols[1][i].as_hash(), PacHash(Value::Int(int64_t(i)), kBenchSalt));
	}
	EXPECT_EQ(keys.size(), 10u);
	spec.layout = KeyLayout::Consecutive;
	Relation c = Generate(spec);
	for (size_t i = 1; i < c.rows(); i++) {
		EXPECT_LE(c.cols[0][i - 1].as_int(), c.cols[0][i].as_int());
	}
}

TEST(MiniTpch, ReferentialClosureAndRatios) {
	auto db = GenerateMiniTpch(10000, 1);
	const Relation &c = db.at("customer"), &o = db.at("orders"), &l = db.at("lineitem");
	EXPECT_EQ(l.rows(), 10000u);
	EXPECT_NEAR(double(o.rows()) / c.rows(), 10.0, 0.5);
	EXPECT_NEAR(double(l.rows()) / c.rows(), 40.0, 2.0);
	std::set<int64_t> cust, ord;
	for (size_t i = 0; i < c.rows(); i++) {
		cust.insert(c.cols[0][i].as_int());
	}
	for (size_t i = 0; i < o.rows(); i++) {
		EXPECT_TRUE(cust.count(o.cols[1][i].as_int()));
		ord.insert(o.cols[0][i].as_int());
	}
	for (size_t i = 0; i < l.rows(); i++) {
		EXPECT_TRUE(ord.count(l.cols[0][i].as_int()));
	}
	for (auto &[name, rel] : db) {
		EXPECT_NO_THROW(rel.Validate()) << name;
	}
}

TEST(MiniTpch, SameSeedSameBytes) {
	auto a = GenerateMiniTpch(3000, 4), b = GenerateMiniTpch(3000, 4), c = GenerateMiniTpch(3000, 5);
	for (auto &[name, rel] : a) {
		EXPECT_EQ(ToCsv(rel), ToCsv(b.at(name))) << name;
	}
	EXPECT_NE(ToCsv(a.at("lineitem")), ToCsv(c.at("lineitem")));
}

TEST(MiniTpch, SchemaMatchesCatalog) {
	PrivacyCatalog cat;
	cat.ParseDdl(MiniTpchDdl());
	for (auto &[name, rel] : GenerateMiniTpch(1000, 1)) {
		ASSERT_TRUE(cat.HasTable(name)) << name;
		auto &s = cat.Table(name).schema;
		ASSERT_EQ(s.size(), rel.schema.size());
		for (size_t i = 0; i < s.size(); i++) {
			EXPECT_EQ(s[i].name, rel.schema[i].name);
			EXPECT_EQ(s[i].type, rel.schema[i].type);
		}
	}
	EXPECT_EQ(cat.pu_table(), "customer");
	EXPECT_FALSE(cat.IsProtected("customer", "c_phone"));
}
