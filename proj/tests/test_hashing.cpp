#include "test_util.hpp"

#include "pac/hash.hpp"

#include <bit>
#include <gtest/gtest.h>
#include <random>

using namespace pac;

TEST(Hash, Deterministic) {
	EXPECT_EQ(BaseHash(Value::Int(42)), BaseHash(Value::Int(42)));
	EXPECT_EQ(PacHash(Value::Int(42), 7), PacHash(Value::Int(42), 7));
	EXPECT_EQ(BaseHash(Value::Text("abc")), BaseHash(Value::Text(std::string("ab") + "c")));
	EXPECT_NE(BaseHash(Value::Int(1)), BaseHash(Value::Int(2)));
}

TEST(Hash, CompositeIsXor) {
	Value a = Value::Int(17), b = Value::Text("x");
	EXPECT_EQ(BaseHash(std::vector<Value> {a, b}), BaseHash(a) ^ BaseHash(b));
}

TEST(Hash, NullKeyRejected) {
	EXPECT_TRUE(pactest::Thrown(ErrorCode::NullKey, [] { BaseHash(Value::Null()); }));
	EXPECT_TRUE(pactest::Thrown(ErrorCode::NullKey, [] { BaseHash(std::vector<Value> {Value::Int(1), Value::Null()}); }));
}

TEST(Hash, BaseBitFrequencies) {
	std::array<int, 64> ones {};
	const int n = 1000000;
	std::mt19937_64 rng(3);
	for (int i = 0; i < n; i++) {
		uint64_t h = BaseHash(Value::Int(int64_t(rng())));
		for (int j = 0; j < 64; j++) {
			ones[j] += (h >> j) & 1;
		}
	}
	for (int j = 0; j < 64; j++) {
		EXPECT_NEAR(ones[j] / double(n), 0.5, 0.005) << "bit " << j;
	}
}

TEST(Balance, FixedPointAndZero) {
	uint64_t h = 0x00000000FFFFFFFFULL;
	EXPECT_EQ(Balance64(h), h);
	uint64_t alt = 0xAAAAAAAAAAAAAAAAULL;
	EXPECT_EQ(Balance64(alt), alt);
	EXPECT_EQ(std::popcount(Balance64(0)), 32);
	EXPECT_EQ(std::popcount(Balance64(~0ULL)), 32);
}

TEST(Balance, Statistics) {
	const int n = 1000000;
	std::mt19937_64 rng(11);
	std::array<double, 64> ones {};
	// pairwise correlation on a few neighbouring and distant bit pairs
	const std::vector<std::pair<int, int>> pairs = {{0, 1}, {5, 6}, {31, 32}, {0, 63}, {10, 40}, {62, 63}};
	std::vector<double> both(pairs.size());
	for (int i = 0; i < n; i++) {
		uint64_t h = Balance64(rng());
		ASSERT_EQ(std::popcount(h), 32);
		for (int j = 0; j < 64; j++) {
			ones[j] += (h >> j) & 1;
		}
		for (size_t p = 0; p < pairs.size(); p++) {
			both[p] += ((h >> pairs[p].first) & (h >> pairs[p].second) & 1);
		}
	}
	for (int j = 0; j < 64; j++) {
		EXPECT_NEAR(ones[j] / n, 0.5, 0.01);
	}
	for (size_t p = 0; p < pairs.size(); p++) {
		double pa = ones[pairs[p].first] / n, pb = ones[pairs[p].second] / n, pab = both[p] / n;
		double rho = (pab - pa * pb) / std::sqrt(pa * (1 - pa) * pb * (1 - pb));
		// exactly-32 balancing alone gives -1/63
		EXPECT_LT(std::abs(rho), 0.02) << pairs[p].first << "," << pairs[p].second;
	}
}

TEST(PacHash, AlwaysBalanced) {
	for (uint64_t salt : {0ULL, 1ULL, 0xdeadbeefULL}) {
		for (int64_t k = -500; k < 500; k++) {
			EXPECT_EQ(std::popcount(PacHash(Value::Int(k), salt)), 32);
		}
	}
}

TEST(PacHash, SaltsDecorrelate) {
	const int n = 100000;
	std::array<int, 64> same {};
	for (int i = 0; i < n; i++) {
		uint64_t a = PacHash(Value::Int(i), 1), b = PacHash(Value::Int(i), 2);
		uint64_t eq = ~(a ^ b);
		for (int j = 0; j < 64; j++) {
			same[j] += (eq >> j) & 1;
		}
	}
	for (int j = 0; j < 64; j++) {
		EXPECT_NEAR(same[j] / double(n), 0.5, 0.01);
	}
}

TEST(PacHash, WorldFractionsOnPuTable) {
	const int n = 10000;
	std::array<int, 64> in {};
	for (int i = 1; i <= n; i++) {
		uint64_t h = PacHash(Value::Int(i), 0x1234);
		for (int j = 0; j < 64; j++) {
			in[j] += (h >> j) & 1;
		}
	}
	for (int j = 0; j < 64; j++) {
		EXPECT_GE(in[j], 4800);
		EXPECT_LE(in[j], 5200);
	}
}
