//
// Deterministic data generators: microbenchmark value streams and a small
// customer/orders/lineitem schema for end-to-end tests.
//

#ifndef PAC_DATAGEN_HPP
#define PAC_DATAGEN_HPP

#include "pac/value.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pac {

enum class Distribution : uint8_t {
	AllSame,
	Bimodal,
	Exponential,
	NegativeMixed,
	SparseLarge,
	UniformTinyint,
	UniformSmallint,
	UniformInt,
	UniformBigint,
	ZipfLike,
	MonotonicInc,
	MonotonicDec,
};

const char *DistributionName(Distribution d);
std::optional<Distribution> ParseDistribution(std::string_view name);
const std::vector<Distribution> &AllDistributions();

enum class KeyLayout : uint8_t { Scattered, Consecutive };

struct DistributionSpec {
	Distribution dist = Distribution::UniformInt;
	size_t rows = 1000;
	uint64_t seed = 1;
	// group-key count
	size_t groups = 1;
	KeyLayout layout = KeyLayout::Scattered;
};

// salt used for the hash column of generated bench tables
constexpr uint64_t kBenchSalt = 0x5eed0fbe4c4ULL;

std::vector<int64_t> GenerateValues(Distribution d, size_t rows, uint64_t seed);
// columns key Int64, hash Hash (row id hashed with kBenchSalt), val Int64
Relation Generate(const DistributionSpec &spec);

// schema text with PU, PROTECTED and PAC_LINK clauses for the tables below
std::string MiniTpchDdl();
// customer : orders : lineitem = 1 : 10 : 40, plus part, supplier and nation
std::map<std::string, Relation> GenerateMiniTpch(size_t lineitem_rows, uint64_t seed = 1);
// <dir>/<table>.csv and <dir>/schema.pac.sql
void WriteMiniTpch(const std::string &dir, size_t lineitem_rows, uint64_t seed = 1);

} // namespace pac

#endif // PAC_DATAGEN_HPP
