#include "pac/datagen.hpp"

#include "pac/catalog.hpp"
#include "pac/csv.hpp"
#include "pac/errors.hpp"
#include "pac/hash.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace pac {

namespace {

struct DistName {
	Distribution d;
	const char *name;
};

const DistName kNames[] = {
    {Distribution::AllSame, "all_same"},
    {Distribution::Bimodal, "bimodal"},
    {Distribution::Exponential, "exponential"},
    {Distribution::NegativeMixed, "negative_mixed"},
    {Distribution::SparseLarge, "sparse_large"},
    {Distribution::UniformTinyint, "uniform_tinyint"},
    {Distribution::UniformSmallint, "uniform_smallint"},
    {Distribution::UniformInt, "uniform_int"},
    {Distribution::UniformBigint, "uniform_bigint"},
    {Distribution::ZipfLike, "zipf_like"},
    {Distribution::MonotonicInc, "monotonic_inc"},
    {Distribution::MonotonicDec, "monotonic_dec"},
};

std::mt19937_64 Stream(uint64_t seed, uint64_t tag) {
	return std::mt19937_64(SplitMix64(seed ^ (tag * 0x9e3779b97f4a7c15ULL)));
}

int64_t Uniform(std::mt19937_64 &rng, int64_t lo, int64_t hi) {
	return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

} // namespace

const char *DistributionName(Distribution d) {
	for (auto &n : kNames) {
		if (n.d == d) {
			return n.name;
		}
	}
	return "?";
}

std::optional<Distribution> ParseDistribution(std::string_view name) {
	for (auto &n : kNames) {
		if (name == n.name) {
			return n.d;
		}
	}
	return std::nullopt;
}

const std::vector<Distribution> &AllDistributions() {
	static const std::vector<Distribution> all = [] {
		std::vector<Distribution> v;
		for (auto &n : kNames) {
			v.push_back(n.d);
		}
		return v;
	}();
	return all;
}

// Parameters (the originals are unpublished):
//   all_same          constant 1000
//   bimodal           50/50 mix of N(1000, 50) and N(100000, 5000), clamped at 0
//   exponential       floor(Exp(mean 10000))
//   negative_mixed    pairs (+m, -(m+d)), m in [4096, 6144), d in [-64, 64], shuffled;
//                     |sum| <= 64 per pair, so |sum| / sum|v| < 0.008
//   sparse_large      99% zero, 1% uniform in [1e8, 1e9)
//   uniform_tinyint   [0, 100]
//   uniform_smallint  [0, 1e4]
//   uniform_int       [0, 1e5]
//   uniform_bigint    [0, 1e6]
//   zipf_like         1e6 / r, r ~ Zipf(s = 1.1) over 1..1e4
//   monotonic_inc     i
//   monotonic_dec     rows - i
std::vector<int64_t> GenerateValues(Distribution d, size_t rows, uint64_t seed) {
	auto rng = Stream(seed, uint64_t(d) + 1);
	std::vector<int64_t> v(rows);
	switch (d) {
	case Distribution::AllSame:
		std::fill(v.begin(), v.end(), 1000);
		break;
	case Distribution::Bimodal: {
		std::normal_distribution<double> lo(1000, 50), hi(100000, 5000);
		for (auto &x : v) {
			double y = (rng() & 1) ? hi(rng) : lo(rng);
			x = std::max<int64_t>(0, std::llround(y));
		}
		break;
	}
	case Distribution::Exponential: {
		std::exponential_distribution<double> e(1.0 / 10000);
		for (auto &x : v) {
			x = int64_t(std::floor(e(rng)));
		}
		break;
	}
	case Distribution::NegativeMixed: {
		for (size_t i = 0; i + 1 < rows; i += 2) {
			int64_t m = Uniform(rng, 4096, 6143);
			int64_t d2 = Uniform(rng, -64, 64);
			v[i] = m;
			v[i + 1] = -std::clamp<int64_t>(m + d2, 4096, 6143);
		}
		// an odd tail element stays 0
		std::shuffle(v.begin(), v.end(), rng);
		break;
	}
	case Distribution::SparseLarge:
		for (auto &x : v) {
			x = Uniform(rng, 0, 99) == 0 ? Uniform(rng, 100000000, 999999999) : 0;
		}
		break;
	case Distribution::UniformTinyint:
		for (auto &x : v) {
			x = Uniform(rng, 0, 100);
		}
		break;
	case Distribution::UniformSmallint:
		for (auto &x : v) {
			x = Uniform(rng, 0, 10000);
		}
		break;
	case Distribution::UniformInt:
		for (auto &x : v) {
			x = Uniform(rng, 0, 100000);
		}
		break;
	case Distribution::UniformBigint:
		for (auto &x : v) {
			x = Uniform(rng, 0, 1000000);
		}
		break;
	case Distribution::ZipfLike: {
		constexpr int kRanks = 10000;
		std::vector<double> cdf(kRanks);
		double acc = 0;
		for (int r = 0; r < kRanks; r++) {
			acc += 1.0 / std::pow(double(r + 1), 1.1);
			cdf[r] = acc;
		}
		std::uniform_real_distribution<double> u(0.0, acc);
		for (auto &x : v) {
			size_t r = std::lower_bound(cdf.begin(), cdf.end(), u(rng)) - cdf.begin();
			x = 1000000 / int64_t(std::min<size_t>(r, kRanks - 1) + 1);
		}
		break;
	}
	case Distribution::MonotonicInc:
		for (size_t i = 0; i < rows; i++) {
			v[i] = int64_t(i);
		}
		break;
	case Distribution::MonotonicDec:
		for (size_t i = 0; i < rows; i++) {
			v[i] = int64_t(rows - i);
		}
		break;
	}
	return v;
}

Relation Generate(const DistributionSpec &spec) {
	Relation rel(Schema({Column {"key", "", Type::Int64, false, false}, Column {"hash", "", Type::Hash, false, false},
	                     Column {"val", "", Type::Int64, false, false}}));
	auto vals = GenerateValues(spec.dist, spec.rows, spec.seed);
	auto rng = Stream(spec.seed, 0xbe11);
	size_t k = std::max<size_t>(1, spec.groups);
	for (auto &c : rel.cols) {
		c.reserve(spec.rows);
	}
	for (size_t i = 0; i < spec.rows; i++) {
		int64_t key = spec.layout == KeyLayout::Consecutive ? int64_t(i * k / spec.rows) : int64_t(rng() % k);
		rel.cols[0].push_back(Value::Int(key));
		// each row is its own privacy unit
		rel.cols[1].push_back(Value::Hash(PacHash(Value::Int(int64_t(i)), kBenchSalt)));
		rel.cols[2].push_back(Value::Int(vals[i]));
	}
	return rel;
}

// ---------------------------------------------------------------------------

std::string MiniTpchDdl() {
	return R"(CREATE TABLE nation (
    n_nationkey INTEGER NOT NULL,
    n_name VARCHAR NOT NULL,
    n_regionkey INTEGER NOT NULL);
CREATE TABLE supplier (
    s_suppkey INTEGER NOT NULL,
    s_name VARCHAR NOT NULL,
    s_nationkey INTEGER NOT NULL,
    s_acctbal DOUBLE NOT NULL);
CREATE TABLE part (
    p_partkey INTEGER NOT NULL,
    p_name VARCHAR NOT NULL,
    p_brand VARCHAR NOT NULL,
    p_type VARCHAR NOT NULL,
    p_size INTEGER NOT NULL,
    p_container VARCHAR NOT NULL,
    p_retailprice DOUBLE NOT NULL);
CREATE PU TABLE customer (
    c_custkey INTEGER NOT NULL,
    c_name VARCHAR NOT NULL,
    c_address VARCHAR NOT NULL,
    c_nationkey INTEGER NOT NULL,
    c_phone VARCHAR NOT NULL,
    c_acctbal DOUBLE NOT NULL,
    c_mktsegment VARCHAR NOT NULL,
    PAC_KEY (c_custkey),
    PROTECTED (c_custkey, c_name, c_address, c_acctbal));
CREATE TABLE orders (
    o_orderkey INTEGER NOT NULL,
    o_custkey INTEGER NOT NULL,
    o_orderstatus VARCHAR NOT NULL,
    o_totalprice DOUBLE NOT NULL,
    o_orderdate DATE NOT NULL,
    o_orderpriority VARCHAR NOT NULL,
    PAC_LINK (o_custkey) REFERENCES customer (c_custkey));
CREATE TABLE lineitem (
    l_orderkey INTEGER NOT NULL,
    l_partkey INTEGER NOT NULL,
    l_suppkey INTEGER NOT NULL,
    l_linenumber INTEGER NOT NULL,
    l_quantity INTEGER NOT NULL,
    l_extendedprice DOUBLE NOT NULL,
    l_discount DOUBLE NOT NULL,
    l_tax DOUBLE NOT NULL,
    l_returnflag VARCHAR NOT NULL,
    l_linestatus VARCHAR NOT NULL,
    l_shipdate DATE NOT NULL,
    l_commitdate DATE NOT NULL,
    l_receiptdate DATE NOT NULL,
    l_shipmode VARCHAR NOT NULL,
    PAC_LINK (l_orderkey) REFERENCES orders (o_orderkey));
)";
}

namespace {

int32_t Day(const char *iso) {
	int32_t d = 0;
	ParseDate(iso, d);
	return d;
}

double Cents(int64_t c) {
	return double(c) / 100.0;
}

std::string Fmt(const char *f, long long a) {
	char buf[64];
	std::snprintf(buf, sizeof buf, f, a);
	return buf;
}

} // namespace

std::map<std::string, Relation> GenerateMiniTpch(size_t lineitem_rows, uint64_t seed) {
	if (lineitem_rows < 100) {
		throw PacError(ErrorCode::DataError, "mini TPC-H needs at least 100 lineitem rows");
	}
	PrivacyCatalog cat;
	cat.ParseDdl(MiniTpchDdl());
	std::map<std::string, Relation> db;
	for (auto &[name, def] : cat.tables()) {
		db.emplace(name, Relation(def.schema));
	}
	auto rng = Stream(seed, 0x7c4);
	static const char *kNations[] = {"ALGERIA", "ARGENTINA", "BRAZIL",  "CANADA",         "EGYPT",
	                                 "ETHIOPIA", "FRANCE",   "GERMANY", "INDIA",          "INDONESIA",
	                                 "IRAN",     "IRAQ",     "JAPAN",   "JORDAN",         "KENYA",
	                                 "MOROCCO",  "MOZAMBIQUE", "PERU",  "CHINA",          "ROMANIA",
	                                 "SAUDI ARABIA", "VIETNAM", "RUSSIA", "UNITED KINGDOM", "UNITED STATES"};
	static const int kRegion[] = {0, 1, 1, 1, 4, 0, 3, 3, 2, 2, 4, 4, 2, 4, 0, 0, 0, 1, 2, 3, 4, 2, 3, 3, 1};
	static const char *kSegments[] = {"AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"};
	static const char *kPriorities[] = {"1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT SPECIFIED", "5-LOW"};
	static const char *kModes[] = {"AIR", "FOB", "MAIL", "RAIL", "REG AIR", "SHIP", "TRUCK"};
	static const char *kTypes[] = {"STANDARD", "SMALL", "MEDIUM", "LARGE", "ECONOMY", "PROMO"};
	static const char *kFinish[] = {"ANODIZED BRASS", "BURNISHED COPPER", "PLATED STEEL", "POLISHED TIN",
	                                "BRUSHED NICKEL"};
	static const char *kContainers[] = {"SM BOX", "SM PACK", "MED BAG", "MED BOX", "LG CASE", "LG DRUM", "WRAP JAR"};

	auto &nation = db["nation"];
	for (int i = 0; i < 25; i++) {
		nation.AppendRow({Value::Int(i), Value::Text(kNations[i]), Value::Int(kRegion[i])});
	}

	size_t ncust = std::max<size_t>(lineitem_rows / 40, 3);
	size_t norders = std::max<size_t>(lineitem_rows / 4, 1);
	size_t nparts = std::max<size_t>(lineitem_rows / 20, 20);
	size_t nsupp = std::max<size_t>(lineitem_rows / 100, 10);

	auto &supplier = db["supplier"];
	for (size_t s = 1; s <= nsupp; s++) {
		supplier.AppendRow({Value::Int(int64_t(s)), Value::Text(Fmt("Supplier#%09lld", (long long)s)),
		                    Value::Int(Uniform(rng, 0, 24)), Value::Float(Cents(Uniform(rng, -99999, 999999)))});
	}

	auto &part = db["part"];
	std::vector<double> price(nparts + 1);
	for (size_t p = 1; p <= nparts; p++) {
		price[p] = Cents(90000 + int64_t((p / 10) % 20001) + 100 * int64_t(p % 1000));
		std::string type = std::string(kTypes[Uniform(rng, 0, 5)]) + " " + kFinish[Uniform(rng, 0, 4)];
		part.AppendRow({Value::Int(int64_t(p)), Value::Text(Fmt("part %lld", (long long)p)),
		                Value::Text(Fmt("Brand#%lld", 10 * Uniform(rng, 1, 5) + Uniform(rng, 1, 5))),
		                Value::Text(type), Value::Int(Uniform(rng, 1, 50)),
		                Value::Text(kContainers[Uniform(rng, 0, 6)]), Value::Float(price[p])});
	}

	auto &customer = db["customer"];
	for (size_t c = 1; c <= ncust; c++) {
		int64_t nat = Uniform(rng, 0, 24);
		customer.AppendRow({Value::Int(int64_t(c)), Value::Text(Fmt("Customer#%09lld", (long long)c)),
		                    Value::Text(Fmt("addr-%lld", (long long)(rng() % 1000000))), Value::Int(nat),
		                    Value::Text(Fmt("%02lld-", nat + 10) + Fmt("%09lld", (long long)c)),
		                    Value::Float(Cents(Uniform(rng, -99999, 999999))),
		                    Value::Text(kSegments[Uniform(rng, 0, 4)])});
	}

	// every order gets one line, the rest are spread uniformly
	std::vector<size_t> lines(norders, 1);
	for (size_t i = norders; i < lineitem_rows; i++) {
		lines[rng() % norders]++;
	}
	const int32_t first = Day("1992-01-01");
	const int32_t last = Day("1998-08-02");
	const int32_t cutoff = Day("1995-06-17");

	auto &orders = db["orders"];
	auto &lineitem = db["lineitem"];
	for (size_t o = 1; o <= norders; o++) {
		int64_t cust = Uniform(rng, 1, int64_t(ncust));
		int32_t odate = int32_t(Uniform(rng, first, last - 151));
		double total = 0;
		size_t open = 0;
		for (size_t ln = 1; ln <= lines[o - 1]; ln++) {
			int64_t pk = Uniform(rng, 1, int64_t(nparts));
			int64_t qty = Uniform(rng, 1, 50);
			double ext = Cents(std::llround(price[pk] * 100.0) * qty);
			double disc = Cents(Uniform(rng, 0, 10));
			double tax = Cents(Uniform(rng, 0, 8));
			int32_t ship = odate + int32_t(Uniform(rng, 1, 121));
			int32_t commit = odate + int32_t(Uniform(rng, 30, 90));
			int32_t receipt = ship + int32_t(Uniform(rng, 1, 30));
			const char *flag = receipt <= cutoff ? ((rng() & 1) ? "R" : "A") : "N";
			const char *status = ship > cutoff ? "O" : "F";
			open += ship > cutoff;
			total += ext * (1 + tax) * (1 - disc);
			lineitem.AppendRow({Value::Int(int64_t(o)), Value::Int(pk), Value::Int(Uniform(rng, 1, int64_t(nsupp))),
			                    Value::Int(int64_t(ln)), Value::Int(qty), Value::Float(ext), Value::Float(disc),
			                    Value::Float(tax), Value::Text(flag), Value::Text(status), Value::Date(ship),
			                    Value::Date(commit), Value::Date(receipt), Value::Text(kModes[Uniform(rng, 0, 6)])});
		}
		const char *ostatus = open == 0 ? "F" : open == lines[o - 1] ? "O" : "P";
		orders.AppendRow({Value::Int(int64_t(o)), Value::Int(cust), Value::Text(ostatus),
		                  Value::Float(Cents(std::llround(total * 100.0))), Value::Date(odate),
		                  Value::Text(kPriorities[Uniform(rng, 0, 4)])});
	}
	return db;
}

void WriteMiniTpch(const std::string &dir, size_t lineitem_rows, uint64_t seed) {
	std::filesystem::create_directories(dir);
	for (auto &[name, rel] : GenerateMiniTpch(lineitem_rows, seed)) {
		WriteCsvFile((std::filesystem::path(dir) / (name + ".csv")).string(), rel);
	}
	std::ofstream ddl(std::filesystem::path(dir) / "schema.pac.sql");
	if (!ddl) {
		throw PacError(ErrorCode::IoError, "cannot write schema into " + dir);
	}
	ddl << MiniTpchDdl();
}

} // namespace pac
