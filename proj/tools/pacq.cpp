// pacq: command-line front end

#include "pac/bench.hpp"
#include "pac/catalog.hpp"
#include "pac/csv.hpp"
#include "pac/datagen.hpp"
#include "pac/engine.hpp"
#include "pac/errors.hpp"
#include "pac/rewrite.hpp"
#include "pac/worlds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pac;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUser = 1, kRejected = 2, kInternal = 3 };

struct Globals {
	uint64_t seed = 1;
	double mi = kDefaultBudget;
	bool no_noise = false;
	std::string tier = "swar";
	bool approx = false;
	bool buffered = true;
	bool json = false;
	int threads = 1;
	std::string out;
};

struct QueryArgs {
	std::string schema;
	std::string data;
	std::string query_file;
	std::string sql;
};

std::string Slurp(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw PacError(ErrorCode::IoError, "cannot read " + path);
	}
	std::ostringstream s;
	s << in.rdbuf();
	return s.str();
}

std::string QueryText(const QueryArgs &q) {
	if (!q.sql.empty()) {
		return q.sql;
	}
	if (q.query_file.empty()) {
		throw PacError(ErrorCode::SyntaxError, "no query given (--query FILE or --sql TEXT)");
	}
	return Slurp(q.query_file);
}

PrivacyCatalog LoadCatalog(const std::string &path) {
	PrivacyCatalog cat;
	cat.ParseDdl(Slurp(path));
	return cat;
}

ExecConfig Config(const Globals &g) {
	ExecConfig c;
	c.seed = g.seed;
	c.budget = g.mi;
	c.noise = !g.no_noise;
	c.agg.approx = g.approx;
	c.agg.buffered = g.buffered;
	c.threads = g.threads;
	if (g.tier == "naive") {
		c.agg.tier = AggTier::Naive;
	} else if (g.tier == "predicated") {
		c.agg.tier = AggTier::Predicated;
	} else if (g.tier == "swar") {
		c.agg.tier = AggTier::Swar;
	} else {
		throw PacError(ErrorCode::SyntaxError, "unknown --agg-tier " + g.tier + " (naive, predicated, swar)");
	}
	return c;
}

void Emit(const Globals &g, const std::string &text) {
	if (g.out.empty()) {
		std::cout << text;
		return;
	}
	std::ofstream f(g.out, std::ios::binary);
	if (!f) {
		throw PacError(ErrorCode::IoError, "cannot write " + g.out);
	}
	f << text;
}

json CellJson(const Value &v) {
	switch (v.type()) {
	case Type::Null:
		return nullptr;
	case Type::Int64:
		return v.as_int();
	case Type::Float64:
		return v.as_float();
	case Type::Bool:
		return v.as_bool();
	default:
		return v.ToString();
	}
}

json RelationJson(const Relation &rel) {
	json cols = json::array();
	for (auto &c : rel.schema.columns()) {
		cols.push_back({{"name", c.name}, {"type", TypeName(c.type)}});
	}
	json rows = json::array();
	for (size_t r = 0; r < rel.rows(); r++) {
		json row = json::array();
		for (auto &c : rel.cols) {
			row.push_back(CellJson(c[r]));
		}
		rows.push_back(row);
	}
	return {{"columns", cols}, {"rows", rows}};
}

int Rejected(const Globals &g, const Classification &cls) {
	if (g.json) {
		std::cout << json {{"classification", "Rejected"}, {"reason", RejectReasonName(cls.reason)},
		                   {"message", cls.message}}
		                 .dump(2)
		          << "\n";
	}
	std::cerr << "rejected: " << RejectReasonName(cls.reason) << ": " << cls.message << "\n";
	return kRejected;
}

const char *ClassName(const Classification &c) {
	switch (c.kind) {
	case Classification::Kind::Inconspicuous:
		return "Inconspicuous";
	case Classification::Kind::Rejected:
		return "Rejected";
	case Classification::Kind::Rewritable:
		return "Rewritable";
	}
	return "?";
}

int CmdRun(const Globals &g, const QueryArgs &q) {
	auto cat = LoadCatalog(q.schema);
	auto db = Database::Load(cat, q.data);
	auto outcome = RunQuery(QueryText(q), cat, db, Config(g));
	if (outcome.rejected()) {
		return Rejected(g, outcome.analysis.cls);
	}
	if (g.json) {
		json j = RelationJson(outcome.result);
		j["classification"] = ClassName(outcome.analysis.cls);
		j["cells_released"] = outcome.cells_released;
		Emit(g, j.dump(2) + "\n");
	} else {
		Emit(g, ToCsv(outcome.result));
	}
	return kOk;
}

int CmdOracle(const Globals &g, const QueryArgs &q) {
	auto cat = LoadCatalog(q.schema);
	auto db = Database::Load(cat, q.data);
	auto rel = RunOracle(QueryText(q), cat, db, Config(g));
	Emit(g, g.json ? RelationJson(rel).dump(2) + "\n" : ToCsv(rel));
	return kOk;
}

int CmdExplain(const Globals &g, const QueryArgs &q, const std::string &dump) {
	auto cat = LoadCatalog(q.schema);
	auto an = Analyze(PrepareQuery(QueryText(q), cat), cat);
	if (an.cls.kind == Classification::Kind::Rejected) {
		return Rejected(g, an.cls);
	}
	if (dump == "json" || g.json) {
		json j = json::parse(PlanToJson(an.plan, an.trace));
		j["classification"] = ClassName(an.cls);
		Emit(g, j.dump(2) + "\n");
	} else if (dump.empty() || dump == "text") {
		Emit(g, "-- " + std::string(ClassName(an.cls)) + "\n" + Explain(an.plan, an.trace));
	} else {
		throw PacError(ErrorCode::SyntaxError, "unknown --dump-plan format " + dump);
	}
	return kOk;
}

int CmdDiff(const Globals &g, const QueryArgs &q, size_t key_cols) {
	auto cat = LoadCatalog(q.schema);
	auto db = Database::Load(cat, q.data);
	std::string sql = QueryText(q);
	auto an = Analyze(PrepareQuery(sql, cat), cat);
	if (an.cls.kind == Classification::Kind::Rejected) {
		return Rejected(g, an.cls);
	}
	auto rep = PacDiff(sql, cat, db, Config(g), key_cols);
	Emit(g, g.json ? rep.ToJson() + "\n" : rep.ToText());
	return kOk;
}

void PrintError(const PacError &e, const std::string &source) {
	std::cerr << "error[" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
	if (e.position() < 0 || source.empty() || size_t(e.position()) > source.size()) {
		return;
	}
	size_t pos = size_t(e.position());
	size_t begin = source.rfind('\n', pos == 0 ? 0 : pos - 1);
	begin = begin == std::string::npos ? 0 : begin + 1;
	if (pos < begin) {
		begin = pos;
	}
	size_t end = source.find('\n', pos);
	end = end == std::string::npos ? source.size() : end;
	size_t line = size_t(std::count(source.begin(), source.begin() + long(begin), '\n')) + 1;
	std::cerr << "  --> line " << line << ", column " << (pos - begin + 1) << "\n";
	std::cerr << "   | " << source.substr(begin, end - begin) << "\n";
	std::cerr << "   | " << std::string(pos - begin, ' ') << "^\n";
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app {"pacq: SQL over CSV tables with PAC privacy"};
	app.require_subcommand(1);
	app.fallthrough();
	Globals g;
	app.add_option("--seed", g.seed, "randomness seed (salt, secret world, noise)");
	app.add_option("--mi", g.mi, "mutual-information budget per released cell, in nats");
	app.add_flag("--no-noise", g.no_noise, "release the secret world's value without noise");
	app.add_option("--agg-tier", g.tier, "aggregate kernels: naive, predicated or swar");
	app.add_flag("--approx", g.approx, "approximate integer sums");
	app.add_flag("--buffered,!--no-buffered", g.buffered, "buffer the first updates of each aggregate");
	app.add_flag("--json", g.json, "machine-readable output");
	app.add_option("--threads", g.threads, "aggregation partitions")->check(CLI::PositiveNumber);
	app.add_option("--out", g.out, "write output here instead of stdout");

	QueryArgs q;
	auto add_query = [&](CLI::App *s, bool data) {
		s->add_option("--schema", q.schema, "DDL file with PU / PAC_LINK declarations")->required();
		if (data) {
			s->add_option("--data", q.data, "directory of <table>.csv files")->required();
		}
		s->add_option("--query", q.query_file, "SQL file");
		s->add_option("--sql", q.sql, "SQL text");
	};
	auto *run = app.add_subcommand("run", "classify, rewrite and execute a query");
	add_query(run, true);
	auto *oracle = app.add_subcommand("oracle", "run the 64-world reference on the original plan");
	add_query(oracle, true);
	auto *explain = app.add_subcommand("explain", "show the rewritten plan and the rule trace");
	add_query(explain, false);
	std::string dump;
	explain->add_option("--dump-plan", dump, "text or json");
	auto *diff = app.add_subcommand("diff", "compare private and exact results (PacDiff)");
	add_query(diff, true);
	size_t key_cols = 1;
	diff->add_option("--key-cols", key_cols, "leading columns that identify a row");

	auto *bench = app.add_subcommand("bench", "time the aggregate kernel tiers (CSV)");
	BenchConfig bc;
	std::vector<std::string> bench_dists;
	bench->add_option("--updates", bc.updates, "updates per measurement");
	bench->add_option("--groups", bc.groups, "group counts");
	bench->add_option("--dist", bench_dists, "distributions");
	bench->add_option("--kernel", bc.kernels, "count, sum, min, max");

	auto *gen = app.add_subcommand("gen", "generate benchmark or mini TPC-H data");
	std::string dist_name = "uniform_int", layout = "scattered";
	size_t rows = 1000, groups = 1;
	bool mini = false;
	gen->add_option("--dist", dist_name, "distribution name");
	gen->add_option("--rows", rows, "rows (lineitem rows with --mini-tpch)");
	gen->add_option("--groups", groups, "group-key count");
	gen->add_option("--layout", layout, "scattered or consecutive");
	gen->add_flag("--mini-tpch", mini, "customer/orders/lineitem/part/supplier/nation into --out DIR");

	auto *mia = app.add_subcommand("mia-bound", "membership-inference success bound");
	double prior = 0.5, total = 0;
	mia->add_option("--prior", prior, "prior success probability");
	mia->add_option("--total-mi", total, "total mutual information in nats")->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		return app.exit(e) == 0 ? kOk : kUser;
	}

	std::string source;
	try {
		if (!q.sql.empty()) {
			source = q.sql;
		} else if (!q.query_file.empty() && std::filesystem::exists(q.query_file)) {
			source = Slurp(q.query_file);
		}
		if (*run) {
			return CmdRun(g, q);
		}
		if (*oracle) {
			return CmdOracle(g, q);
		}
		if (*explain) {
			return CmdExplain(g, q, dump);
		}
		if (*diff) {
			return CmdDiff(g, q, key_cols);
		}
		if (*bench) {
			bc.seed = g.seed;
			if (!bench_dists.empty()) {
				bc.dists.clear();
				for (auto &d : bench_dists) {
					auto p = ParseDistribution(d);
					if (!p) {
						throw PacError(ErrorCode::SyntaxError, "unknown distribution " + d);
					}
					bc.dists.push_back(*p);
				}
			}
			Emit(g, BenchCsv(RunBench(bc)));
			return kOk;
		}
		if (*gen) {
			if (mini) {
				if (g.out.empty()) {
					throw PacError(ErrorCode::SyntaxError, "--mini-tpch needs --out DIR");
				}
				WriteMiniTpch(g.out, rows, g.seed);
				return kOk;
			}
			auto d = ParseDistribution(dist_name);
			if (!d) {
				throw PacError(ErrorCode::SyntaxError, "unknown distribution " + dist_name);
			}
			if (layout != "scattered" && layout != "consecutive") {
				throw PacError(ErrorCode::SyntaxError, "unknown --layout " + layout);
			}
			DistributionSpec spec {*d, rows, g.seed, groups,
			                       layout == "consecutive" ? KeyLayout::Consecutive : KeyLayout::Scattered};
			if (rows < 1) {
				throw PacError(ErrorCode::DataError, "--rows must be at least 1");
			}
			Emit(g, ToCsv(Generate(spec)));
			return kOk;
		}
		if (*mia) {
			double b = MiaBound(prior, total);
			if (g.json) {
				Emit(g, json {{"prior", prior}, {"total_mi", total}, {"bound", b}}.dump(2) + "\n");
			} else {
				Emit(g, FormatDouble(b) + "\n");
			}
			return kOk;
		}
	} catch (const PacError &e) {
		PrintError(e, source);
		return e.code() == ErrorCode::Internal ? kInternal : kUser;
	} catch (const std::exception &e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return kInternal;
	}
	return kUser;
}
