//
// Plan execution, the 64-world reference oracle, and PacDiff utility reports.
//

#ifndef PAC_ENGINE_HPP
#define PAC_ENGINE_HPP

#include "pac/aggregates.hpp"
#include "pac/catalog.hpp"
#include "pac/plan.hpp"
#include "pac/rewrite.hpp"
#include "pac/worlds.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pac {

struct ExecConfig {
	uint64_t seed = 1;
	double budget = kDefaultBudget;
	bool noise = true;
	AggOptions agg;
	// partitions for PAC aggregation; results combine with agg Combine
	int threads = 1;
};

class Database {
public:
	void Put(const std::string &table, Relation rel);
	bool Has(const std::string &table) const {
		return tables_.count(table) != 0;
	}
	const Relation &Get(const std::string &table) const;
	const std::map<std::string, Relation> &tables() const {
		return tables_;
	}
	// <dir>/<table>.csv for every catalog table, typed by the catalog schema
	static Database Load(const PrivacyCatalog &catalog, const std::string &dir);

private:
	std::map<std::string, Relation> tables_;
};

// runs a prepared (normalized or rewritten) plan with a fresh NoiseSession
Relation Execute(const PlanPtr &plan, const Database &db, const ExecConfig &cfg);

struct QueryOutcome {
	Analysis analysis;
	// empty when rejected
	Relation result;
	uint64_t cells_released = 0;
	bool rejected() const {
		return analysis.cls.kind == Classification::Kind::Rejected;
	}
};

// parse, normalize, classify, rewrite, execute; rejections are reported, not thrown
QueryOutcome RunQuery(std::string_view sql, const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg);

// unprivatized result of the normalized query
Relation RunExact(std::string_view sql, const PrivacyCatalog &catalog, const Database &db);

// m-fold reference: runs the original plan on the 64 world-restricted databases and
// noises the per-cell lists with the same session; OracleRefused unless Rewritable
Relation ExecuteOracle(const PlanPtr &normalized, const Analysis &analysis, const PrivacyCatalog &catalog,
                       const Database &db, const ExecConfig &cfg);
Relation RunOracle(std::string_view sql, const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg);

// per-row membership of each linked table in the 64 worlds (0 for rows without a PU)
std::map<std::string, std::vector<uint64_t>> WorldMembership(const PrivacyCatalog &catalog, const Database &db,
                                                             uint64_t salt);

enum class DiffClass : char { Match = '=', Missing = '-', Spurious = '+' };

struct DiffRow {
	DiffClass cls;
	std::vector<Value> key;
};

struct DiffReport {
	std::vector<DiffRow> rows;
	size_t matched = 0, missing = 0, spurious = 0;
	// cells where exact is numeric and non-zero
	size_t mape_cells = 0;
	double mape = 0.0;
	double precision = 1.0;
	double recall = 1.0;

	std::string ToText() const;
	std::string ToJson() const;
};

// full outer match on the first key_cols columns
DiffReport CompareResults(const Relation &exact, const Relation &priv, size_t key_cols);
DiffReport PacDiff(std::string_view sql, const PrivacyCatalog &catalog, const Database &db, const ExecConfig &cfg,
                   size_t key_cols);

} // namespace pac

#endif // PAC_ENGINE_HPP
