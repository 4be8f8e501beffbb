//
// Query normalization, privacy classification and the PAC rewrite.
//

#ifndef PAC_REWRITE_HPP
#define PAC_REWRITE_HPP

#include "pac/catalog.hpp"
#include "pac/plan.hpp"

#include <set>
#include <string>
#include <vector>

namespace pac {

// expands stars, type-checks, decorrelates WHERE scalar subqueries, folds a constant factor
// out of subquery comparisons and moves equi-conjuncts into join keys
PlanPtr Normalize(const PlanPtr &parsed, const PrivacyCatalog &catalog);

// parse + normalize
PlanPtr PrepareQuery(std::string_view sql, const PrivacyCatalog &catalog);

enum class RuleKind : uint8_t {
	JoinAdded,
	JoinEliminated,
	HashProjected,
	AggReplaced,
	VectorLifted,
	SelectInserted,
	FilterProbabilistic,
	CtePropagated
};
const char *RuleKindName(RuleKind r);

struct TraceEntry {
	RuleKind rule;
	// id in the rewritten plan
	int node = -1;
	std::string detail;
	std::string ToString() const;
};

struct RewriteTrace {
	std::vector<TraceEntry> entries;
	bool empty() const {
		return entries.empty();
	}
	size_t count(RuleKind r) const;
};

struct Analysis {
	Classification cls;
	// the input plan when nothing was rewritten
	PlanPtr plan;
	RewriteTrace trace;
	// nodes of the analyzed (normalized) plan, for the oracle
	std::set<const PlanNode *> pac_aggs;
	std::set<const PlanNode *> pac_releases;
	std::set<std::string> pu_ctes;
};

// classification and rewrite in one pass; never throws for rejections
Analysis Analyze(const PlanPtr &normalized, const PrivacyCatalog &catalog);

inline Classification Classify(const PlanPtr &normalized, const PrivacyCatalog &catalog) {
	return Analyze(normalized, catalog).cls;
}

// single-owner and fused-use checks on a rewritten plan; throws Internal
void ValidateRewritten(const PlanPtr &plan, const PrivacyCatalog &catalog);

std::string Explain(const PlanPtr &plan, const RewriteTrace &trace);
std::string PlanToJson(const PlanPtr &plan, const RewriteTrace &trace);

} // namespace pac

#endif // PAC_REWRITE_HPP
