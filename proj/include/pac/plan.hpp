//
// Logical plans: the parser's output, the rewriter's input and output, and what
// the executor and the oracle run.
//

#ifndef PAC_PLAN_HPP
#define PAC_PLAN_HPP

#include "pac/expr.hpp"

#include <memory>
#include <string>
#include <vector>

namespace pac {

enum class PlanKind : uint8_t { Scan, Filter, Project, Join, Aggregate, Sort, Limit, With, CteRef, SetOp, Unsupported, Values };
enum class JoinKind : uint8_t { Inner, Left };
enum class PacMode : uint8_t { None, Fused, Unfused };

const char *PlanKindName(PlanKind k);
const char *PacModeName(PacMode m);

struct AggSpec {
	AggKind kind = AggKind::CountStar;
	ExprPtr arg;
	std::string name;
	PacMode pac = PacMode::None;
	// PU hash column when pac != None
	ExprPtr pu;
	// empty input yields NULL even for count (per-world oracle execution)
	bool null_on_empty = false;
};

struct SortKey {
	ExprPtr expr;
	bool desc = false;
};

struct PlanNode {
	PlanKind kind = PlanKind::Scan;
	int id = 0;
	std::vector<PlanPtr> children;

	// Scan / CteRef
	std::string table;
	std::string alias;

	// Filter
	ExprPtr pred;

	// Project: one name and qualifier per output column
	std::vector<ExprPtr> exprs;
	std::vector<std::string> names;
	std::vector<std::string> quals;
	// top of a query block whose output is released (noise point)
	bool release = false;
	// top of a scalar-subquery block (consumed inside another block)
	bool subquery_block = false;

	// Join
	JoinKind join = JoinKind::Inner;
	std::vector<ExprPtr> lkeys;
	std::vector<ExprPtr> rkeys;
	ExprPtr residual;

	// Aggregate
	std::vector<ExprPtr> groups;
	std::vector<std::string> group_names;
	std::vector<std::string> group_quals;
	std::vector<AggSpec> aggs;

	// Sort / Limit
	std::vector<SortKey> sort;
	int64_t limit = -1;

	// With: children[0..n-1] are CTE bodies named cte_names, the last child is the main query
	std::vector<std::string> cte_names;

	// SetOp / Unsupported
	std::string note;
};

PlanPtr MakeNode(PlanKind k);
PlanPtr MakeScan(const std::string &table, const std::string &alias);
PlanPtr MakeFilter(PlanPtr child, ExprPtr pred);
PlanPtr MakeJoin(JoinKind k, PlanPtr l, PlanPtr r);

// deep copy (expressions included)
PlanPtr ClonePlan(const PlanPtr &p);
bool SamePlan(const PlanPtr &a, const PlanPtr &b);
// assigns pre-order ids
void NumberPlan(const PlanPtr &p);

template <class F>
void VisitPlan(const PlanPtr &p, F &&f) {
	if (!p) {
		return;
	}
	f(p);
	for (auto &c : p->children) {
		VisitPlan(c, f);
	}
}

// output schema of a non-leaf node (Scan/CteRef need the catalog) given its children's schemas
Schema DeriveNodeSchema(const PlanNode &n, const std::vector<const Schema *> &children);
// result type of an aggregate over `input`
Type AggResultType(AggKind k, Type input);

// indented tree, one node per line
std::string RenderPlan(const PlanPtr &p);

} // namespace pac

#endif // PAC_PLAN_HPP
