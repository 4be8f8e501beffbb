#include "test_util.hpp"

#include "corpus.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

using namespace pac;

namespace {

const PrivacyCatalog &Cat() {
	return pactest::MiniDb().cat;
}

std::string Sql(const std::string &name) {
	for (auto &q : pactest::Corpus()) {
		if (q.name == name) {
			return q.sql;
		}
	}
	throw std::runtime_error("no corpus query " + name);
}

Analysis Analyze(const std::string &sql) {
	return pac::Analyze(PrepareQuery(sql, Cat()), Cat());
}

std::vector<const PlanNode *> Find(const PlanPtr &p, PlanKind k) {
	std::vector<const PlanNode *> out;
	VisitPlan(p, [&](const PlanPtr &n) {
		if (n->kind == k) {
			out.push_back(n.get());
		}
	});
	return out;
}

Classification::Kind KindOf(const std::string &sql) {
	return Analyze(sql).cls.kind;
}

RejectReason ReasonOf(const std::string &sql) {
	auto a = Analyze(sql);
	EXPECT_EQ(a.cls.kind, Classification::Kind::Rejected) << sql;
	return a.cls.reason;
}

} // namespace

TEST(Parser, Q01Aggregate) {
	PlanPtr p = ParseQuery(Sql("q01"));
	auto aggs = Find(p, PlanKind::Aggregate);
	ASSERT_EQ(aggs.size(), 1u);
	ASSERT_EQ(aggs[0]->groups.size(), 2u);
	EXPECT_EQ(ToSql(aggs[0]->groups[0]), "l_returnflag");
	EXPECT_EQ(ToSql(aggs[0]->groups[1]), "l_linestatus");
	std::vector<AggKind> kinds;
	for (auto &a : aggs[0]->aggs) {
		kinds.push_back(a.kind);
	}
	std::vector<AggKind> want = {AggKind::Sum, AggKind::Sum, AggKind::Sum, AggKind::Sum, AggKind::Avg,
	                             AggKind::Avg, AggKind::Avg, AggKind::CountStar};
	EXPECT_EQ(kinds, want);
}

TEST(Parser, Q17CorrelatedSubquery) {
	PlanPtr p = ParseQuery(Sql("q17"));
	int subqueries = 0;
	VisitPlan(p, [&](const PlanPtr &n) {
		if (n->kind == PlanKind::Filter) {
			VisitExpr(n->pred, [&](const ExprPtr &e) {
				if (e->kind == ExprKind::Subquery && e->func.empty()) {
					subqueries++;
					// correlated: the inner WHERE names an outer column
					bool outer = false;
					VisitPlan(e->subquery, [&](const PlanPtr &m) {
						if (m->kind == PlanKind::Filter && ToSql(m->pred).find("p_partkey") != std::string::npos) {
							outer = true;
						}
					});
					EXPECT_TRUE(outer);
				}
			});
		}
	});
	EXPECT_EQ(subqueries, 1);
}

TEST(Parser, Errors) {
	try {
		ParseQuery("SELECT FROM");
		FAIL();
	} catch (const PacError &e) {
		EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
		EXPECT_EQ(e.position(), 7);
	}
	EXPECT_TRUE(pactest::Thrown(ErrorCode::SyntaxError, [] { ParseQuery("SELECT a FROM t WHERE"); }));
	EXPECT_TRUE(pactest::Thrown(ErrorCode::SyntaxError, [] { ParseQuery("SELECT 'open FROM t"); }));
	// window functions parse, then classification rejects them
	EXPECT_EQ(ParseQuery("SELECT a, row_number() OVER (ORDER BY a) FROM t")->kind, PlanKind::Unsupported);
}

TEST(Parser, UnknownNamesOnNormalize) {
	EXPECT_TRUE(pactest::Thrown(ErrorCode::UnknownTable, [] { PrepareQuery("SELECT x FROM nowhere", Cat()); }));
	EXPECT_TRUE(pactest::Thrown(ErrorCode::UnknownColumn, [] { PrepareQuery("SELECT zz FROM nation", Cat()); }));
}

TEST(Classify, Examples) {
	EXPECT_EQ(KindOf("SELECT n_name FROM nation"), Classification::Kind::Inconspicuous);
	EXPECT_EQ(ReasonOf("SELECT c_name FROM customer"), RejectReason::ProtectedColumnRelease);
	EXPECT_EQ(KindOf(Sql("q01")), Classification::Kind::Rewritable);
	for (auto &q : pactest::Corpus()) {
		EXPECT_EQ(KindOf(q.sql), Classification::Kind::Rewritable) << q.name;
	}
	for (auto &q : pactest::PassthroughCorpus()) {
		EXPECT_EQ(KindOf(q.sql), Classification::Kind::Inconspicuous) << q.name;
	}
}

TEST(Classify, Rejections) {
	// Q10 shape releases c_name and c_acctbal
	EXPECT_EQ(ReasonOf("SELECT c_custkey, c_name, sum(l_extendedprice * (1 - l_discount)) AS revenue, c_acctbal "
	                   "FROM customer, orders, lineitem WHERE c_custkey = o_custkey AND l_orderkey = o_orderkey "
	                   "GROUP BY c_custkey, c_name, c_acctbal ORDER BY revenue DESC LIMIT 20"),
	          RejectReason::ProtectedColumnRelease);
	// Q18 shape
	EXPECT_EQ(ReasonOf("SELECT c_name, c_custkey, o_orderkey, sum(l_quantity) AS q FROM customer, orders, lineitem "
	                   "WHERE c_custkey = o_custkey AND o_orderkey = l_orderkey "
	                   "GROUP BY c_name, c_custkey, o_orderkey"),
	          RejectReason::ProtectedColumnRelease);
	EXPECT_EQ(ReasonOf("SELECT count(*) FROM orders o, lineitem l WHERE o.o_custkey = l.l_partkey"),
	          RejectReason::NonLinkJoin);
	EXPECT_EQ(ReasonOf("SELECT c_custkey, count(*) AS n FROM customer, orders WHERE c_custkey = o_custkey "
	                   "GROUP BY c_custkey"),
	          RejectReason::ProtectedColumnRelease);
	EXPECT_EQ(ReasonOf("SELECT l_shipmode FROM lineitem UNION SELECT o_orderstatus FROM orders"),
	          RejectReason::UnsupportedOperator);
	EXPECT_EQ(ReasonOf("SELECT l_orderkey, row_number() OVER (ORDER BY l_orderkey) AS r FROM lineitem"),
	          RejectReason::UnsupportedOperator);
	EXPECT_EQ(ReasonOf("SELECT o_orderstatus, o_totalprice FROM orders"), RejectReason::ProtectedColumnRelease);
	EXPECT_EQ(ReasonOf("SELECT count(*) AS n FROM orders GROUP BY o_custkey"), RejectReason::ProtectedGroupKey);
	EXPECT_EQ(ReasonOf("SELECT count(*) FROM customer GROUP BY c_custkey"), RejectReason::ProtectedGroupKey);
}

TEST(Rewrite, Q01JoinsOrdersNotCustomer) {
	auto a = Analyze(Sql("q01"));
	ASSERT_EQ(a.cls.kind, Classification::Kind::Rewritable);
	bool orders_join = false, customer_scan = false;
	VisitPlan(a.plan, [&](const PlanPtr &n) {
		if (n->kind == PlanKind::Scan && n->table == "customer") {
			customer_scan = true;
		}
		if (n->kind == PlanKind::Join && n->lkeys.size() == 1 && ToSql(n->lkeys[0]).find("l_orderkey") != std::string::npos &&
		    ToSql(n->rkeys[0]).find("o_orderkey") != std::string::npos) {
			orders_join = true;
		}
	});
	EXPECT_TRUE(orders_join);
	EXPECT_FALSE(customer_scan);
	for (auto *agg : Find(a.plan, PlanKind::Aggregate)) {
		for (auto &s : agg->aggs) {
			EXPECT_EQ(s.pac, PacMode::Fused);
		}
	}
	ValidateRewritten(a.plan, Cat());
}

TEST(Rewrite, Q17SelectAndLift) {
	auto a = Analyze(Sql("q17"));
	ASSERT_EQ(a.cls.kind, Classification::Kind::Rewritable);
	EXPECT_EQ(a.trace.count(RuleKind::SelectInserted), 1u);
	std::string ex = Explain(a.plan, a.trace);
	EXPECT_NE(ex.find("SelectInserted"), std::string::npos);
	EXPECT_NE(ex.find("Filter(pu != 0)"), std::string::npos);
	// the 0.2 factor is folded into the comparison as 5 * l_quantity
	EXPECT_NE(ex.find("pac_select(pu, ((5 * l_quantity) < "), std::string::npos);
	EXPECT_NE(ex.find("unfused avg"), std::string::npos);
}

TEST(Rewrite, HavingOnAggregateIsProbabilistic) {
	auto a = Analyze(Sql("having_sum"));
	EXPECT_EQ(a.trace.count(RuleKind::FilterProbabilistic), 1u);
}

TEST(Rewrite, RatioIsLifted) {
	auto a = Analyze(Sql("q08_ratio"));
	EXPECT_EQ(a.trace.count(RuleKind::VectorLifted), 1u);
	for (auto *agg : Find(a.plan, PlanKind::Aggregate)) {
		for (auto &s : agg->aggs) {
			EXPECT_EQ(s.pac, PacMode::Unfused);
		}
	}
}

TEST(Rewrite, PassthroughUnchanged) {
	for (auto &q : pactest::PassthroughCorpus()) {
		PlanPtr p = PrepareQuery(q.sql, Cat());
		auto a = pac::Analyze(p, Cat());
		EXPECT_TRUE(a.trace.empty()) << q.name;
		EXPECT_TRUE(SamePlan(a.plan, p)) << q.name;
	}
}

TEST(Explain, Snapshots) {
	auto un = Analyze("SELECT n_name FROM nation");
	EXPECT_NE(Explain(un.plan, un.trace).find("0 rewrites"), std::string::npos);
	auto q1 = Analyze(Sql("q01"));
	std::string ex = Explain(q1.plan, q1.trace);
	EXPECT_NE(ex.find("+ JoinAdded(lineitem→orders)"), std::string::npos);
	EXPECT_NE(ex.find("AggReplaced(fused sum)"), std::string::npos);
	EXPECT_NE(ex.find("JoinEliminated(orders→customer)"), std::string::npos);
	auto j = nlohmann::json::parse(PlanToJson(q1.plan, q1.trace));
	EXPECT_TRUE(j.contains("plan"));
	EXPECT_TRUE(j.contains("trace"));
	EXPECT_EQ(j["trace"].size(), q1.trace.entries.size());
}

TEST(Rewrite, Deterministic) {
	for (auto &q : pactest::Corpus()) {
		auto a = Analyze(q.sql), b = Analyze(q.sql);
		EXPECT_EQ(Explain(a.plan, a.trace), Explain(b.plan, b.trace)) << q.name;
	}
}
