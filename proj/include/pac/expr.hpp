//
// Scalar expression trees, binding against a schema, and evaluation.
//

#ifndef PAC_EXPR_HPP
#define PAC_EXPR_HPP

#include "pac/value.hpp"

#include <memory>
#include <string>
#include <vector>

namespace pac {

struct PlanNode;
using PlanPtr = std::shared_ptr<PlanNode>;

enum class ExprKind : uint8_t { Column, Literal, Unary, Binary, Case, Cast, IsNull, Agg, Subquery, Func };
enum class BinOp : uint8_t { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp : uint8_t { Neg, Not };
enum class AggKind : uint8_t { Count, CountStar, Sum, Avg, Min, Max };

const char *BinOpSymbol(BinOp op);
const char *AggKindName(AggKind k);
bool IsComparison(BinOp op);
// a < b  <=>  b > a
BinOp FlipComparison(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
	ExprKind kind = ExprKind::Literal;
	// Column
	std::string qual;
	std::string name;
	int index = -1;
	// Literal
	Value lit;
	BinOp bop = BinOp::Add;
	UnOp uop = UnOp::Neg;
	// IsNull: IS NOT NULL when set
	bool negated = false;
	Type cast_to = Type::Null;
	AggKind agg = AggKind::Count;
	std::string func;
	// Case: when0, then0, when1, then1, ..., [else]
	std::vector<ExprPtr> args;
	bool has_else = false;
	PlanPtr subquery;
	// filled in by Bind
	Type type = Type::Null;
	bool lifted = false;
	long pos = -1;
};

ExprPtr MakeColumn(std::string qual, std::string name);
ExprPtr MakeLiteral(Value v);
ExprPtr MakeBinary(BinOp op, ExprPtr l, ExprPtr r);
ExprPtr MakeUnary(UnOp op, ExprPtr e);
ExprPtr MakeFunc(std::string name, std::vector<ExprPtr> args);
ExprPtr MakeAgg(AggKind k, ExprPtr arg);

ExprPtr Clone(const ExprPtr &e);
bool SameExpr(const ExprPtr &a, const ExprPtr &b);
std::string ToSql(const ExprPtr &e);

// resolve columns against `schema`, infer result types; returns a fresh tree
ExprPtr Bind(const ExprPtr &e, const Schema &schema);
// UnknownColumn / TypeMismatch on failure
Type TypeCheck(const ExprPtr &e, const Schema &schema);

// AND-split / AND-join
void SplitConjuncts(const ExprPtr &e, std::vector<ExprPtr> &out);
ExprPtr JoinConjuncts(const std::vector<ExprPtr> &parts);

template <class F>
void VisitExpr(const ExprPtr &e, F &&f) {
	if (!e) {
		return;
	}
	f(e);
	for (auto &a : e->args) {
		VisitExpr(a, f);
	}
}

bool ContainsAgg(const ExprPtr &e);
bool ContainsSubquery(const ExprPtr &e);

// engine services used by pac_* functions and scalar subqueries
class EvalHooks {
public:
	virtual ~EvalHooks() = default;
	virtual uint64_t Salt() = 0;
	virtual bool PacFilter(uint64_t bits) = 0;
	virtual Value PacNoised(const WorldVector &v, double scale) = 0;
	virtual Value ScalarSubquery(const PlanNode *plan) = 0;
};

struct RowCtx {
	const Relation *rel = nullptr;
	size_t row = 0;
	// world slot for lifted columns, -1 outside a lifted evaluation
	int slot = -1;
	EvalHooks *hooks = nullptr;
};

// expression must be bound; lifted expressions at slot -1 produce a Vector value
Value Eval(const Expr &e, const RowCtx &ctx);
// evaluates a (possibly lifted) expression into 64 slots
WorldVector EvalLifted(const Expr &e, const RowCtx &ctx);
// per-world truth bits of a lifted boolean (Null and unset slots are false)
uint64_t TruthBits(const WorldVector &v);
bool IsTrue(const Value &v);

} // namespace pac

#endif // PAC_EXPR_HPP
