#include "pac/expr.hpp"

#include "pac/errors.hpp"
#include "pac/hash.hpp"

#include <bit>
#include <cmath>

namespace pac {

const char *BinOpSymbol(BinOp op) {
	switch (op) {
	case BinOp::Add:
		return "+";
	case BinOp::Sub:
		return "-";
	case BinOp::Mul:
		return "*";
	case BinOp::Div:
		return "/";
	case BinOp::Eq:
		return "=";
	case BinOp::Ne:
		return "!=";
	case BinOp::Lt:
		return "<";
	case BinOp::Le:
		return "<=";
	case BinOp::Gt:
		return ">";
	case BinOp::Ge:
		return ">=";
	case BinOp::And:
		return "AND";
	case BinOp::Or:
		return "OR";
	}
	return "?";
}

const char *AggKindName(AggKind k) {
	switch (k) {
	case AggKind::Count:
		return "count";
	case AggKind::CountStar:
		return "count_star";
	case AggKind::Sum:
		return "sum";
	case AggKind::Avg:
		return "avg";
	case AggKind::Min:
		return "min";
	case AggKind::Max:
		return "max";
	}
	return "?";
}

bool IsComparison(BinOp op) {
	return op >= BinOp::Eq && op <= BinOp::Ge;
}

BinOp FlipComparison(BinOp op) {
	switch (op) {
	case BinOp::Lt:
		return BinOp::Gt;
	case BinOp::Le:
		return BinOp::Ge;
	case BinOp::Gt:
		return BinOp::Lt;
	case BinOp::Ge:
		return BinOp::Le;
	default:
		return op;
	}
}

ExprPtr MakeColumn(std::string qual, std::string name) {
	auto e = std::make_shared<Expr>();
	e->kind = ExprKind::Column;
	e->qual = std::move(qual);
	e->name = std::move(name);
	return e;
}

ExprPtr MakeLiteral(Value v) {
	auto e = std::make_shared<Expr>();
	e->kind = ExprKind::Literal;
	e->lit = std::move(v);
	e->type = e->lit.type();
	return e;
}

ExprPtr MakeBinary(BinOp op, ExprPtr l, ExprPtr r) {
	auto e = std::make_shared<Expr>();
	e->kind = ExprKind::Binary;
	e->bop = op;
	e->args = {std::move(l), std::move(r)};
	return e;
}

ExprPtr MakeUnary(UnOp op, ExprPtr a) {
	auto e = std::make_shared<Expr>();
	e->kind = ExprKind::Unary;
	e->uop = op;
	e->args = {std::move(a)};
	return e;
}

ExprPtr MakeFunc(std::string name, std::vector<ExprPtr> args) {
	auto e = std::make_shared<Expr>();
	e->kind = ExprKind::Func;
	e->func = std::move(name);
	e->args = std::move(args);
	return e;
}

ExprPtr MakeAgg(AggKind k, ExprPtr arg) {
	auto e = std::make_shared<Expr>();
	e->kind = ExprKind::Agg;
	e->agg = k;
	if (arg) {
		e->args.push_back(std::move(arg));
	}
	return e;
}

ExprPtr Clone(const ExprPtr &e) {
	if (!e) {
		return nullptr;
	}
	auto c = std::make_shared<Expr>(*e);
	for (auto &a : c->args) {
		a = Clone(a);
	}
	return c;
}

bool SameExpr(const ExprPtr &a, const ExprPtr &b) {
	if (!a || !b) {
		return a == b;
	}
	if (a->kind != b->kind || a->args.size() != b->args.size()) {
		return false;
	}
	switch (a->kind) {
	case ExprKind::Column:
		if (a->name != b->name || a->qual != b->qual) {
			return false;
		}
		break;
	case ExprKind::Literal:
		if (a->lit.type() != b->lit.type() || !Equal(a->lit, b->lit)) {
			return false;
		}
		break;
	case ExprKind::Unary:
		if (a->uop != b->uop) {
			return false;
		}
		break;
	case ExprKind::Binary:
		if (a->bop != b->bop) {
			return false;
		}
		break;
	case ExprKind::Case:
		if (a->has_else != b->has_else) {
			return false;
		}
		break;
	case ExprKind::Cast:
		if (a->cast_to != b->cast_to) {
			return false;
		}
		break;
	case ExprKind::IsNull:
		if (a->negated != b->negated) {
			return false;
		}
		break;
	case ExprKind::Agg:
		if (a->agg != b->agg) {
			return false;
		}
		break;
	case ExprKind::Subquery:
		if (a->subquery != b->subquery) {
			return false;
		}
		break;
	case ExprKind::Func:
		if (a->func != b->func) {
			return false;
		}
		break;
	}
	for (size_t i = 0; i < a->args.size(); i++) {
		if (!SameExpr(a->args[i], b->args[i])) {
			return false;
		}
	}
	return true;
}

std::string ToSql(const ExprPtr &e) {
	if (!e) {
		return "";
	}
	switch (e->kind) {
	case ExprKind::Column:
		return e->qual.empty() ? e->name : e->qual + "." + e->name;
	case ExprKind::Literal:
		switch (e->lit.type()) {
		case Type::Text:
			return "'" + e->lit.as_text() + "'";
		case Type::Date:
			return "DATE '" + e->lit.ToString() + "'";
		case Type::Hash:
			return std::to_string(e->lit.as_hash());
		default:
			return e->lit.ToString();
		}
	case ExprKind::Unary:
		return e->uop == UnOp::Neg ? "-(" + ToSql(e->args[0]) + ")" : "NOT (" + ToSql(e->args[0]) + ")";
	case ExprKind::Binary:
		return "(" + ToSql(e->args[0]) + " " + BinOpSymbol(e->bop) + " " + ToSql(e->args[1]) + ")";
	case ExprKind::Case: {
		std::string s = "CASE";
		size_t n = e->args.size() - (e->has_else ? 1 : 0);
		for (size_t i = 0; i + 1 < n + 1 && i < n; i += 2) {
			s += " WHEN " + ToSql(e->args[i]) + " THEN " + ToSql(e->args[i + 1]);
		}
		if (e->has_else) {
			s += " ELSE " + ToSql(e->args.back());
		}
		return s + " END";
	}
	case ExprKind::Cast:
		return "CAST(" + ToSql(e->args[0]) + " AS " + TypeName(e->cast_to) + ")";
	case ExprKind::IsNull:
		return "(" + ToSql(e->args[0]) + (e->negated ? " IS NOT NULL)" : " IS NULL)");
	case ExprKind::Agg:
		if (e->agg == AggKind::CountStar) {
			return "count(*)";
		}
		return std::string(AggKindName(e->agg)) + "(" + ToSql(e->args[0]) + ")";
	case ExprKind::Subquery:
		return "(subquery)";
	case ExprKind::Func: {
		std::string s = e->func + "(";
		for (size_t i = 0; i < e->args.size(); i++) {
			s += (i ? ", " : "") + ToSql(e->args[i]);
		}
		return s + ")";
	}
	}
	return "?";
}

void SplitConjuncts(const ExprPtr &e, std::vector<ExprPtr> &out) {
	if (!e) {
		return;
	}
	if (e->kind == ExprKind::Binary && e->bop == BinOp::And) {
		SplitConjuncts(e->args[0], out);
		SplitConjuncts(e->args[1], out);
		return;
	}
	out.push_back(e);
}

ExprPtr JoinConjuncts(const std::vector<ExprPtr> &parts) {
	ExprPtr out;
	for (auto &p : parts) {
		out = out ? MakeBinary(BinOp::And, out, p) : p;
	}
	return out;
}

bool ContainsAgg(const ExprPtr &e) {
	bool found = false;
	VisitExpr(e, [&](const ExprPtr &x) { found |= x->kind == ExprKind::Agg; });
	return found;
}

bool ContainsSubquery(const ExprPtr &e) {
	bool found = false;
	VisitExpr(e, [&](const ExprPtr &x) { found |= x->kind == ExprKind::Subquery; });
	return found;
}

// ---------------------------------------------------------------------------
// binding and typing
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void Mismatch(const Expr &e, const std::string &msg) {
	throw PacError(ErrorCode::TypeMismatch, msg, e.pos);
}

Type Promote(Type a, Type b) {
	if (a == Type::Null) {
		return b;
	}
	if (b == Type::Null) {
		return a;
	}
	if (a == b) {
		return a;
	}
	if (IsNumeric(a) && IsNumeric(b)) {
		return Type::Float64;
	}
	return Type::Vector; // sentinel: incompatible
}

bool Comparable(Type a, Type b) {
	return a == Type::Null || b == Type::Null || a == b || (IsNumeric(a) && IsNumeric(b));
}

void CoerceDateLiteral(ExprPtr &side, Type other) {
	if (other == Type::Date && side->kind == ExprKind::Literal && side->lit.type() == Type::Text) {
		int32_t d;
		if (ParseDate(side->lit.as_text(), d)) {
			side->lit = Value::Date(d);
			side->type = Type::Date;
		}
	}
}

void BindInPlace(Expr &e, const Schema &schema) {
	for (auto &a : e.args) {
		if (a) {
			BindInPlace(*a, schema);
		}
	}
	bool any_lifted = false;
	for (auto &a : e.args) {
		any_lifted |= a && a->lifted;
	}
	e.lifted = any_lifted;
	switch (e.kind) {
	case ExprKind::Column: {
		int idx = schema.Find(e.qual, e.name);
		if (idx < 0) {
			throw PacError(ErrorCode::UnknownColumn,
			               "unknown column: " + (e.qual.empty() ? e.name : e.qual + "." + e.name), e.pos);
		}
		e.index = idx;
		e.type = schema[idx].type;
		e.lifted = schema[idx].lifted;
		return;
	}
	case ExprKind::Literal:
		e.type = e.lit.type();
		return;
	case ExprKind::Unary: {
		Type t = e.args[0]->type;
		if (e.uop == UnOp::Neg) {
			if (!IsNumeric(t) && t != Type::Null) {
				Mismatch(e, std::string("cannot negate ") + TypeName(t));
			}
			e.type = t == Type::Null ? Type::Int64 : t;
		} else {
			if (t != Type::Bool && t != Type::Null) {
				Mismatch(e, std::string("NOT expects BOOLEAN, got ") + TypeName(t));
			}
			e.type = Type::Bool;
		}
		return;
	}
	case ExprKind::Binary: {
		CoerceDateLiteral(e.args[0], e.args[1]->type);
		CoerceDateLiteral(e.args[1], e.args[0]->type);
		Type l = e.args[0]->type, r = e.args[1]->type;
		switch (e.bop) {
		case BinOp::Add:
		case BinOp::Sub:
			if (l == Type::Date && (r == Type::Int64 || r == Type::Null)) {
				e.type = Type::Date;
				return;
			}
			if (e.bop == BinOp::Add && r == Type::Date && l == Type::Int64) {
				e.type = Type::Date;
				return;
			}
			if (e.bop == BinOp::Sub && l == Type::Date && r == Type::Date) {
				e.type = Type::Int64;
				return;
			}
			[[fallthrough]];
		case BinOp::Mul:
		case BinOp::Div: {
			bool ok = (IsNumeric(l) || l == Type::Null) && (IsNumeric(r) || r == Type::Null);
			if (!ok) {
				Mismatch(e, std::string("operator ") + BinOpSymbol(e.bop) + " on " + TypeName(l) + " and " +
				                TypeName(r));
			}
			if (e.bop == BinOp::Div) {
				e.type = Type::Float64;
			} else {
				Type p = Promote(l, r);
				e.type = p == Type::Null ? Type::Int64 : p;
			}
			return;
		}
		case BinOp::And:
		case BinOp::Or:
			if ((l != Type::Bool && l != Type::Null) || (r != Type::Bool && r != Type::Null)) {
				Mismatch(e, std::string(BinOpSymbol(e.bop)) + " expects BOOLEAN operands");
			}
			e.type = Type::Bool;
			return;
		default:
			if (!Comparable(l, r)) {
				Mismatch(e, std::string("cannot compare ") + TypeName(l) + " with " + TypeName(r));
			}
			e.type = Type::Bool;
			return;
		}
	}
	case ExprKind::Case: {
		size_t n = e.args.size() - (e.has_else ? 1 : 0);
		Type res = Type::Null;
		for (size_t i = 0; i < n; i += 2) {
			Type c = e.args[i]->type;
			if (c != Type::Bool && c != Type::Null) {
				Mismatch(e, "CASE WHEN condition must be BOOLEAN");
			}
			res = Promote(res, e.args[i + 1]->type);
		}
		if (e.has_else) {
			res = Promote(res, e.args.back()->type);
		}
		if (res == Type::Vector) {
			Mismatch(e, "CASE branches have incompatible types");
		}
		e.type = res;
		return;
	}
	case ExprKind::Cast:
		e.type = e.cast_to;
		return;
	case ExprKind::IsNull:
		e.type = Type::Bool;
		return;
	case ExprKind::Agg:
		throw PacError(ErrorCode::UnsupportedSyntax, "aggregate not allowed here", e.pos);
	case ExprKind::Subquery:
		// type is assigned by the planner when the subquery schema is derived
		e.lifted = false;
		return;
	case ExprKind::Func: {
		auto arity = [&](size_t n) {
			if (e.args.size() != n) {
				Mismatch(e, e.func + " expects " + std::to_string(n) + " arguments");
			}
		};
		if (e.func == "pac_hash") {
			if (e.args.empty()) {
				Mismatch(e, "pac_hash expects arguments");
			}
			e.type = Type::Hash;
			e.lifted = false;
		} else if (e.func == "pac_select") {
			arity(2);
			if (e.args[0]->type != Type::Hash) {
				Mismatch(e, "pac_select expects a hash");
			}
			e.type = Type::Hash;
			e.lifted = false;
		} else if (e.func == "pac_filter") {
			arity(1);
			if (e.args[0]->type != Type::Bool && e.args[0]->type != Type::Null) {
				Mismatch(e, "pac_filter expects BOOLEAN");
			}
			e.type = Type::Bool;
			e.lifted = false;
		} else if (e.func == "pac_noised") {
			arity(2);
			if (!IsNumeric(e.args[0]->type) && e.args[0]->type != Type::Null) {
				Mismatch(e, "pac_noised expects a numeric argument");
			}
			e.type = Type::Float64;
			e.lifted = false;
		} else if (e.func == "year") {
			arity(1);
			if (e.args[0]->type != Type::Date && e.args[0]->type != Type::Null) {
				Mismatch(e, "year expects DATE");
			}
			e.type = Type::Int64;
		} else if (e.func == "abs") {
			arity(1);
			if (!IsNumeric(e.args[0]->type) && e.args[0]->type != Type::Null) {
				Mismatch(e, "abs expects a number");
			}
			e.type = e.args[0]->type;
		} else if (e.func == "like") {
			arity(2);
			for (auto &a : e.args) {
				if (a->type != Type::Text && a->type != Type::Null) {
					Mismatch(e, "LIKE expects text");
				}
			}
			e.type = Type::Bool;
		} else if (e.func == "coalesce") {
			Type res = Type::Null;
			for (auto &a : e.args) {
				res = Promote(res, a->type);
			}
			if (res == Type::Vector || e.args.empty()) {
				Mismatch(e, "coalesce arguments have incompatible types");
			}
			e.type = res;
		} else {
			throw PacError(ErrorCode::UnsupportedSyntax, "unknown function: " + e.func, e.pos);
		}
		return;
	}
	}
}

} // namespace

ExprPtr Bind(const ExprPtr &e, const Schema &schema) {
	auto c = Clone(e);
	BindInPlace(*c, schema);
	return c;
}

Type TypeCheck(const ExprPtr &e, const Schema &schema) {
	return Bind(e, schema)->type;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

bool IsTrue(const Value &v) {
	return v.type() == Type::Bool && v.as_bool();
}

uint64_t TruthBits(const WorldVector &v) {
	uint64_t bits = 0;
	for (int j = 0; j < 64; j++) {
		if (v.Has(j) && v.values[j] != 0.0) {
			bits |= 1ULL << j;
		}
	}
	return bits;
}

namespace {

Value SlotValue(double d, Type t) {
	switch (t) {
	case Type::Int64:
		return Value::Int(std::llround(d));
	case Type::Bool:
		return Value::Bool(d != 0.0);
	case Type::Date:
		return Value::Date(static_cast<int32_t>(std::llround(d)));
	default:
		return Value::Float(d);
	}
}

Value Arith(BinOp op, const Value &a, const Value &b) {
	if (a.is_null() || b.is_null()) {
		return Value::Null();
	}
	Type ta = a.type(), tb = b.type();
	if (ta == Type::Date || tb == Type::Date) {
		if (ta == Type::Date && tb == Type::Date) {
			return Value::Int(int64_t(a.as_date()) - b.as_date());
		}
		int64_t off = ta == Type::Date ? b.as_int() : a.as_int();
		int64_t base = ta == Type::Date ? a.as_date() : b.as_date();
		int64_t r = op == BinOp::Sub ? base - off : base + off;
		return Value::Date(static_cast<int32_t>(r));
	}
	if (op == BinOp::Div) {
		double y = b.to_double();
		if (y == 0.0) {
			return Value::Null();
		}
		return Value::Float(a.to_double() / y);
	}
	if (ta == Type::Int64 && tb == Type::Int64) {
		int64_t r;
		bool ovf;
		switch (op) {
		case BinOp::Add:
			ovf = __builtin_add_overflow(a.as_int(), b.as_int(), &r);
			break;
		case BinOp::Sub:
			ovf = __builtin_sub_overflow(a.as_int(), b.as_int(), &r);
			break;
		default:
			ovf = __builtin_mul_overflow(a.as_int(), b.as_int(), &r);
			break;
		}
		return ovf ? Value::Null() : Value::Int(r);
	}
	double x = a.to_double(), y = b.to_double();
	switch (op) {
	case BinOp::Add:
		return Value::Float(x + y);
	case BinOp::Sub:
		return Value::Float(x - y);
	default:
		return Value::Float(x * y);
	}
}

Value Cmp(BinOp op, const Value &a, const Value &b) {
	if (a.is_null() || b.is_null()) {
		return Value::Null();
	}
	if (op == BinOp::Eq) {
		return Value::Bool(Equal(a, b));
	}
	if (op == BinOp::Ne) {
		return Value::Bool(!Equal(a, b));
	}
	int c = Compare(a, b);
	switch (op) {
	case BinOp::Lt:
		return Value::Bool(c < 0);
	case BinOp::Le:
		return Value::Bool(c <= 0);
	case BinOp::Gt:
		return Value::Bool(c > 0);
	default:
		return Value::Bool(c >= 0);
	}
}

// % any run, _ one character
bool LikeMatch(std::string_view s, std::string_view p) {
	size_t si = 0, pi = 0, star = std::string_view::npos, mark = 0;
	while (si < s.size()) {
		if (pi < p.size() && (p[pi] == '_' || p[pi] == s[si])) {
			si++;
			pi++;
		} else if (pi < p.size() && p[pi] == '%') {
			star = pi++;
			mark = si;
		} else if (star != std::string_view::npos) {
			pi = star + 1;
			si = ++mark;
		} else {
			return false;
		}
	}
	while (pi < p.size() && p[pi] == '%') {
		pi++;
	}
	return pi == p.size();
}

Value Conform(Value v, Type t) {
	if (t == Type::Float64 && v.type() == Type::Int64) {
		return Value::Float(static_cast<double>(v.as_int()));
	}
	return v;
}

uint64_t LiftedInputMask(const Expr &e, const RowCtx &ctx) {
	uint64_t mask = ~0ULL;
	auto walk = [&](auto &self, const Expr &x) -> void {
		if (x.kind == ExprKind::Column) {
			if (x.lifted) {
				auto &v = ctx.rel->cols[x.index][ctx.row];
				mask &= v.is_null() ? 0 : v.as_vector()->mask;
			}
			return;
		}
		for (auto &a : x.args) {
			self(self, *a);
		}
	};
	walk(walk, e);
	return mask;
}

EvalHooks &Hooks(const RowCtx &ctx, const Expr &e) {
	if (!ctx.hooks) {
		throw PacError(ErrorCode::Internal, e.func.empty() ? "scalar subquery without engine" : e.func + " outside engine");
	}
	return *ctx.hooks;
}

} // namespace

WorldVector EvalLifted(const Expr &e, const RowCtx &ctx) {
	WorldVector out;
	if (!e.lifted) {
		RowCtx c = ctx;
		c.slot = -1;
		Value v = Eval(e, c);
		if (!v.is_null()) {
			out.values.fill(v.to_double());
			out.mask = ~0ULL;
		}
		return out;
	}
	uint64_t in = LiftedInputMask(e, ctx);
	RowCtx c = ctx;
	for (int j = 0; j < 64; j++) {
		if (!((in >> j) & 1ULL)) {
			continue;
		}
		c.slot = j;
		Value v = Eval(e, c);
		if (!v.is_null()) {
			out.values[j] = v.to_double();
			out.mask |= 1ULL << j;
		}
	}
	return out;
}

Value Eval(const Expr &e, const RowCtx &ctx) {
	if (e.lifted && ctx.slot < 0) {
		return Value::Vector(std::make_shared<WorldVector>(EvalLifted(e, ctx)));
	}
	switch (e.kind) {
	case ExprKind::Column: {
		const Value &v = ctx.rel->cols[e.index][ctx.row];
		if (!e.lifted || v.is_null()) {
			return v;
		}
		auto &vec = *v.as_vector();
		return vec.Has(ctx.slot) ? SlotValue(vec.values[ctx.slot], e.type) : Value::Null();
	}
	case ExprKind::Literal:
		return e.lit;
	case ExprKind::Unary: {
		Value a = Eval(*e.args[0], ctx);
		if (a.is_null()) {
			return a;
		}
		if (e.uop == UnOp::Not) {
			return Value::Bool(!a.as_bool());
		}
		if (a.type() == Type::Int64) {
			int64_t r;
			return __builtin_sub_overflow(int64_t(0), a.as_int(), &r) ? Value::Null() : Value::Int(r);
		}
		return Value::Float(-a.as_float());
	}
	case ExprKind::Binary: {
		if (e.bop == BinOp::And || e.bop == BinOp::Or) {
			Value a = Eval(*e.args[0], ctx);
			bool is_and = e.bop == BinOp::And;
			if (!a.is_null() && a.as_bool() != is_and) {
				return Value::Bool(!is_and);
			}
			Value b = Eval(*e.args[1], ctx);
			if (!b.is_null() && b.as_bool() != is_and) {
				return Value::Bool(!is_and);
			}
			if (a.is_null() || b.is_null()) {
				return Value::Null();
			}
			return Value::Bool(is_and);
		}
		Value a = Eval(*e.args[0], ctx);
		Value b = Eval(*e.args[1], ctx);
		if (IsComparison(e.bop)) {
			return Cmp(e.bop, a, b);
		}
		return Arith(e.bop, a, b);
	}
	case ExprKind::Case: {
		size_t n = e.args.size() - (e.has_else ? 1 : 0);
		for (size_t i = 0; i < n; i += 2) {
			if (IsTrue(Eval(*e.args[i], ctx))) {
				return Conform(Eval(*e.args[i + 1], ctx), e.type);
			}
		}
		return e.has_else ? Conform(Eval(*e.args.back(), ctx), e.type) : Value::Null();
	}
	case ExprKind::Cast:
		return Cast(Eval(*e.args[0], ctx), e.cast_to);
	case ExprKind::IsNull:
		return Value::Bool(Eval(*e.args[0], ctx).is_null() != e.negated);
	case ExprKind::Agg:
		throw PacError(ErrorCode::Internal, "unlowered aggregate " + ToSql(std::make_shared<Expr>(e)));
	case ExprKind::Subquery:
		if (!e.func.empty()) {
			throw PacError(ErrorCode::UnsupportedSyntax, "cannot evaluate " + e.func + " subquery");
		}
		return Hooks(ctx, e).ScalarSubquery(e.subquery.get());
	case ExprKind::Func: {
		if (e.func == "pac_hash") {
			std::vector<Value> key;
			for (auto &a : e.args) {
				key.push_back(Eval(*a, ctx));
			}
			return Value::Hash(PacHash(key, Hooks(ctx, e).Salt()));
		}
		if (e.func == "pac_select") {
			Value pu = Eval(*e.args[0], ctx);
			if (pu.is_null()) {
				return pu;
			}
			return Value::Hash(pu.as_hash() & TruthBits(EvalLifted(*e.args[1], ctx)));
		}
		if (e.func == "pac_filter") {
			return Value::Bool(Hooks(ctx, e).PacFilter(TruthBits(EvalLifted(*e.args[0], ctx))));
		}
		if (e.func == "pac_noised") {
			double scale = e.args[1]->lit.to_double();
			return Hooks(ctx, e).PacNoised(EvalLifted(*e.args[0], ctx), scale);
		}
		if (e.func == "year") {
			Value a = Eval(*e.args[0], ctx);
			return a.is_null() ? a : Value::Int(DateYear(a.as_date()));
		}
		if (e.func == "abs") {
			Value a = Eval(*e.args[0], ctx);
			if (a.is_null()) {
				return a;
			}
			if (a.type() == Type::Int64) {
				return a.as_int() < 0 ? Value::Int(-a.as_int()) : a;
			}
			return Value::Float(std::fabs(a.as_float()));
		}
		if (e.func == "like") {
			Value a = Eval(*e.args[0], ctx);
			Value p = Eval(*e.args[1], ctx);
			if (a.is_null() || p.is_null()) {
				return Value::Null();
			}
			return Value::Bool(LikeMatch(a.as_text(), p.as_text()));
		}
		if (e.func == "coalesce") {
			for (auto &a : e.args) {
				Value v = Eval(*a, ctx);
				if (!v.is_null()) {
					return Conform(v, e.type);
				}
			}
			return Value::Null();
		}
		throw PacError(ErrorCode::Internal, "unknown function " + e.func);
	}
	}
	return Value::Null();
}

} // namespace pac
