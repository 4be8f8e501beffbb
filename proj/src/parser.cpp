#include "pac/parser.hpp"

#include "pac/catalog.hpp"
#include "pac/errors.hpp"
#include "pac/lexer.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace pac {

namespace {

const std::set<std::string> kReserved = {
    "select", "from",   "where",  "group", "by",     "having", "order",    "limit", "join",   "on",
    "left",   "inner",  "outer",  "as",    "and",    "or",     "not",      "union", "with",   "case",
    "when",   "then",   "else",   "end",   "is",     "null",   "between",  "in",    "like",   "exists",
    "asc",    "desc",   "distinct", "cross", "all",  "intersect", "except", "right", "full", "over", "offset"};

struct SelectItem {
	ExprPtr expr;
	std::string alias;
	bool star = false;
	std::string star_qual;
};

struct Block {
	PlanPtr plan;
	// output names and pre-aggregation select expressions, used by ORDER BY
	std::vector<std::string> names;
	std::vector<ExprPtr> exprs;
};

std::string StripQuals(const ExprPtr &e) {
	auto c = Clone(e);
	VisitExpr(c, [](const ExprPtr &x) {
		if (x->kind == ExprKind::Column) {
			x->qual.clear();
		}
	});
	std::string s = ToSql(c);
	if (s.size() > 2 && s.front() == '(' && s.back() == ')') {
		s = s.substr(1, s.size() - 2);
	}
	return s;
}

class Parser {
public:
	explicit Parser(std::string_view sql) : ts_(sql) {
	}

	PlanPtr ParseTop() {
		auto p = ParseQueryExpr();
		ts_.AcceptSym(";");
		if (!ts_.AtEnd()) {
			ts_.Fail("unexpected trailing input");
		}
		if (!unsupported_note_.empty()) {
			// parsed for classification only, never executed
			auto u = MakeNode(PlanKind::Unsupported);
			u->note = unsupported_note_;
			u->children.push_back(p);
			return u;
		}
		return p;
	}

private:
	TokenStream ts_;
	std::vector<std::set<std::string>> cte_scopes_;
	int derived_counter_ = 0;
	std::string unsupported_note_;

	[[noreturn]] void Unsupported(const std::string &what) {
		throw PacError(ErrorCode::UnsupportedSyntax, what + " is not supported (offset " +
		                                                 std::to_string(ts_.Peek().pos) + ")",
		               ts_.Peek().pos);
	}

	bool IsCte(const std::string &name) const {
		for (auto it = cte_scopes_.rbegin(); it != cte_scopes_.rend(); ++it) {
			if (it->count(name)) {
				return true;
			}
		}
		return false;
	}

	// ---- query level ----

	PlanPtr ParseQueryExpr() {
		std::vector<std::string> cte_names;
		std::vector<PlanPtr> cte_bodies;
		bool has_with = false;
		if (ts_.AcceptKw("with")) {
			has_with = true;
			if (ts_.AcceptKw("recursive")) {
				unsupported_note_ = "recursive query";
			}
			cte_scopes_.emplace_back();
			do {
				std::string name = ts_.ExpectIdent("CTE name");
				if (ts_.IsSym("(")) {
					Unsupported("CTE column list");
				}
				ts_.ExpectKw("as");
				ts_.AcceptKw("materialized");
				ts_.ExpectSym("(");
				auto body = ParseQueryExpr();
				ts_.ExpectSym(")");
				SetBlockQual(body, name);
				cte_scopes_.back().insert(name);
				cte_names.push_back(name);
				cte_bodies.push_back(body);
			} while (ts_.AcceptSym(","));
		}
		Block b = ParseSetExpr();
		PlanPtr plan = b.plan;
		if (ts_.AcceptKw("order")) {
			ts_.ExpectKw("by");
			auto sort = MakeNode(PlanKind::Sort);
			do {
				SortKey k;
				k.expr = ResolveOrderKey(ParseExpr(), b);
				if (ts_.AcceptKw("desc")) {
					k.desc = true;
				} else {
					ts_.AcceptKw("asc");
				}
				if (ts_.AcceptKw("nulls")) {
					Unsupported("NULLS FIRST/LAST");
				}
				sort->sort.push_back(k);
			} while (ts_.AcceptSym(","));
			sort->children.push_back(plan);
			plan = sort;
		}
		if (ts_.AcceptKw("limit")) {
			auto &t = ts_.Peek();
			if (t.kind != Tok::Int) {
				ts_.Fail("expected LIMIT count");
			}
			auto lim = MakeNode(PlanKind::Limit);
			lim->limit = std::stoll(ts_.Next().text);
			lim->children.push_back(plan);
			plan = lim;
			if (ts_.IsKw("offset")) {
				Unsupported("OFFSET");
			}
		}
		if (has_with) {
			cte_scopes_.pop_back();
			auto w = MakeNode(PlanKind::With);
			w->cte_names = cte_names;
			w->children = cte_bodies;
			w->children.push_back(plan);
			plan = w;
		}
		return plan;
	}

	Block ParseSetExpr() {
		Block b = ParseSelectCore();
		while (ts_.IsKw("union") || ts_.IsKw("intersect") || ts_.IsKw("except")) {
			std::string op = ts_.Next().text;
			if (ts_.AcceptKw("all")) {
				op += " all";
			}
			Block r = ParseSelectCore();
			auto s = MakeNode(PlanKind::SetOp);
			s->note = op;
			s->children = {b.plan, r.plan};
			b.plan = s;
			b.exprs.clear();
		}
		return b;
	}

	ExprPtr ResolveOrderKey(const ExprPtr &e, const Block &b) {
		if (e->kind == ExprKind::Literal && e->lit.type() == Type::Int64) {
			int64_t k = e->lit.as_int();
			if (k < 1 || size_t(k) > b.names.size()) {
				throw PacError(ErrorCode::SyntaxError, "ORDER BY position out of range", e->pos);
			}
			return MakeColumn("", b.names[size_t(k - 1)]);
		}
		if (e->kind == ExprKind::Column && e->qual.empty()) {
			for (auto &n : b.names) {
				if (n == e->name) {
					return MakeColumn("", n);
				}
			}
		}
		for (size_t i = 0; i < b.exprs.size(); i++) {
			if (b.exprs[i] && SameExpr(b.exprs[i], e)) {
				return MakeColumn("", b.names[i]);
			}
		}
		if (e->kind == ExprKind::Column) {
			for (size_t i = 0; i < b.exprs.size(); i++) {
				if (b.exprs[i] && b.exprs[i]->kind == ExprKind::Column && b.exprs[i]->name == e->name) {
					return MakeColumn("", b.names[i]);
				}
			}
		}
		throw PacError(ErrorCode::UnsupportedSyntax, "ORDER BY expression must appear in the select list: " + ToSql(e),
		               e->pos);
	}

	static void SetBlockQual(const PlanPtr &p, const std::string &alias) {
		PlanPtr cur = p;
		while (cur && (cur->kind == PlanKind::Sort || cur->kind == PlanKind::Limit || cur->kind == PlanKind::With)) {
			cur = cur->children.back();
		}
		if (cur && cur->kind == PlanKind::Project) {
			cur->alias = alias;
			for (auto &q : cur->quals) {
				q = alias;
			}
		} else if (cur && cur->kind == PlanKind::SetOp) {
			SetBlockQual(cur->children[0], alias);
			SetBlockQual(cur->children[1], alias);
		}
	}

	// ---- SELECT core ----

	Block ParseSelectCore() {
		if (ts_.IsSym("(")) {
			ts_.Next();
			Block b;
			b.plan = ParseQueryExpr();
			ts_.ExpectSym(")");
			return b;
		}
		ts_.ExpectKw("select");
		if (ts_.AcceptKw("distinct")) {
			Unsupported("SELECT DISTINCT");
		}
		ts_.AcceptKw("all");
		std::vector<SelectItem> items;
		do {
			items.push_back(ParseSelectItem());
		} while (ts_.AcceptSym(","));

		PlanPtr from;
		if (ts_.AcceptKw("from")) {
			from = ParseFromList();
		} else {
			from = MakeNode(PlanKind::Values);
		}
		ExprPtr where;
		if (ts_.AcceptKw("where")) {
			where = ParseExpr();
		}
		std::vector<ExprPtr> group_by;
		if (ts_.AcceptKw("group")) {
			ts_.ExpectKw("by");
			do {
				group_by.push_back(ParseExpr());
			} while (ts_.AcceptSym(","));
		}
		ExprPtr having;
		if (ts_.AcceptKw("having")) {
			having = ParseExpr();
		}
		return Lower(std::move(items), from, where, std::move(group_by), having);
	}

	SelectItem ParseSelectItem() {
		SelectItem it;
		if (ts_.AcceptSym("*")) {
			it.star = true;
			return it;
		}
		if ((ts_.Peek().kind == Tok::Ident || ts_.Peek().kind == Tok::QuotedIdent) && ts_.IsSym(".", 1) &&
		    ts_.IsSym("*", 2)) {
			it.star = true;
			it.star_qual = ts_.Next().text;
			ts_.Next();
			ts_.Next();
			return it;
		}
		it.expr = ParseExpr();
		if (ts_.AcceptKw("as")) {
			it.alias = ts_.ExpectIdent("alias");
		} else if ((ts_.Peek().kind == Tok::Ident && !kReserved.count(ts_.Peek().text)) ||
		           ts_.Peek().kind == Tok::QuotedIdent) {
			it.alias = ts_.Next().text;
		}
		return it;
	}

	Block Lower(std::vector<SelectItem> items, PlanPtr from, ExprPtr where, std::vector<ExprPtr> group_by,
	            ExprPtr having) {
		PlanPtr plan = from;
		if (where) {
			if (ContainsAgg(where)) {
				throw PacError(ErrorCode::SyntaxError, "aggregate in WHERE", where->pos);
			}
			plan = MakeFilter(plan, where);
		}
		bool has_agg = !group_by.empty() || (having != nullptr);
		for (auto &it : items) {
			has_agg |= !it.star && ContainsAgg(it.expr);
		}
		Block b;
		auto proj = MakeNode(PlanKind::Project);
		if (has_agg) {
			auto agg = MakeNode(PlanKind::Aggregate);
			// GROUP BY ordinals and select aliases
			for (auto &g : group_by) {
				if (g->kind == ExprKind::Literal && g->lit.type() == Type::Int64) {
					int64_t k = g->lit.as_int();
					if (k < 1 || size_t(k) > items.size() || items[size_t(k - 1)].star) {
						throw PacError(ErrorCode::SyntaxError, "GROUP BY position out of range", g->pos);
					}
					g = Clone(items[size_t(k - 1)].expr);
				} else if (g->kind == ExprKind::Column && g->qual.empty()) {
					for (auto &it : items) {
						if (!it.star && it.alias == g->name &&
						    !(it.expr->kind == ExprKind::Column && it.expr->name == g->name)) {
							g = Clone(it.expr);
							break;
						}
					}
				}
				if (ContainsAgg(g)) {
					throw PacError(ErrorCode::SyntaxError, "aggregate in GROUP BY", g->pos);
				}
				agg->groups.push_back(g);
				if (g->kind == ExprKind::Column) {
					agg->group_names.push_back("");
					agg->group_quals.push_back("");
				} else {
					agg->group_names.push_back("__grp" + std::to_string(agg->groups.size() - 1));
					agg->group_quals.push_back("");
				}
			}
			agg->children.push_back(plan);
			plan = agg;
			for (auto &it : items) {
				if (it.star) {
					Unsupported("SELECT * with aggregation");
				}
				b.exprs.push_back(it.expr);
				it.expr = ReplaceAggs(it.expr, *agg);
			}
			if (having) {
				plan = MakeFilter(plan, ReplaceAggs(having, *agg));
			}
		} else {
			for (auto &it : items) {
				b.exprs.push_back(it.star ? nullptr : it.expr);
			}
		}
		for (size_t i = 0; i < items.size(); i++) {
			auto &it = items[i];
			if (it.star) {
				auto star = MakeColumn(it.star_qual, "*");
				proj->exprs.push_back(star);
				proj->names.push_back("*");
				proj->quals.push_back("");
				b.names.push_back("*");
				continue;
			}
			std::string name = it.alias;
			if (name.empty()) {
				name = b.exprs[i]->kind == ExprKind::Column ? b.exprs[i]->name : StripQuals(b.exprs[i]);
			}
			proj->exprs.push_back(it.expr);
			proj->names.push_back(name);
			proj->quals.push_back("");
			b.names.push_back(name);
		}
		proj->children.push_back(plan);
		b.plan = proj;
		return b;
	}

	ExprPtr ReplaceAggs(const ExprPtr &e, PlanNode &agg) {
		for (size_t i = 0; i < agg.groups.size(); i++) {
			if (agg.groups[i]->kind != ExprKind::Column && SameExpr(agg.groups[i], e)) {
				return MakeColumn("", agg.group_names[i]);
			}
		}
		if (e->kind == ExprKind::Agg) {
			for (auto &a : e->args) {
				if (ContainsAgg(a)) {
					throw PacError(ErrorCode::SyntaxError, "nested aggregate", e->pos);
				}
			}
			ExprPtr arg = e->args.empty() ? nullptr : e->args[0];
			for (auto &s : agg.aggs) {
				if (s.kind == e->agg && SameExpr(s.arg, arg)) {
					return MakeColumn("", s.name);
				}
			}
			AggSpec s;
			s.kind = e->agg;
			s.arg = arg;
			s.name = "__agg" + std::to_string(agg.aggs.size());
			agg.aggs.push_back(s);
			return MakeColumn("", s.name);
		}
		auto c = std::make_shared<Expr>(*e);
		for (auto &a : c->args) {
			a = ReplaceAggs(a, agg);
		}
		return c;
	}

	// ---- FROM ----

	PlanPtr ParseFromList() {
		PlanPtr left = ParseFromItem();
		while (ts_.AcceptSym(",")) {
			left = MakeJoin(JoinKind::Inner, left, ParseFromItem());
		}
		return left;
	}

	PlanPtr ParseFromItem() {
		PlanPtr left = ParseTableRef();
		while (true) {
			JoinKind kind = JoinKind::Inner;
			bool cross = false;
			if (ts_.IsKw("join")) {
				ts_.Next();
			} else if (ts_.IsKw("inner") && ts_.IsKw("join", 1)) {
				ts_.Next();
				ts_.Next();
			} else if (ts_.IsKw("left")) {
				ts_.Next();
				ts_.AcceptKw("outer");
				ts_.ExpectKw("join");
				kind = JoinKind::Left;
			} else if (ts_.IsKw("cross") && ts_.IsKw("join", 1)) {
				ts_.Next();
				ts_.Next();
				cross = true;
			} else if (ts_.IsKw("right") || ts_.IsKw("full")) {
				Unsupported("RIGHT/FULL JOIN");
			} else {
				break;
			}
			PlanPtr right = ParseTableRef();
			auto j = MakeJoin(kind, left, right);
			if (!cross) {
				ts_.ExpectKw("on");
				j->residual = ParseExpr();
			}
			left = j;
		}
		return left;
	}

	PlanPtr ParseTableRef() {
		if (ts_.AcceptSym("(")) {
			if (!(ts_.IsKw("select") || ts_.IsKw("with") || ts_.IsSym("("))) {
				PlanPtr inner = ParseFromList();
				ts_.ExpectSym(")");
				return inner;
			}
			auto body = ParseQueryExpr();
			ts_.ExpectSym(")");
			std::string alias;
			if (ts_.AcceptKw("as")) {
				alias = ts_.ExpectIdent("alias");
			} else if (ts_.Peek().kind == Tok::Ident && !kReserved.count(ts_.Peek().text)) {
				alias = ts_.Next().text;
			} else {
				alias = "__d" + std::to_string(derived_counter_++);
			}
			if (ts_.IsSym("(")) {
				Unsupported("derived table column list");
			}
			SetBlockQual(body, alias);
			return body;
		}
		if (ts_.Peek().kind == Tok::Ident && kReserved.count(ts_.Peek().text)) {
			ts_.Fail("expected a table name");
		}
		std::string name = ts_.ExpectIdent("table name");
		std::string alias = name;
		if (ts_.AcceptKw("as")) {
			alias = ts_.ExpectIdent("alias");
		} else if (ts_.Peek().kind == Tok::Ident && !kReserved.count(ts_.Peek().text)) {
			alias = ts_.Next().text;
		}
		if (IsCte(name)) {
			auto r = MakeNode(PlanKind::CteRef);
			r->table = name;
			r->alias = alias;
			return r;
		}
		return MakeScan(name, alias);
	}

	// ---- expressions ----

	ExprPtr ParseExpr() {
		return ParseOr();
	}

	ExprPtr At(ExprPtr e, long pos) {
		e->pos = pos;
		return e;
	}

	ExprPtr ParseOr() {
		auto l = ParseAnd();
		while (ts_.IsKw("or")) {
			long p = ts_.Next().pos;
			l = At(MakeBinary(BinOp::Or, l, ParseAnd()), p);
		}
		return l;
	}

	ExprPtr ParseAnd() {
		auto l = ParseNot();
		while (ts_.IsKw("and")) {
			long p = ts_.Next().pos;
			l = At(MakeBinary(BinOp::And, l, ParseNot()), p);
		}
		return l;
	}

	ExprPtr ParseNot() {
		if (ts_.IsKw("not") && !ts_.IsKw("exists", 1)) {
			long p = ts_.Next().pos;
			return At(MakeUnary(UnOp::Not, ParseNot()), p);
		}
		return ParsePredicate();
	}

	ExprPtr ParsePredicate() {
		long pos = ts_.Peek().pos;
		if (ts_.IsKw("not") && ts_.IsKw("exists", 1)) {
			ts_.Next();
			auto e = ParsePrimary();
			e->negated = true;
			return e;
		}
		auto l = ParseAdditive();
		static const std::pair<const char *, BinOp> cmps[] = {{"=", BinOp::Eq},  {"<>", BinOp::Ne}, {"!=", BinOp::Ne},
		                                                       {"<=", BinOp::Le}, {">=", BinOp::Ge}, {"<", BinOp::Lt},
		                                                       {">", BinOp::Gt}};
		for (auto &[sym, op] : cmps) {
			if (ts_.IsSym(sym)) {
				long p = ts_.Next().pos;
				if (ts_.IsKw("any") || ts_.IsKw("all") || ts_.IsKw("some")) {
					Unsupported("quantified comparison");
				}
				return At(MakeBinary(op, l, ParseAdditive()), p);
			}
		}
		if (ts_.IsKw("is")) {
			ts_.Next();
			auto e = std::make_shared<Expr>();
			e->kind = ExprKind::IsNull;
			e->negated = ts_.AcceptKw("not");
			ts_.ExpectKw("null");
			e->args.push_back(l);
			return At(e, pos);
		}
		bool negated = false;
		if (ts_.IsKw("not") && (ts_.IsKw("between", 1) || ts_.IsKw("in", 1) || ts_.IsKw("like", 1))) {
			ts_.Next();
			negated = true;
		}
		ExprPtr out;
		if (ts_.AcceptKw("between")) {
			auto lo = ParseAdditive();
			ts_.ExpectKw("and");
			auto hi = ParseAdditive();
			out = MakeBinary(BinOp::And, MakeBinary(BinOp::Ge, l, lo), MakeBinary(BinOp::Le, Clone(l), hi));
		} else if (ts_.AcceptKw("in")) {
			ts_.ExpectSym("(");
			if (ts_.IsKw("select") || ts_.IsKw("with")) {
				auto sub = ParseQueryExpr();
				ts_.ExpectSym(")");
				auto e = std::make_shared<Expr>();
				e->kind = ExprKind::Subquery;
				e->func = "in";
				e->subquery = sub;
				e->args.push_back(l);
				e->negated = negated;
				return At(e, pos);
			}
			std::vector<ExprPtr> alts;
			do {
				alts.push_back(MakeBinary(BinOp::Eq, Clone(l), ParseAdditive()));
			} while (ts_.AcceptSym(","));
			ts_.ExpectSym(")");
			out = alts[0];
			for (size_t i = 1; i < alts.size(); i++) {
				out = MakeBinary(BinOp::Or, out, alts[i]);
			}
		} else if (ts_.AcceptKw("like")) {
			out = MakeFunc("like", {l, ParseAdditive()});
		} else {
			return l;
		}
		out = At(out, pos);
		return negated ? At(MakeUnary(UnOp::Not, out), pos) : out;
	}

	ExprPtr ParseAdditive() {
		auto l = ParseMultiplicative();
		while (true) {
			if (ts_.IsSym("+") || ts_.IsSym("-")) {
				auto &t = ts_.Next();
				BinOp op = t.text == "+" ? BinOp::Add : BinOp::Sub;
				l = At(MakeBinary(op, l, ParseMultiplicative()), t.pos);
			} else if (ts_.IsSym("||")) {
				Unsupported("string concatenation");
			} else {
				return l;
			}
		}
	}

	ExprPtr ParseMultiplicative() {
		auto l = ParseUnary();
		while (true) {
			if (ts_.IsSym("*") || ts_.IsSym("/")) {
				auto &t = ts_.Next();
				BinOp op = t.text == "*" ? BinOp::Mul : BinOp::Div;
				l = At(MakeBinary(op, l, ParseUnary()), t.pos);
			} else if (ts_.IsSym("%")) {
				Unsupported("modulo");
			} else {
				return l;
			}
		}
	}

	ExprPtr ParseUnary() {
		if (ts_.IsSym("-")) {
			long p = ts_.Next().pos;
			auto e = ParseUnary();
			if (e->kind == ExprKind::Literal && e->lit.type() == Type::Int64) {
				return At(MakeLiteral(Value::Int(-e->lit.as_int())), p);
			}
			if (e->kind == ExprKind::Literal && e->lit.type() == Type::Float64) {
				return At(MakeLiteral(Value::Float(-e->lit.as_float())), p);
			}
			return At(MakeUnary(UnOp::Neg, e), p);
		}
		if (ts_.AcceptSym("+")) {
			return ParseUnary();
		}
		return ParsePrimary();
	}

	Type ParseCastType() {
		auto name = ts_.ExpectIdent("type name");
		Type t = ParseTypeName(name);
		if (t == Type::Null) {
			ts_.Fail("unknown type '" + name + "'");
		}
		if (ts_.AcceptSym("(")) {
			while (!ts_.IsSym(")") && !ts_.AtEnd()) {
				ts_.Next();
			}
			ts_.ExpectSym(")");
		}
		return t;
	}

	ExprPtr ParsePrimary() {
		const Token &t = ts_.Peek();
		long pos = t.pos;
		switch (t.kind) {
		case Tok::Int: {
			std::string s = ts_.Next().text;
			int64_t v;
			auto r = std::from_chars(s.data(), s.data() + s.size(), v);
			if (r.ec != std::errc()) {
				return At(MakeLiteral(Value::Float(std::stod(s))), pos);
			}
			return At(MakeLiteral(Value::Int(v)), pos);
		}
		case Tok::Float:
			return At(MakeLiteral(Value::Float(std::stod(ts_.Next().text))), pos);
		case Tok::String:
			return At(MakeLiteral(Value::Text(ts_.Next().text)), pos);
		case Tok::Symbol:
			if (t.text == "(") {
				ts_.Next();
				if (ts_.IsKw("select") || ts_.IsKw("with")) {
					auto sub = ParseQueryExpr();
					ts_.ExpectSym(")");
					auto e = std::make_shared<Expr>();
					e->kind = ExprKind::Subquery;
					e->subquery = sub;
					return At(e, pos);
				}
				auto e = ParseExpr();
				ts_.ExpectSym(")");
				return e;
			}
			ts_.Fail("expected an expression");
		case Tok::End:
			ts_.Fail("expected an expression");
		case Tok::QuotedIdent:
		case Tok::Ident:
			break;
		}
		std::string word = t.text;
		bool plain = t.kind == Tok::Ident;
		if (plain) {
			if (word == "null") {
				ts_.Next();
				return At(MakeLiteral(Value::Null()), pos);
			}
			if (word == "true" || word == "false") {
				ts_.Next();
				return At(MakeLiteral(Value::Bool(word == "true")), pos);
			}
			if (word == "date" && ts_.Peek(1).kind == Tok::String) {
				ts_.Next();
				std::string s = ts_.Next().text;
				int32_t d;
				if (!ParseDate(s, d)) {
					throw PacError(ErrorCode::SyntaxError, "invalid DATE literal '" + s + "'", pos);
				}
				return At(MakeLiteral(Value::Date(d)), pos);
			}
			if (word == "interval") {
				Unsupported("INTERVAL");
			}
			if (word == "case") {
				return At(ParseCase(), pos);
			}
			if (word == "cast" && ts_.IsSym("(", 1)) {
				ts_.Next();
				ts_.Next();
				auto e = std::make_shared<Expr>();
				e->kind = ExprKind::Cast;
				e->args.push_back(ParseExpr());
				ts_.ExpectKw("as");
				e->cast_to = ParseCastType();
				ts_.ExpectSym(")");
				return At(e, pos);
			}
			if (word == "exists" && ts_.IsSym("(", 1)) {
				ts_.Next();
				ts_.Next();
				auto sub = ParseQueryExpr();
				ts_.ExpectSym(")");
				auto e = std::make_shared<Expr>();
				e->kind = ExprKind::Subquery;
				e->func = "exists";
				e->subquery = sub;
				return At(e, pos);
			}
			if (word == "extract" && ts_.IsSym("(", 1)) {
				ts_.Next();
				ts_.Next();
				auto part = ts_.ExpectIdent("date part");
				if (part != "year") {
					Unsupported("EXTRACT(" + part + ")");
				}
				ts_.ExpectKw("from");
				auto arg = ParseExpr();
				ts_.ExpectSym(")");
				return At(MakeFunc("year", {arg}), pos);
			}
			if (kReserved.count(word)) {
				ts_.Fail("expected an expression");
			}
		}
		ts_.Next();
		if (ts_.IsSym("(")) {
			return At(ParseCall(word), pos);
		}
		if (ts_.AcceptSym(".")) {
			std::string col = ts_.ExpectIdent("column name");
			return At(MakeColumn(word, col), pos);
		}
		return At(MakeColumn("", word), pos);
	}

	ExprPtr ParseCall(const std::string &name) {
		ts_.ExpectSym("(");
		static const std::pair<const char *, AggKind> aggs[] = {
		    {"count", AggKind::Count}, {"sum", AggKind::Sum}, {"avg", AggKind::Avg}, {"min", AggKind::Min}, {"max", AggKind::Max}};
		ExprPtr out;
		for (auto &[n, k] : aggs) {
			if (name != n) {
				continue;
			}
			if (ts_.AcceptKw("distinct")) {
				Unsupported("DISTINCT aggregate");
			}
			if (k == AggKind::Count && ts_.AcceptSym("*")) {
				ts_.ExpectSym(")");
				out = MakeAgg(AggKind::CountStar, nullptr);
			} else {
				auto arg = ParseExpr();
				ts_.ExpectSym(")");
				out = MakeAgg(k, arg);
			}
			break;
		}
		if (!out) {
			std::vector<ExprPtr> args;
			if (!ts_.IsSym(")")) {
				do {
					args.push_back(ParseExpr());
				} while (ts_.AcceptSym(","));
			}
			ts_.ExpectSym(")");
			out = MakeFunc(name, std::move(args));
		}
		if (ts_.IsKw("over")) {
			// window functions: kept as a marker so classification can reject them over PU data
			unsupported_note_ = "window function";
			ts_.Next();
			ts_.ExpectSym("(");
			int depth = 1;
			while (depth > 0 && !ts_.AtEnd()) {
				if (ts_.IsSym("(")) {
					depth++;
				} else if (ts_.IsSym(")")) {
					depth--;
				}
				ts_.Next();
			}
			return MakeFunc("__window", {out});
		}
		return out;
	}

	ExprPtr ParseCase() {
		ts_.ExpectKw("case");
		auto e = std::make_shared<Expr>();
		e->kind = ExprKind::Case;
		ExprPtr operand;
		if (!ts_.IsKw("when")) {
			operand = ParseExpr();
		}
		if (!ts_.IsKw("when")) {
			ts_.Fail("expected WHEN");
		}
		while (ts_.AcceptKw("when")) {
			auto cond = ParseExpr();
			if (operand) {
				cond = MakeBinary(BinOp::Eq, Clone(operand), cond);
			}
			ts_.ExpectKw("then");
			e->args.push_back(cond);
			e->args.push_back(ParseExpr());
		}
		if (ts_.AcceptKw("else")) {
			e->args.push_back(ParseExpr());
			e->has_else = true;
		}
		ts_.ExpectKw("end");
		return e;
	}
};

} // namespace

PlanPtr ParseQuery(std::string_view sql) {
	Parser p(sql);
	auto plan = p.ParseTop();
	NumberPlan(plan);
	return plan;
}

} // namespace pac
