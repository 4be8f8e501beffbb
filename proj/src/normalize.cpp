#include "pac/errors.hpp"
#include "pac/parser.hpp"
#include "pac/rewrite.hpp"

#include <map>

namespace pac {

namespace {

bool Binds(const ExprPtr &e, const Schema &s) {
	try {
		Bind(e, s);
		return true;
	} catch (const PacError &) {
		return false;
	}
}

ExprPtr FindScalarSub(const ExprPtr &e, const std::set<const Expr *> &done) {
	ExprPtr found;
	VisitExpr(e, [&](const ExprPtr &x) {
		if (!found && x->kind == ExprKind::Subquery && x->func.empty() && !done.count(x.get())) {
			found = x;
		}
	});
	return found;
}

bool IsNumLit(const ExprPtr &e, double &v) {
	if (e->kind != ExprKind::Literal || !IsNumeric(e->lit.type())) {
		return false;
	}
	v = e->lit.to_double();
	return v != 0.0;
}

class Normalizer {
public:
	explicit Normalizer(const PrivacyCatalog &cat) : cat_(cat) {
	}

	Schema Norm(PlanPtr &node) {
		Schema s = NormNode(node);
		schemas_[node.get()] = s;
		return s;
	}

private:
	const PrivacyCatalog &cat_;
	std::vector<std::map<std::string, Schema>> ctes_;
	std::map<const PlanNode *, Schema> schemas_;
	int sq_counter_ = 0;

	const Schema &SchemaOf(const PlanPtr &p) {
		auto it = schemas_.find(p.get());
		if (it == schemas_.end()) {
			throw PacError(ErrorCode::Internal, "schema not derived");
		}
		return it->second;
	}

	static Schema Requalify(Schema s, const std::string &qual) {
		for (size_t i = 0; i < s.size(); i++) {
			s[i].qual = qual;
		}
		return s;
	}

	Schema NormNode(PlanPtr &node) {
		switch (node->kind) {
		case PlanKind::Scan: {
			if (!cat_.HasTable(node->table)) {
				throw PacError(ErrorCode::UnknownTable, "unknown table: " + node->table);
			}
			return Requalify(cat_.Table(node->table).schema, node->alias);
		}
		case PlanKind::CteRef: {
			for (auto it = ctes_.rbegin(); it != ctes_.rend(); ++it) {
				auto f = it->find(node->table);
				if (f != it->end()) {
					return Requalify(f->second, node->alias);
				}
			}
			throw PacError(ErrorCode::UnknownTable, "unknown CTE: " + node->table);
		}
		case PlanKind::Values:
			return DeriveNodeSchema(*node, {});
		case PlanKind::Unsupported:
			// left as parsed; Analyze rejects or refuses it
			return {};
		case PlanKind::Filter:
			return NormFilter(node);
		case PlanKind::Join:
			return NormJoin(node);
		case PlanKind::Project:
			return NormProject(node);
		case PlanKind::Aggregate:
			return NormAggregate(node);
		case PlanKind::Sort: {
			Schema s = Norm(node->children[0]);
			for (auto &k : node->sort) {
				Bind(k.expr, s);
			}
			return s;
		}
		case PlanKind::Limit:
			return Norm(node->children[0]);
		case PlanKind::With: {
			ctes_.emplace_back();
			for (size_t i = 0; i + 1 < node->children.size(); i++) {
				Schema s = Norm(node->children[i]);
				ctes_.back()[node->cte_names[i]] = s;
			}
			Schema s = Norm(node->children.back());
			ctes_.pop_back();
			return s;
		}
		case PlanKind::SetOp: {
			Schema l = Norm(node->children[0]);
			Schema r = Norm(node->children[1]);
			if (l.size() != r.size()) {
				throw PacError(ErrorCode::TypeMismatch, "set operation arity mismatch");
			}
			return l;
		}
		}
		return {};
	}

	// subqueries outside decorrelatable WHERE positions: scalar ones must be uncorrelated
	void NormSubqueries(const ExprPtr &e) {
		VisitExpr(e, [&](const ExprPtr &x) {
			if (x->kind != ExprKind::Subquery) {
				return;
			}
			if (!x->func.empty()) {
				// IN / EXISTS: kept opaque, classification decides
				try {
					Normalizer inner(cat_);
					inner.ctes_ = ctes_;
					inner.Norm(x->subquery);
				} catch (const PacError &) {
				}
				x->type = Type::Bool;
				return;
			}
			Schema s;
			try {
				s = Norm(x->subquery);
			} catch (const PacError &err) {
				if (err.code() == ErrorCode::UnknownColumn) {
					throw PacError(ErrorCode::UnsupportedSyntax,
					               std::string("correlated subquery outside WHERE is not supported (") + err.what() + ")",
					               x->pos);
				}
				throw;
			}
			if (s.size() != 1) {
				throw PacError(ErrorCode::SyntaxError, "scalar subquery must return one column", x->pos);
			}
			x->type = s[0].type;
		});
	}

	struct Decorrelated {
		PlanPtr inner;
		std::vector<ExprPtr> outer_keys;
		std::string alias;
	};

	// Project -> [Filter] -> Aggregate(no groups) -> [Filter] -> from
	bool Decorrelate(const ExprPtr &sub, const ExprPtr &conjunct, const Schema &outer, Decorrelated &out) {
		PlanPtr q = sub->subquery;
		if (q->kind != PlanKind::Project || q->exprs.size() != 1) {
			return false;
		}
		PlanPtr below = q->children[0];
		PlanPtr having;
		if (below->kind == PlanKind::Filter) {
			having = below;
			below = below->children[0];
		}
		if (below->kind != PlanKind::Aggregate || !below->groups.empty()) {
			return false;
		}
		PlanPtr agg = below;
		PlanPtr where = agg->children[0]->kind == PlanKind::Filter ? agg->children[0] : nullptr;
		PlanPtr &from = where ? where->children[0] : agg->children[0];
		Schema si = Norm(from);

		std::vector<ExprPtr> local, inner_keys, outer_keys;
		if (where) {
			std::vector<ExprPtr> conj;
			SplitConjuncts(where->pred, conj);
			for (auto &c : conj) {
				if (ContainsSubquery(c) || Binds(c, si)) {
					local.push_back(c);
					continue;
				}
				if (c->kind == ExprKind::Binary && c->bop == BinOp::Eq) {
					auto &a = c->args[0], &b = c->args[1];
					if (Binds(a, si) && Binds(b, outer)) {
						inner_keys.push_back(a);
						outer_keys.push_back(b);
						continue;
					}
					if (Binds(b, si) && Binds(a, outer)) {
						inner_keys.push_back(b);
						outer_keys.push_back(a);
						continue;
					}
				}
				throw PacError(ErrorCode::UnsupportedSyntax,
				               "correlated subquery predicate must be an equality: " + ToSql(c), c->pos);
			}
			if (local.empty()) {
				agg->children[0] = where->children[0];
			} else {
				where->pred = JoinConjuncts(local);
			}
		}
		out.alias = "__sq" + std::to_string(sq_counter_++);
		for (size_t i = 0; i < inner_keys.size(); i++) {
			agg->groups.push_back(inner_keys[i]);
			agg->group_names.push_back("__corr" + std::to_string(i));
			agg->group_quals.push_back("");
		}
		FoldConstant(sub, conjunct, q->exprs[0]);
		q->names = {"__v"};
		for (size_t i = 0; i < inner_keys.size(); i++) {
			q->exprs.push_back(MakeColumn("", "__corr" + std::to_string(i)));
			q->names.push_back("__corr" + std::to_string(i));
		}
		q->quals.assign(q->exprs.size(), out.alias);
		q->alias = out.alias;
		q->subquery_block = true;
		out.inner = q;
		out.outer_keys = outer_keys;
		return true;
	}

	// A op c*S  ->  (1/c)*A op S  (flipped when c < 0)
	static void FoldConstant(const ExprPtr &sub, const ExprPtr &c, ExprPtr &value) {
		if (c->kind != ExprKind::Binary || !IsComparison(c->bop) || (c->args[0] != sub && c->args[1] != sub)) {
			return;
		}
		if (value->kind != ExprKind::Binary) {
			return;
		}
		double lit, k;
		ExprPtr inner;
		if (value->bop == BinOp::Mul && IsNumLit(value->args[0], lit)) {
			k = 1.0 / lit;
			inner = value->args[1];
		} else if (value->bop == BinOp::Mul && IsNumLit(value->args[1], lit)) {
			k = 1.0 / lit;
			inner = value->args[0];
		} else if (value->bop == BinOp::Div && IsNumLit(value->args[1], lit)) {
			k = lit;
			inner = value->args[0];
		} else {
			return;
		}
		value = inner;
		size_t other = c->args[0] == sub ? 1 : 0;
		c->args[other] = MakeBinary(BinOp::Mul, MakeLiteral(Value::Float(k)), c->args[other]);
		if (k < 0) {
			c->bop = FlipComparison(c->bop);
		}
	}

	Schema NormFilter(PlanPtr &node) {
		PlanPtr &child = node->children[0];
		Schema s = Norm(child);
		bool where = child->kind != PlanKind::Aggregate;
		std::vector<ExprPtr> conj;
		SplitConjuncts(node->pred, conj);
		if (where) {
			std::set<const Expr *> kept;
			for (auto &c : conj) {
				while (auto sub = FindScalarSub(c, kept)) {
					Decorrelated d;
					if (!Decorrelate(sub, c, s, d)) {
						kept.insert(sub.get());
						continue;
					}
					Norm(d.inner);
					auto j = MakeJoin(JoinKind::Left, child, d.inner);
					for (size_t i = 0; i < d.outer_keys.size(); i++) {
						j->lkeys.push_back(d.outer_keys[i]);
						j->rkeys.push_back(MakeColumn(d.alias, "__corr" + std::to_string(i)));
					}
					ExprPtr col = MakeColumn(d.alias, "__v");
					col->pos = sub->pos;
					*sub = *col;
					child = j;
					s = Norm(child);
				}
			}
		}
		for (auto &c : conj) {
			NormSubqueries(c);
		}
		auto bound = Bind(JoinConjuncts(conj), s);
		if (bound->type != Type::Bool && bound->type != Type::Null) {
			throw PacError(ErrorCode::TypeMismatch, "WHERE/HAVING predicate must be BOOLEAN", node->pred->pos);
		}
		std::vector<ExprPtr> rest;
		for (auto &c : conj) {
			if (!(where && PushEqui(child, c))) {
				rest.push_back(c);
			}
		}
		if (rest.empty()) {
			PlanPtr c = child;
			node = c;
			return s;
		}
		node->pred = JoinConjuncts(rest);
		return s;
	}

	static bool Splittable(const ExprPtr &c) {
		return c->kind == ExprKind::Binary && c->bop == BinOp::Eq && !ContainsSubquery(c);
	}

	bool PushEqui(PlanPtr &j, const ExprPtr &c) {
		if (j->kind != PlanKind::Join || !Splittable(c)) {
			return false;
		}
		const Schema &sl = SchemaOf(j->children[0]);
		const Schema &sr = SchemaOf(j->children[1]);
		auto &a = c->args[0], &b = c->args[1];
		bool aL = Binds(a, sl), aR = Binds(a, sr), bL = Binds(b, sl), bR = Binds(b, sr);
		bool inner = j->join == JoinKind::Inner;
		if (inner && aL && !aR && bR && !bL) {
			j->lkeys.push_back(a);
			j->rkeys.push_back(b);
			return true;
		}
		if (inner && aR && !aL && bL && !bR) {
			j->lkeys.push_back(b);
			j->rkeys.push_back(a);
			return true;
		}
		if (aL && bL && !aR && !bR) {
			return PushEqui(j->children[0], c);
		}
		if (inner && aR && bR && !aL && !bL) {
			return PushEqui(j->children[1], c);
		}
		return false;
	}

	Schema NormJoin(PlanPtr &node) {
		Schema l = Norm(node->children[0]);
		Schema r = Norm(node->children[1]);
		if (node->residual) {
			std::vector<ExprPtr> conj, rest;
			SplitConjuncts(node->residual, conj);
			for (auto &c : conj) {
				NormSubqueries(c);
				if (Splittable(c)) {
					auto &a = c->args[0], &b = c->args[1];
					bool aL = Binds(a, l), aR = Binds(a, r), bL = Binds(b, l), bR = Binds(b, r);
					if (aL && !aR && bR && !bL) {
						node->lkeys.push_back(a);
						node->rkeys.push_back(b);
						continue;
					}
					if (aR && !aL && bL && !bR) {
						node->lkeys.push_back(b);
						node->rkeys.push_back(a);
						continue;
					}
				}
				rest.push_back(c);
			}
			node->residual = rest.empty() ? nullptr : JoinConjuncts(rest);
		}
		Schema out = DeriveNodeSchema(*node, {&l, &r});
		for (size_t i = 0; i < node->lkeys.size(); i++) {
			auto x = Bind(node->lkeys[i], l), y = Bind(node->rkeys[i], r);
			auto eq = MakeBinary(BinOp::Eq, x, y);
			if (x->type != y->type && !(IsNumeric(x->type) && IsNumeric(y->type))) {
				throw PacError(ErrorCode::TypeMismatch, "join keys have different types: " + ToSql(eq), x->pos);
			}
		}
		if (node->residual) {
			auto b = Bind(node->residual, out);
			if (b->type != Type::Bool) {
				throw PacError(ErrorCode::TypeMismatch, "join condition must be BOOLEAN", b->pos);
			}
		}
		return out;
	}

	Schema NormProject(PlanPtr &node) {
		Schema s = Norm(node->children[0]);
		std::vector<ExprPtr> exprs;
		std::vector<std::string> names, quals;
		for (size_t i = 0; i < node->exprs.size(); i++) {
			auto &e = node->exprs[i];
			if (e->kind == ExprKind::Column && e->name == "*") {
				bool any = false;
				for (auto &c : s.columns()) {
					if (!e->qual.empty() && c.qual != e->qual) {
						continue;
					}
					if (c.name == "__one" || c.name == "pu") {
						continue;
					}
					exprs.push_back(MakeColumn(c.qual, c.name));
					names.push_back(c.name);
					quals.push_back(node->alias);
					any = true;
				}
				if (!any && !e->qual.empty()) {
					throw PacError(ErrorCode::UnknownTable, "unknown table in select list: " + e->qual, e->pos);
				}
				continue;
			}
			NormSubqueries(e);
			exprs.push_back(e);
			names.push_back(node->names[i]);
			quals.push_back(node->quals[i]);
		}
		node->exprs = exprs;
		node->names = names;
		node->quals = quals;
		node->release = !node->subquery_block;
		return DeriveNodeSchema(*node, {&s});
	}

	Schema NormAggregate(PlanPtr &node) {
		Schema s = Norm(node->children[0]);
		node->group_names.resize(node->groups.size());
		node->group_quals.resize(node->groups.size());
		for (size_t i = 0; i < node->groups.size(); i++) {
			if (ContainsSubquery(node->groups[i])) {
				throw PacError(ErrorCode::UnsupportedSyntax, "subquery in GROUP BY", node->groups[i]->pos);
			}
			auto b = Bind(node->groups[i], s);
			if (node->group_names[i].empty()) {
				if (b->kind == ExprKind::Column) {
					node->group_names[i] = s[size_t(b->index)].name;
					node->group_quals[i] = s[size_t(b->index)].qual;
				} else {
					node->group_names[i] = "__grp" + std::to_string(i);
				}
			}
		}
		for (auto &a : node->aggs) {
			if (!a.arg) {
				continue;
			}
			if (ContainsSubquery(a.arg)) {
				throw PacError(ErrorCode::UnsupportedSyntax, "subquery inside an aggregate", a.arg->pos);
			}
			auto b = Bind(a.arg, s);
			if ((a.kind == AggKind::Sum || a.kind == AggKind::Avg) && !IsNumeric(b->type) && b->type != Type::Null) {
				throw PacError(ErrorCode::TypeMismatch,
				               std::string(AggKindName(a.kind)) + " expects a number, got " + TypeName(b->type), a.arg->pos);
			}
		}
		return DeriveNodeSchema(*node, {&s});
	}
};

} // namespace

PlanPtr Normalize(const PlanPtr &parsed, const PrivacyCatalog &catalog) {
	PlanPtr p = ClonePlan(parsed);
	Normalizer n(catalog);
	n.Norm(p);
	NumberPlan(p);
	return p;
}

PlanPtr PrepareQuery(std::string_view sql, const PrivacyCatalog &catalog) {
	return Normalize(ParseQuery(sql), catalog);
}

} // namespace pac
