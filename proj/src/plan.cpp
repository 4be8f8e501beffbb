#include "pac/plan.hpp"

#include <sstream>
#include <stdexcept>

namespace pac {

const char *PlanKindName(PlanKind k) {
	switch (k) {
	case PlanKind::Scan:
		return "Scan";
	case PlanKind::Filter:
		return "Filter";
	case PlanKind::Project:
		return "Project";
	case PlanKind::Join:
		return "Join";
	case PlanKind::Aggregate:
		return "Aggregate";
	case PlanKind::Sort:
		return "Sort";
	case PlanKind::Limit:
		return "Limit";
	case PlanKind::With:
		return "With";
	case PlanKind::CteRef:
		return "CteRef";
	case PlanKind::SetOp:
		return "SetOp";
	case PlanKind::Unsupported:
		return "Unsupported";
	case PlanKind::Values:
		return "Values";
	}
	return "?";
}

const char *PacModeName(PacMode m) {
	switch (m) {
	case PacMode::None:
		return "none";
	case PacMode::Fused:
		return "fused";
	case PacMode::Unfused:
		return "unfused";
	}
	return "?";
}

PlanPtr MakeNode(PlanKind k) {
	auto p = std::make_shared<PlanNode>();
	p->kind = k;
	return p;
}

PlanPtr MakeScan(const std::string &table, const std::string &alias) {
	auto p = MakeNode(PlanKind::Scan);
	p->table = table;
	p->alias = alias;
	return p;
}

PlanPtr MakeFilter(PlanPtr child, ExprPtr pred) {
	auto p = MakeNode(PlanKind::Filter);
	p->children.push_back(std::move(child));
	p->pred = std::move(pred);
	return p;
}

PlanPtr MakeJoin(JoinKind k, PlanPtr l, PlanPtr r) {
	auto p = MakeNode(PlanKind::Join);
	p->join = k;
	p->children = {std::move(l), std::move(r)};
	return p;
}

namespace {

ExprPtr DeepClone(const ExprPtr &e) {
	if (!e) {
		return nullptr;
	}
	auto c = std::make_shared<Expr>(*e);
	if (c->subquery) {
		c->subquery = ClonePlan(c->subquery);
	}
	for (auto &a : c->args) {
		a = DeepClone(a);
	}
	return c;
}

void CloneAll(std::vector<ExprPtr> &v) {
	for (auto &e : v) {
		e = DeepClone(e);
	}
}

bool SameTree(const ExprPtr &a, const ExprPtr &b) {
	if (!a || !b) {
		return a == b;
	}
	if (a->kind == ExprKind::Subquery && b->kind == ExprKind::Subquery) {
		if (a->func != b->func || a->negated != b->negated || a->args.size() != b->args.size() ||
		    !SamePlan(a->subquery, b->subquery)) {
			return false;
		}
		for (size_t i = 0; i < a->args.size(); i++) {
			if (!SameTree(a->args[i], b->args[i])) {
				return false;
			}
		}
		return true;
	}
	if (a->kind != b->kind || a->args.size() != b->args.size()) {
		return false;
	}
	// shallow comparison of this node via SameExpr on childless copies
	auto x = std::make_shared<Expr>(*a);
	auto y = std::make_shared<Expr>(*b);
	x->args.clear();
	y->args.clear();
	if (!SameExpr(x, y)) {
		return false;
	}
	for (size_t i = 0; i < a->args.size(); i++) {
		if (!SameTree(a->args[i], b->args[i])) {
			return false;
		}
	}
	return true;
}

bool SameList(const std::vector<ExprPtr> &a, const std::vector<ExprPtr> &b) {
	if (a.size() != b.size()) {
		return false;
	}
	for (size_t i = 0; i < a.size(); i++) {
		if (!SameTree(a[i], b[i])) {
			return false;
		}
	}
	return true;
}

std::string Sql(const ExprPtr &e) {
	std::string s = ToSql(e);
	if (s.size() > 2 && s.front() == '(' && s.back() == ')') {
		// only strip when the outer parens match each other
		int depth = 0;
		bool outer = true;
		for (size_t i = 0; i < s.size(); i++) {
			depth += s[i] == '(' ? 1 : (s[i] == ')' ? -1 : 0);
			if (depth == 0 && i + 1 < s.size()) {
				outer = false;
				break;
			}
		}
		if (outer) {
			s = s.substr(1, s.size() - 2);
		}
	}
	return s;
}

std::string AggText(const AggSpec &a) {
	std::string s;
	if (a.pac != PacMode::None) {
		s += "pac_";
	}
	s += a.kind == AggKind::CountStar ? "count(*)" : std::string(AggKindName(a.kind)) + "(" + Sql(a.arg) + ")";
	if (a.pac != PacMode::None) {
		s += std::string(" ") + PacModeName(a.pac) + " pu=" + Sql(a.pu);
	}
	return s + " AS " + a.name;
}

void Render(const PlanPtr &p, int depth, std::ostringstream &out) {
	std::string pad(size_t(depth) * 2, ' ');
	out << pad;
	std::vector<PlanPtr> subs;
	auto collect = [&](const ExprPtr &e) {
		VisitExpr(e, [&](const ExprPtr &x) {
			if (x->subquery) {
				subs.push_back(x->subquery);
			}
		});
	};
	switch (p->kind) {
	case PlanKind::Scan:
		out << "Scan(" << p->table;
		if (p->alias != p->table) {
			out << " AS " << p->alias;
		}
		out << ")";
		break;
	case PlanKind::CteRef:
		out << "CteRef(" << p->table;
		if (p->alias != p->table) {
			out << " AS " << p->alias;
		}
		out << ")";
		break;
	case PlanKind::Filter:
		out << "Filter(" << Sql(p->pred) << ")";
		collect(p->pred);
		break;
	case PlanKind::Project:
		out << "Project";
		if (p->release) {
			out << "[release]";
		}
		if (p->subquery_block) {
			out << "[subquery]";
		}
		out << "(";
		for (size_t i = 0; i < p->exprs.size(); i++) {
			std::string e = Sql(p->exprs[i]);
			std::string n = p->names[i];
			if (!p->quals[i].empty()) {
				n = p->quals[i] + "." + n;
			}
			out << (i ? ", " : "");
			if (e == p->names[i] || e == n) {
				out << n;
			} else {
				out << n << " := " << e;
			}
			collect(p->exprs[i]);
		}
		out << ")";
		break;
	case PlanKind::Join:
		out << (p->join == JoinKind::Left ? "LeftJoin(" : "Join(");
		for (size_t i = 0; i < p->lkeys.size(); i++) {
			out << (i ? " AND " : "") << Sql(p->lkeys[i]) << " = " << Sql(p->rkeys[i]);
		}
		if (p->residual) {
			out << (p->lkeys.empty() ? "" : " AND ") << Sql(p->residual);
			collect(p->residual);
		}
		out << ")";
		break;
	case PlanKind::Aggregate:
		out << "Aggregate(groups=[";
		for (size_t i = 0; i < p->groups.size(); i++) {
			out << (i ? ", " : "") << Sql(p->groups[i]);
			if (i < p->group_names.size() && !p->group_names[i].empty()) {
				out << " AS " << p->group_names[i];
			}
		}
		out << "], aggs=[";
		for (size_t i = 0; i < p->aggs.size(); i++) {
			out << (i ? ", " : "") << AggText(p->aggs[i]);
			collect(p->aggs[i].arg);
		}
		out << "])";
		break;
	case PlanKind::Sort:
		out << "Sort(";
		for (size_t i = 0; i < p->sort.size(); i++) {
			out << (i ? ", " : "") << Sql(p->sort[i].expr) << (p->sort[i].desc ? " DESC" : "");
		}
		out << ")";
		break;
	case PlanKind::Limit:
		out << "Limit(" << p->limit << ")";
		break;
	case PlanKind::With:
		out << "With(";
		for (size_t i = 0; i < p->cte_names.size(); i++) {
			out << (i ? ", " : "") << p->cte_names[i];
		}
		out << ")";
		break;
	case PlanKind::SetOp:
		out << "SetOp(" << p->note << ")";
		break;
	case PlanKind::Unsupported:
		out << "Unsupported(" << p->note << ")";
		break;
	case PlanKind::Values:
		out << "Values()";
		break;
	}
	out << "\n";
	for (auto &c : p->children) {
		Render(c, depth + 1, out);
	}
	for (auto &s : subs) {
		out << pad << "  subquery:\n";
		Render(s, depth + 2, out);
	}
}

} // namespace

PlanPtr ClonePlan(const PlanPtr &p) {
	if (!p) {
		return nullptr;
	}
	auto c = std::make_shared<PlanNode>(*p);
	for (auto &ch : c->children) {
		ch = ClonePlan(ch);
	}
	c->pred = DeepClone(c->pred);
	c->residual = DeepClone(c->residual);
	CloneAll(c->exprs);
	CloneAll(c->lkeys);
	CloneAll(c->rkeys);
	CloneAll(c->groups);
	for (auto &a : c->aggs) {
		a.arg = DeepClone(a.arg);
		a.pu = DeepClone(a.pu);
	}
	for (auto &s : c->sort) {
		s.expr = DeepClone(s.expr);
	}
	return c;
}

bool SamePlan(const PlanPtr &a, const PlanPtr &b) {
	if (!a || !b) {
		return a == b;
	}
	if (a->kind != b->kind || a->children.size() != b->children.size() || a->table != b->table ||
	    a->alias != b->alias || a->names != b->names || a->quals != b->quals || a->release != b->release ||
	    a->subquery_block != b->subquery_block || a->join != b->join || a->group_names != b->group_names ||
	    a->group_quals != b->group_quals || a->limit != b->limit || a->cte_names != b->cte_names ||
	    a->note != b->note || a->aggs.size() != b->aggs.size() || a->sort.size() != b->sort.size()) {
		return false;
	}
	if (!SameTree(a->pred, b->pred) || !SameTree(a->residual, b->residual) || !SameList(a->exprs, b->exprs) ||
	    !SameList(a->lkeys, b->lkeys) || !SameList(a->rkeys, b->rkeys) || !SameList(a->groups, b->groups)) {
		return false;
	}
	for (size_t i = 0; i < a->aggs.size(); i++) {
		auto &x = a->aggs[i], &y = b->aggs[i];
		if (x.kind != y.kind || x.name != y.name || x.pac != y.pac || x.null_on_empty != y.null_on_empty ||
		    !SameTree(x.arg, y.arg) || !SameTree(x.pu, y.pu)) {
			return false;
		}
	}
	for (size_t i = 0; i < a->sort.size(); i++) {
		if (a->sort[i].desc != b->sort[i].desc || !SameTree(a->sort[i].expr, b->sort[i].expr)) {
			return false;
		}
	}
	for (size_t i = 0; i < a->children.size(); i++) {
		if (!SamePlan(a->children[i], b->children[i])) {
			return false;
		}
	}
	return true;
}

void NumberPlan(const PlanPtr &p) {
	int next = 0;
	auto walk = [&](auto &self, const PlanPtr &n) -> void {
		n->id = next++;
		for (auto &c : n->children) {
			self(self, c);
		}
		auto sub = [&](const ExprPtr &e) {
			VisitExpr(e, [&](const ExprPtr &x) {
				if (x->subquery) {
					self(self, x->subquery);
				}
			});
		};
		sub(n->pred);
		sub(n->residual);
		for (auto &e : n->exprs) {
			sub(e);
		}
	};
	if (p) {
		walk(walk, p);
	}
}

Type AggResultType(AggKind k, Type input) {
	switch (k) {
	case AggKind::Count:
	case AggKind::CountStar:
		return Type::Int64;
	case AggKind::Avg:
		return Type::Float64;
	case AggKind::Sum:
		return input == Type::Float64 ? Type::Float64 : Type::Int64;
	default:
		return input == Type::Null ? Type::Int64 : input;
	}
}

Schema DeriveNodeSchema(const PlanNode &n, const std::vector<const Schema *> &children) {
	switch (n.kind) {
	case PlanKind::Filter:
	case PlanKind::Sort:
	case PlanKind::Limit:
	case PlanKind::SetOp:
		return *children.at(0);
	case PlanKind::With:
		return *children.back();
	case PlanKind::Values:
		return Schema({Column {"__one", "", Type::Int64, false, false}});
	case PlanKind::Project: {
		Schema out;
		for (size_t i = 0; i < n.exprs.size(); i++) {
			auto b = Bind(n.exprs[i], *children.at(0));
			bool nullable = true;
			if (b->kind == ExprKind::Column) {
				nullable = (*children[0])[size_t(b->index)].nullable;
			}
			out.Add(Column {n.names[i], n.quals[i], b->type == Type::Null ? Type::Int64 : b->type, nullable, b->lifted});
		}
		return out;
	}
	case PlanKind::Join: {
		Schema out = *children.at(0);
		for (auto c : children.at(1)->columns()) {
			if (n.join == JoinKind::Left) {
				c.nullable = true;
			}
			out.Add(c);
		}
		return out;
	}
	case PlanKind::Aggregate: {
		const Schema &in = *children.at(0);
		Schema out;
		for (size_t i = 0; i < n.groups.size(); i++) {
			auto b = Bind(n.groups[i], in);
			Column c;
			if (i < n.group_names.size() && !n.group_names[i].empty()) {
				c.name = n.group_names[i];
				c.qual = i < n.group_quals.size() ? n.group_quals[i] : "";
			} else if (b->kind == ExprKind::Column) {
				c.name = in[size_t(b->index)].name;
				c.qual = in[size_t(b->index)].qual;
			} else {
				c.name = "__grp" + std::to_string(i);
			}
			c.type = b->type == Type::Null ? Type::Int64 : b->type;
			c.nullable = true;
			c.lifted = b->lifted;
			out.Add(c);
		}
		for (auto &a : n.aggs) {
			Type t = a.arg ? Bind(a.arg, in)->type : Type::Int64;
			out.Add(Column {a.name, "", AggResultType(a.kind, t), true, a.pac != PacMode::None});
		}
		return out;
	}
	default:
		throw std::logic_error("DeriveNodeSchema on a leaf");
	}
}

std::string RenderPlan(const PlanPtr &p) {
	std::ostringstream out;
	if (p) {
		Render(p, 0, out);
	}
	return out.str();
}

} // namespace pac
