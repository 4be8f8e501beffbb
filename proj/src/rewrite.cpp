#include "pac/rewrite.hpp"

#include "pac/aggregates.hpp"
#include "pac/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

namespace pac {

const char *RuleKindName(RuleKind r) {
	switch (r) {
	case RuleKind::JoinAdded:
		return "JoinAdded";
	case RuleKind::JoinEliminated:
		return "JoinEliminated";
	case RuleKind::HashProjected:
		return "HashProjected";
	case RuleKind::AggReplaced:
		return "AggReplaced";
	case RuleKind::VectorLifted:
		return "VectorLifted";
	case RuleKind::SelectInserted:
		return "SelectInserted";
	case RuleKind::FilterProbabilistic:
		return "FilterProbabilistic";
	case RuleKind::CtePropagated:
		return "CtePropagated";
	}
	return "?";
}

std::string TraceEntry::ToString() const {
	return std::string(RuleKindName(rule)) + "(" + detail + ")";
}

size_t RewriteTrace::count(RuleKind r) const {
	return size_t(std::count_if(entries.begin(), entries.end(), [&](const TraceEntry &e) { return e.rule == r; }));
}

namespace {

struct Entity {
	std::string table;
	std::string column;
	bool operator==(const Entity &o) const {
		return table == o.table && column == o.column;
	}
};

struct ColInfo {
	bool prot = false;
	std::optional<Entity> ent;
};

struct RwOut {
	PlanPtr plan;
	Schema schema;
	std::vector<ColInfo> cols;
	// rows hold PU data that no PAC aggregate has consumed yet
	bool linked = false;
	bool pu = false;
	bool per_pu = false;
	bool lifted = false;
	// raw linked scan, no pu attached yet
	bool anchorable = false;
	std::string table;
	size_t depth = 0;
};

struct Reject {
	RejectReason reason;
	std::string msg;
};

ExprPtr Col(const std::string &qual, const std::string &name) {
	return MakeColumn(qual, name);
}

bool RefsColumn(const ExprPtr &e, const std::string &name) {
	bool found = false;
	VisitExpr(e, [&](const ExprPtr &x) {
		if (x->kind == ExprKind::Column && x->name == name && x->qual.empty()) {
			found = true;
		}
	});
	return found;
}

class Rewriter {
public:
	Rewriter(const PrivacyCatalog &cat, Analysis &an) : cat_(cat), an_(an) {
	}

	PlanPtr Run(const PlanPtr &root) {
		RwOut o = Rw(root, true);
		if (pending_) {
			throw *pending_;
		}
		for (auto &[node, idx] : pac_specs_) {
			if (node->aggs[idx].pac == PacMode::Unfused) {
				Trace(RuleKind::AggReplaced, node, std::string("unfused ") + AggKindName(node->aggs[idx].kind));
			}
		}
		NumberPlan(o.plan);
		for (auto &[e, n] : trace_) {
			TraceEntry t = e;
			t.node = n->id;
			an_.trace.entries.push_back(t);
		}
		return o.plan;
	}

private:
	const PrivacyCatalog &cat_;
	Analysis &an_;
	std::vector<std::pair<TraceEntry, const PlanNode *>> trace_;
	std::optional<Reject> pending_;
	std::vector<std::map<std::string, RwOut>> ctes_;
	std::vector<std::pair<PlanNode *, size_t>> pac_specs_;

	void Trace(RuleKind r, const PlanNode *n, std::string detail) {
		TraceEntry e;
		e.rule = r;
		e.detail = std::move(detail);
		trace_.emplace_back(e, n);
	}

	void Pending(RejectReason r, std::string msg) {
		if (!pending_) {
			pending_ = Reject {r, std::move(msg)};
		}
	}

	[[noreturn]] static void Fail(RejectReason r, std::string msg) {
		throw Reject {r, std::move(msg)};
	}

	std::optional<Entity> EntityOf(const std::string &table, const std::string &col) const {
		if (table == cat_.pu_table()) {
			auto &k = cat_.pac_key();
			if (std::find(k.begin(), k.end(), col) != k.end()) {
				return Entity {table, col};
			}
		}
		for (auto &l : cat_.links()) {
			if (l.from_table == table) {
				for (size_t i = 0; i < l.local_columns.size(); i++) {
					if (l.local_columns[i] == col) {
						return Entity {l.to_table, l.referenced_columns[i]};
					}
				}
			}
		}
		for (auto &l : cat_.links()) {
			if (l.to_table == table) {
				for (auto &r : l.referenced_columns) {
					if (r == col) {
						return Entity {table, col};
					}
				}
			}
		}
		return std::nullopt;
	}

	bool TouchesPU(const PlanPtr &p) const {
		bool hit = false;
		auto walk = [&](auto &self, const PlanPtr &n) -> void {
			if (!n || hit) {
				return;
			}
			if (n->kind == PlanKind::Scan && cat_.HasTable(n->table) && cat_.IsLinked(n->table)) {
				hit = true;
			}
			if (n->kind == PlanKind::CteRef) {
				for (auto &scope : ctes_) {
					auto it = scope.find(n->table);
					if (it != scope.end() && (it->second.linked || it->second.lifted)) {
						hit = true;
					}
				}
			}
			if (n->kind == PlanKind::With) {
				for (auto &c : n->children) {
					self(self, c);
				}
				return;
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
			for (auto &c : n->children) {
				self(self, c);
			}
		};
		walk(walk, p);
		return hit;
	}

	void CheckSubqueries(const ExprPtr &e) {
		VisitExpr(e, [&](const ExprPtr &x) {
			if (x->kind != ExprKind::Subquery) {
				return;
			}
			if (!TouchesPU(x->subquery)) {
				return;
			}
			if (x->func == "exists") {
				Pending(RejectReason::UnsupportedOperator,
				        std::string(x->negated ? "NOT EXISTS" : "EXISTS") + " over PU data is not supported");
			} else if (x->func == "in") {
				Pending(RejectReason::UnsupportedOperator, "IN (subquery) over PU data is not supported");
			} else {
				Pending(RejectReason::UnsupportedOperator, "scalar subquery over PU data outside WHERE is not supported");
			}
		});
	}

	static PlanPtr Shallow(const PlanPtr &n) {
		auto c = std::make_shared<PlanNode>(*n);
		return c;
	}

	static Schema Requalify(Schema s, const std::string &qual) {
		for (size_t i = 0; i < s.size(); i++) {
			if (s[i].name != "pu") {
				s[i].qual = qual;
			}
		}
		return s;
	}

	// ---- dispatch ----

	RwOut Rw(const PlanPtr &n, bool root) {
		switch (n->kind) {
		case PlanKind::Scan: {
			RwOut o = RwLeaf(n);
			if (o.anchorable) {
				Anchor(o, 0);
			}
			return o;
		}
		case PlanKind::Join:
			return RwJoinTree(n);
		case PlanKind::CteRef:
		case PlanKind::Values:
			return RwLeaf(n);
		case PlanKind::Filter:
			return RwFilter(n);
		case PlanKind::Project:
			return RwProject(n, root);
		case PlanKind::Aggregate:
			return RwAggregate(n);
		case PlanKind::Sort:
		case PlanKind::Limit: {
			RwOut c = Rw(n->children[0], root);
			auto p = Shallow(n);
			p->children = {c.plan};
			for (auto &k : p->sort) {
				if (Bind(k.expr, c.schema)->lifted) {
					Fail(RejectReason::UnsupportedOperator, "ORDER BY over an unreleased PAC aggregate");
				}
			}
			c.plan = p;
			return c;
		}
		case PlanKind::With: {
			auto p = Shallow(n);
			ctes_.emplace_back();
			for (size_t i = 0; i + 1 < n->children.size(); i++) {
				RwOut o = Rw(n->children[i], false);
				p->children[i] = o.plan;
				if (o.pu) {
					an_.pu_ctes.insert(n->cte_names[i]);
				}
				ctes_.back()[n->cte_names[i]] = o;
			}
			RwOut m = Rw(n->children.back(), root);
			ctes_.pop_back();
			p->children.back() = m.plan;
			m.plan = p;
			return m;
		}
		case PlanKind::SetOp: {
			auto p = Shallow(n);
			bool pu_data = false;
			RwOut first;
			for (size_t i = 0; i < n->children.size(); i++) {
				pu_data |= TouchesPU(n->children[i]);
			}
			if (pu_data) {
				Fail(RejectReason::UnsupportedOperator, "set operation (" + n->note + ") over PU data");
			}
			for (size_t i = 0; i < n->children.size(); i++) {
				RwOut o = Rw(n->children[i], root);
				p->children[i] = o.plan;
				if (i == 0) {
					first = o;
				}
			}
			first.plan = p;
			return first;
		}
		case PlanKind::Unsupported:
			Fail(RejectReason::UnsupportedOperator, n->note + " over PU data");
		}
		throw PacError(ErrorCode::Internal, "unhandled plan node");
	}

	RwOut RwLeaf(const PlanPtr &n) {
		if (n->kind == PlanKind::Scan) {
			RwOut o;
			o.plan = Shallow(n);
			o.schema = Requalify(cat_.Table(n->table).schema, n->alias);
			o.cols.resize(o.schema.size());
			auto path = cat_.FkPath(n->table);
			if (path) {
				o.linked = true;
				o.anchorable = true;
				o.table = n->table;
				o.depth = path->size();
				for (size_t i = 0; i < o.schema.size(); i++) {
					o.cols[i].prot = cat_.IsProtected(n->table, o.schema[i].name);
					o.cols[i].ent = EntityOf(n->table, o.schema[i].name);
				}
			}
			return o;
		}
		if (n->kind == PlanKind::CteRef) {
			for (auto it = ctes_.rbegin(); it != ctes_.rend(); ++it) {
				auto f = it->find(n->table);
				if (f != it->end()) {
					RwOut o = f->second;
					o.plan = Shallow(n);
					o.schema = Requalify(o.schema, n->alias);
					return o;
				}
			}
			throw PacError(ErrorCode::UnknownTable, "unknown CTE: " + n->table);
		}
		if (n->kind == PlanKind::Values) {
			RwOut o;
			o.plan = Shallow(n);
			o.schema = DeriveNodeSchema(*n, {});
			o.cols.resize(o.schema.size());
			return o;
		}
		return Rw(n, false);
	}

	// pu := pac_hash(...) on a raw linked scan, joining intermediate tables when needed
	void Anchor(RwOut &o, int) {
		auto path = *cat_.FkPath(o.table);
		const std::string alias = o.plan->alias;
		PlanPtr cur = o.plan;
		std::string cur_alias = alias;
		std::vector<ExprPtr> key;
		if (path.empty()) {
			for (auto &k : cat_.pac_key()) {
				key.push_back(Col(alias, k));
			}
		} else {
			for (size_t i = 0; i + 1 < path.size(); i++) {
				const PacLink &l = path[i];
				const PacLink &next = path[i + 1];
				std::string pa = "__pac_" + l.to_table;
				auto scan = MakeScan(l.to_table, pa);
				auto proj = MakeNode(PlanKind::Project);
				proj->children = {scan};
				std::vector<std::string> cols = l.referenced_columns;
				for (auto &c : next.local_columns) {
					if (std::find(cols.begin(), cols.end(), c) == cols.end()) {
						cols.push_back(c);
					}
				}
				for (auto &c : cols) {
					proj->exprs.push_back(Col(pa, c));
					proj->names.push_back(c);
					proj->quals.push_back(pa);
				}
				auto j = MakeJoin(JoinKind::Inner, cur, proj);
				for (size_t k = 0; k < l.local_columns.size(); k++) {
					j->lkeys.push_back(Col(cur_alias, l.local_columns[k]));
					j->rkeys.push_back(Col(pa, l.referenced_columns[k]));
				}
				Trace(RuleKind::JoinAdded, j.get(), l.from_table + "→" + l.to_table);
				cur = j;
				cur_alias = pa;
			}
			const PacLink &last = path.back();
			for (auto &c : last.local_columns) {
				key.push_back(Col(cur_alias, c));
			}
			Trace(RuleKind::JoinEliminated, o.plan.get(), last.from_table + "→" + last.to_table);
		}
		auto proj = MakeNode(PlanKind::Project);
		proj->children = {cur};
		for (auto &c : o.schema.columns()) {
			proj->exprs.push_back(Col(alias, c.name));
			proj->names.push_back(c.name);
			proj->quals.push_back(alias);
		}
		auto h = MakeFunc("pac_hash", key);
		proj->exprs.push_back(h);
		proj->names.push_back("pu");
		proj->quals.push_back("");
		Trace(RuleKind::HashProjected, proj.get(), "pu := " + ToSql(h));
		o.plan = proj;
		o.schema.Add(Column {"pu", "", Type::Hash, false, false});
		o.cols.push_back(ColInfo {});
		o.pu = true;
		o.anchorable = false;
	}

	// ---- joins ----

	struct Leaf {
		RwOut out;
		bool nullable = false;
	};

	struct Built {
		PlanPtr plan;
		Schema schema;
		std::vector<ColInfo> cols;
		std::vector<int> leaf_of_col;
	};

	void Flatten(const PlanPtr &n, bool nullable, std::vector<Leaf> &leaves) {
		if (n->kind == PlanKind::Join) {
			Flatten(n->children[0], nullable, leaves);
			Flatten(n->children[1], nullable || n->join == JoinKind::Left, leaves);
			return;
		}
		leaves.push_back(Leaf {RwLeaf(n), nullable});
	}

	Built Rebuild(const PlanPtr &n, std::vector<Leaf> &leaves, size_t &next,
	              std::vector<std::pair<std::pair<int, int>, bool>> &links) {
		if (n->kind != PlanKind::Join) {
			int idx = int(next++);
			Built b;
			b.plan = leaves[size_t(idx)].out.plan;
			b.schema = leaves[size_t(idx)].out.schema;
			b.cols = leaves[size_t(idx)].out.cols;
			b.leaf_of_col.assign(b.schema.size(), idx);
			return b;
		}
		Built l = Rebuild(n->children[0], leaves, next, links);
		Built r = Rebuild(n->children[1], leaves, next, links);
		auto j = Shallow(n);
		j->children = {l.plan, r.plan};
		for (size_t i = 0; i < n->lkeys.size(); i++) {
			auto a = Bind(n->lkeys[i], l.schema);
			auto b = Bind(n->rkeys[i], r.schema);
			if (a->lifted || b->lifted) {
				Fail(RejectReason::UnsupportedOperator, "join on an unreleased PAC aggregate");
			}
			if (a->kind == ExprKind::Column && b->kind == ExprKind::Column) {
				int la = l.leaf_of_col[size_t(a->index)], lb = r.leaf_of_col[size_t(b->index)];
				auto &ea = l.cols[size_t(a->index)].ent, &eb = r.cols[size_t(b->index)].ent;
				links.push_back({{la, lb}, ea && eb && *ea == *eb});
			}
		}
		Built out;
		out.plan = j;
		out.schema = DeriveNodeSchema(*j, {&l.schema, &r.schema});
		out.cols = l.cols;
		out.cols.insert(out.cols.end(), r.cols.begin(), r.cols.end());
		out.leaf_of_col = l.leaf_of_col;
		out.leaf_of_col.insert(out.leaf_of_col.end(), r.leaf_of_col.begin(), r.leaf_of_col.end());
		if (j->residual) {
			CheckSubqueries(j->residual);
			if (Bind(j->residual, out.schema)->lifted) {
				Fail(RejectReason::UnsupportedOperator, "join condition over an unreleased PAC aggregate");
			}
		}
		return out;
	}

	RwOut RwJoinTree(const PlanPtr &n) {
		std::vector<Leaf> leaves;
		Flatten(n, false, leaves);
		std::vector<size_t> pu_leaves, linked;
		for (size_t i = 0; i < leaves.size(); i++) {
			if (leaves[i].out.pu) {
				pu_leaves.push_back(i);
			}
			if (leaves[i].out.linked) {
				linked.push_back(i);
			}
		}
		if (pu_leaves.size() > 1 || (pu_leaves.size() == 1 && linked.size() > 1)) {
			Fail(RejectReason::UnsupportedOperator, "join between independently aggregated PU inputs");
		}
		if (pu_leaves.size() == 1 && leaves[pu_leaves[0]].nullable) {
			Fail(RejectReason::UnsupportedOperator, "PU data only on the nullable side of an outer join");
		}
		if (pu_leaves.empty() && !linked.empty()) {
			std::optional<size_t> anchor;
			for (size_t i : linked) {
				if (!leaves[i].nullable && (!anchor || leaves[i].out.depth < leaves[*anchor].out.depth)) {
					anchor = i;
				}
			}
			if (!anchor) {
				Fail(RejectReason::UnsupportedOperator, "PU data only on the nullable side of an outer join");
			}
			for (size_t i : linked) {
				if (i == *anchor) {
					continue;
				}
				auto path = *cat_.FkPath(leaves[i].out.table);
				if (!path.empty()) {
					Trace(RuleKind::JoinEliminated, leaves[i].out.plan.get(), path[0].from_table + "→" + path[0].to_table);
				}
			}
			Anchor(leaves[*anchor].out, 0);
		}
		size_t next = 0;
		std::vector<std::pair<std::pair<int, int>, bool>> links;
		Built b = Rebuild(n, leaves, next, links);

		// every PU-linked input must be tied to the others through PAC-link equalities
		std::vector<int> parent(leaves.size());
		std::iota(parent.begin(), parent.end(), 0);
		auto find = [&](int x) {
			while (parent[size_t(x)] != x) {
				x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
			}
			return x;
		};
		for (auto &[pr, ok] : links) {
			if (ok && leaves[size_t(pr.first)].out.linked && leaves[size_t(pr.second)].out.linked) {
				parent[size_t(find(pr.first))] = find(pr.second);
			}
		}
		for (size_t k = 1; k < linked.size(); k++) {
			if (find(int(linked[k])) != find(int(linked[0]))) {
				std::string a = leaves[linked[0]].out.table, c = leaves[linked[k]].out.table;
				Fail(RejectReason::NonLinkJoin, "tables " + a + " and " + c + " are not joined on a PAC link");
			}
		}

		RwOut o;
		o.plan = b.plan;
		o.schema = b.schema;
		o.cols = b.cols;
		for (auto &l : leaves) {
			o.linked |= l.out.linked;
			o.pu |= l.out.pu;
			o.per_pu |= l.out.per_pu;
			o.lifted |= l.out.lifted;
		}
		if (!linked.empty()) {
			o.table = leaves[linked[0]].out.table;
		}
		return o;
	}

	// ---- filters ----

	PlanPtr PassThrough(const RwOut &c, const std::string &replace_pu, ExprPtr pu_expr) {
		auto p = MakeNode(PlanKind::Project);
		p->children = {c.plan};
		for (auto &col : c.schema.columns()) {
			if (col.name == replace_pu && col.qual.empty()) {
				p->exprs.push_back(pu_expr);
			} else {
				p->exprs.push_back(Col(col.qual, col.name));
			}
			p->names.push_back(col.name);
			p->quals.push_back(col.qual);
		}
		return p;
	}

	RwOut RwFilter(const PlanPtr &n) {
		RwOut c = Rw(n->children[0], false);
		CheckSubqueries(n->pred);
		std::vector<ExprPtr> conj, plain, lifted;
		SplitConjuncts(n->pred, conj);
		for (auto &e : conj) {
			(Bind(e, c.schema)->lifted ? lifted : plain).push_back(e);
		}
		PlanPtr plan = c.plan;
		if (!plain.empty()) {
			auto f = Shallow(n);
			f->children = {plan};
			f->pred = JoinConjuncts(plain);
			plan = f;
		}
		if (!lifted.empty()) {
			ExprPtr pred = JoinConjuncts(lifted);
			if (c.pu) {
				RwOut tmp = c;
				tmp.plan = plan;
				auto sel = MakeFunc("pac_select", {Col("", "pu"), pred});
				auto proj = PassThrough(tmp, "pu", sel);
				Trace(RuleKind::SelectInserted, proj.get(), ToSql(pred));
				plan = MakeFilter(proj, MakeBinary(BinOp::Ne, Col("", "pu"), MakeLiteral(Value::Hash(0))));
			} else {
				auto f = MakeFilter(plan, MakeFunc("pac_filter", {pred}));
				Trace(RuleKind::FilterProbabilistic, f.get(), ToSql(pred));
				plan = f;
			}
		}
		c.plan = plan;
		return c;
	}

	// ---- aggregates ----

	RwOut RwAggregate(const PlanPtr &n) {
		RwOut c = Rw(n->children[0], false);
		auto p = Shallow(n);
		p->children = {c.plan};
		std::vector<ExprPtr> bg;
		for (auto &g : n->groups) {
			bg.push_back(Bind(g, c.schema));
			if (bg.back()->lifted) {
				Fail(RejectReason::UnsupportedOperator, "GROUP BY over an unreleased PAC aggregate");
			}
		}
		std::vector<ExprPtr> args;
		for (auto &a : n->aggs) {
			args.push_back(a.arg ? Bind(a.arg, c.schema) : nullptr);
			if (args.back() && args.back()->lifted) {
				Fail(RejectReason::UnsupportedOperator, "aggregate over an unreleased PAC aggregate");
			}
		}
		auto info_of = [&](const ExprPtr &b) {
			ColInfo ci;
			VisitExpr(b, [&](const ExprPtr &x) {
				if (x->kind == ExprKind::Column) {
					ci.prot |= c.cols[size_t(x->index)].prot;
				}
			});
			if (b->kind == ExprKind::Column) {
				ci.ent = c.cols[size_t(b->index)].ent;
			}
			return ci;
		};
		RwOut o;
		o.plan = p;
		if (!c.linked) {
			o.schema = DeriveNodeSchema(*p, {&c.schema});
			for (size_t i = 0; i < n->groups.size(); i++) {
				o.cols.push_back(ColInfo {info_of(bg[i]).prot, std::nullopt});
			}
			o.cols.resize(o.schema.size());
			o.lifted = c.lifted;
			return o;
		}
		if (!c.pu) {
			throw PacError(ErrorCode::Internal, "PU data without a pu column");
		}
		bool determining = false;
		for (auto &b : bg) {
			determining |= info_of(b).ent.has_value();
		}
		if (determining) {
			// one PU per group: ordinary aggregate, pu carried along as a key
			p->groups.push_back(Col("", "pu"));
			p->group_names.push_back("pu");
			p->group_quals.push_back("");
			o.schema = DeriveNodeSchema(*p, {&c.schema});
			for (auto &b : bg) {
				o.cols.push_back(info_of(b));
			}
			o.cols.push_back(ColInfo {});
			for (size_t i = 0; i < n->aggs.size(); i++) {
				bool prot = n->aggs[i].kind != AggKind::Count && n->aggs[i].kind != AggKind::CountStar &&
				            info_of(args[i]).prot;
				o.cols.push_back(ColInfo {prot, std::nullopt});
			}
			// keep pu as the last column for readability
			o.linked = true;
			o.pu = true;
			o.per_pu = true;
			return o;
		}
		for (size_t i = 0; i < bg.size(); i++) {
			if (info_of(bg[i]).prot) {
				Fail(RejectReason::ProtectedGroupKey, "GROUP BY on protected column " + ToSql(n->groups[i]));
			}
		}
		for (size_t i = 0; i < p->aggs.size(); i++) {
			auto &a = p->aggs[i];
			if (args[i] && !IsNumeric(args[i]->type) && a.kind != AggKind::Count) {
				Fail(RejectReason::UnsupportedOperator,
				     std::string(AggKindName(a.kind)) + " over " + TypeName(args[i]->type) + " PU data");
			}
			a.pac = PacMode::Unfused;
			a.pu = Col("", "pu");
			pac_specs_.emplace_back(p.get(), i);
		}
		an_.pac_aggs.insert(n.get());
		o.schema = DeriveNodeSchema(*p, {&c.schema});
		o.cols.resize(o.schema.size());
		o.lifted = true;
		return o;
	}

	// ---- projections ----

	RwOut RwProject(const PlanPtr &n, bool root) {
		RwOut c = Rw(n->children[0], false);
		auto p = Shallow(n);
		p->children = {c.plan};
		std::vector<ExprPtr> bound;
		for (auto &e : n->exprs) {
			CheckSubqueries(e);
			bound.push_back(Bind(e, c.schema));
		}
		auto prot_of = [&](const ExprPtr &b) {
			bool prot = false;
			VisitExpr(b, [&](const ExprPtr &x) {
				if (x->kind == ExprKind::Column && !x->lifted) {
					prot |= c.cols[size_t(x->index)].prot;
				}
			});
			return prot;
		};
		RwOut o;
		o.linked = c.linked;
		o.pu = c.pu;
		o.per_pu = c.per_pu;
		if (c.pu) {
			if (root) {
				for (size_t i = 0; i < bound.size(); i++) {
					if (prot_of(bound[i])) {
						Fail(RejectReason::ProtectedColumnRelease,
						     "protected column released without a PAC aggregate: " + ToSql(n->exprs[i]));
					}
				}
				if (c.per_pu) {
					Fail(RejectReason::ProtectedGroupKey, "result grouped by a PU-determining key without re-aggregation");
				}
				Fail(RejectReason::ProtectedColumnRelease, "unaggregated rows of PU data released");
			}
			for (size_t i = 0; i < bound.size(); i++) {
				ColInfo ci;
				ci.prot = prot_of(bound[i]);
				if (bound[i]->kind == ExprKind::Column) {
					ci.ent = c.cols[size_t(bound[i]->index)].ent;
				}
				o.cols.push_back(ci);
			}
			bool has_pu = false;
			for (auto &nm : p->names) {
				has_pu |= nm == "pu";
			}
			if (!has_pu) {
				p->exprs.push_back(Col("", "pu"));
				p->names.push_back("pu");
				p->quals.push_back("");
				o.cols.push_back(ColInfo {});
				Trace(RuleKind::CtePropagated, p.get(), n->alias.empty() ? "pu" : n->alias);
			}
			o.plan = p;
			o.schema = DeriveNodeSchema(*p, {&c.schema});
			return o;
		}
		if (root) {
			for (size_t i = 0; i < bound.size(); i++) {
				if (prot_of(bound[i])) {
					Fail(RejectReason::ProtectedColumnRelease, "protected column released: " + ToSql(n->exprs[i]));
				}
			}
		}
		o.cols.resize(bound.size());
		bool any_lifted = false;
		for (auto &b : bound) {
			any_lifted |= b->lifted;
		}
		if (!any_lifted || n->subquery_block) {
			o.plan = p;
			o.schema = DeriveNodeSchema(*p, {&c.schema});
			o.lifted = any_lifted;
			return o;
		}

		// release: Filters then the PAC aggregate directly below
		std::vector<PlanNode *> filters;
		PlanNode *agg = c.plan.get();
		while (agg->kind == PlanKind::Filter) {
			filters.push_back(agg);
			agg = agg->children[0].get();
		}
		if (agg->kind != PlanKind::Aggregate) {
			agg = nullptr;
		}
		auto fusable = [&](size_t i) -> int {
			if (!agg || n->exprs[i]->kind != ExprKind::Column) {
				return -1;
			}
			const std::string &nm = bound[i]->name;
			for (size_t k = 0; k < agg->aggs.size(); k++) {
				if (agg->aggs[k].name != nm || agg->aggs[k].pac == PacMode::None) {
					continue;
				}
				for (auto *f : filters) {
					if (RefsColumn(f->pred, nm)) {
						return -1;
					}
				}
				for (size_t j = 0; j < n->exprs.size(); j++) {
					if (n->exprs[j]->kind != ExprKind::Column && RefsColumn(n->exprs[j], nm)) {
						return -1;
					}
				}
				return int(k);
			}
			return -1;
		};
		for (size_t i = 0; i < bound.size(); i++) {
			if (!bound[i]->lifted) {
				continue;
			}
			int k = fusable(i);
			if (k >= 0) {
				auto &spec = agg->aggs[size_t(k)];
				if (spec.pac != PacMode::Fused) {
					spec.pac = PacMode::Fused;
					Trace(RuleKind::AggReplaced, agg, std::string("fused ") + AggKindName(spec.kind));
				}
				p->exprs[i] = MakeFunc("pac_noised", {n->exprs[i], MakeLiteral(Value::Float(AggScale(spec.kind)))});
			} else {
				if (n->exprs[i]->kind != ExprKind::Column) {
					Trace(RuleKind::VectorLifted, p.get(), ToSql(n->exprs[i]));
				}
				p->exprs[i] = MakeFunc("pac_noised", {n->exprs[i], MakeLiteral(Value::Float(1.0))});
			}
		}
		p->release = true;
		an_.pac_releases.insert(n.get());
		o.plan = p;
		o.schema = DeriveNodeSchema(*p, {&c.schema});
		o.linked = false;
		return o;
	}
};

bool AlreadyRewritten(const PlanPtr &p) {
	bool found = false;
	VisitPlan(p, [&](const PlanPtr &n) {
		for (auto &e : n->exprs) {
			VisitExpr(e, [&](const ExprPtr &x) {
				if (x->kind == ExprKind::Func && x->func.rfind("pac_", 0) == 0) {
					found = true;
				}
			});
		}
	});
	return found;
}

bool ScansLinked(const PlanPtr &p, const PrivacyCatalog &cat) {
	bool hit = false;
	auto walk = [&](auto &self, const PlanPtr &n) -> void {
		if (!n) {
			return;
		}
		if (n->kind == PlanKind::Scan && cat.HasTable(n->table) && cat.IsLinked(n->table)) {
			hit = true;
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
		for (auto &c : n->children) {
			self(self, c);
		}
	};
	walk(walk, p);
	return hit;
}

} // namespace

Analysis Analyze(const PlanPtr &normalized, const PrivacyCatalog &catalog) {
	Analysis an;
	an.plan = normalized;
	if (!ScansLinked(normalized, catalog)) {
		bool unsupported = false;
		VisitPlan(normalized, [&](const PlanPtr &n) { unsupported |= n->kind == PlanKind::Unsupported; });
		if (unsupported) {
			throw PacError(ErrorCode::UnsupportedSyntax, "query uses an unsupported operator");
		}
		an.cls = Classification::Inconspicuous();
		return an;
	}
	if (AlreadyRewritten(normalized)) {
		an.cls = Classification::Rewritable();
		return an;
	}
	try {
		Rewriter rw(catalog, an);
		an.plan = rw.Run(normalized);
		an.cls = Classification::Rewritable();
	} catch (const Reject &r) {
		an.cls = Classification::Rejected(r.reason, r.msg);
		an.plan = normalized;
		an.trace.entries.clear();
		an.pac_aggs.clear();
		an.pac_releases.clear();
		an.pu_ctes.clear();
	}
	return an;
}

} // namespace pac
