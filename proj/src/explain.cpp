#include "pac/errors.hpp"
#include "pac/rewrite.hpp"

#include <json.hpp>
#include <map>
#include <sstream>

namespace pac {

std::string Explain(const PlanPtr &plan, const RewriteTrace &trace) {
	std::ostringstream out;
	out << RenderPlan(plan);
	out << trace.entries.size() << (trace.entries.size() == 1 ? " rewrite" : " rewrites") << "\n";
	for (auto &e : trace.entries) {
		out << "+ " << e.ToString() << " @" << e.node << "\n";
	}
	return out.str();
}

namespace {

using nlohmann::json;

json ExprJson(const ExprPtr &e);

json PlanJson(const PlanPtr &p) {
	json j;
	j["id"] = p->id;
	j["op"] = PlanKindName(p->kind);
	switch (p->kind) {
	case PlanKind::Scan:
	case PlanKind::CteRef:
		j["table"] = p->table;
		j["alias"] = p->alias;
		break;
	case PlanKind::Filter:
		j["pred"] = ExprJson(p->pred);
		break;
	case PlanKind::Project: {
		json cols = json::array();
		for (size_t i = 0; i < p->exprs.size(); i++) {
			cols.push_back({{"name", p->names[i]}, {"qual", p->quals[i]}, {"expr", ExprJson(p->exprs[i])}});
		}
		j["columns"] = cols;
		j["release"] = p->release;
		j["subquery"] = p->subquery_block;
		break;
	}
	case PlanKind::Join: {
		j["kind"] = p->join == JoinKind::Left ? "left" : "inner";
		json keys = json::array();
		for (size_t i = 0; i < p->lkeys.size(); i++) {
			keys.push_back({ExprJson(p->lkeys[i]), ExprJson(p->rkeys[i])});
		}
		j["keys"] = keys;
		j["residual"] = p->residual ? ExprJson(p->residual) : json();
		break;
	}
	case PlanKind::Aggregate: {
		json groups = json::array();
		for (size_t i = 0; i < p->groups.size(); i++) {
			groups.push_back({{"name", i < p->group_names.size() ? p->group_names[i] : ""}, {"expr", ExprJson(p->groups[i])}});
		}
		j["groups"] = groups;
		json aggs = json::array();
		for (auto &a : p->aggs) {
			aggs.push_back({{"kind", AggKindName(a.kind)},
			                {"name", a.name},
			                {"arg", a.arg ? ExprJson(a.arg) : json()},
			                {"pac", PacModeName(a.pac)},
			                {"pu", a.pu ? ExprJson(a.pu) : json()}});
		}
		j["aggs"] = aggs;
		break;
	}
	case PlanKind::Sort: {
		json keys = json::array();
		for (auto &k : p->sort) {
			keys.push_back({{"expr", ExprJson(k.expr)}, {"desc", k.desc}});
		}
		j["keys"] = keys;
		break;
	}
	case PlanKind::Limit:
		j["limit"] = p->limit;
		break;
	case PlanKind::With:
		j["ctes"] = p->cte_names;
		break;
	case PlanKind::SetOp:
	case PlanKind::Unsupported:
		j["note"] = p->note;
		break;
	case PlanKind::Values:
		break;
	}
	json kids = json::array();
	for (auto &c : p->children) {
		kids.push_back(PlanJson(c));
	}
	j["children"] = kids;
	return j;
}

json ExprJson(const ExprPtr &e) {
	json j;
	j["sql"] = ToSql(e);
	if (e->subquery) {
		j["subquery"] = PlanJson(e->subquery);
	}
	return j;
}

} // namespace

std::string PlanToJson(const PlanPtr &plan, const RewriteTrace &trace) {
	json j;
	j["plan"] = PlanJson(plan);
	json t = json::array();
	for (auto &e : trace.entries) {
		t.push_back({{"rule", RuleKindName(e.rule)}, {"node", e.node}, {"detail", e.detail}});
	}
	j["trace"] = t;
	return j.dump(2);
}

namespace {

struct Validator {
	const PrivacyCatalog &cat;
	std::vector<std::map<std::string, Schema>> ctes;

	[[noreturn]] void Bad(const std::string &m) {
		throw PacError(ErrorCode::Internal, "rewritten plan invalid: " + m);
	}

	Schema Check(const PlanPtr &p) {
		std::vector<Schema> kids;
		if (p->kind == PlanKind::With) {
			ctes.emplace_back();
			for (size_t i = 0; i + 1 < p->children.size(); i++) {
				ctes.back()[p->cte_names[i]] = Check(p->children[i]);
			}
			Schema s = Check(p->children.back());
			ctes.pop_back();
			return s;
		}
		for (auto &c : p->children) {
			kids.push_back(Check(c));
		}
		Schema out;
		if (p->kind == PlanKind::Scan) {
			out = cat.Table(p->table).schema;
			for (size_t i = 0; i < out.size(); i++) {
				out[i].qual = p->alias;
			}
		} else if (p->kind == PlanKind::CteRef) {
			for (auto it = ctes.rbegin(); it != ctes.rend(); ++it) {
				if (it->count(p->table)) {
					out = it->at(p->table);
					break;
				}
			}
			for (size_t i = 0; i < out.size(); i++) {
				if (out[i].name != "pu") {
					out[i].qual = p->alias;
				}
			}
		} else if (p->kind == PlanKind::Unsupported) {
			return out;
		} else {
			std::vector<const Schema *> ptrs;
			for (auto &k : kids) {
				ptrs.push_back(&k);
			}
			out = DeriveNodeSchema(*p, ptrs);
		}
		int pus = 0;
		for (auto &c : out.columns()) {
			pus += c.name == "pu" && c.qual.empty();
		}
		// single owner: one PU hash per row
		if (pus > 1) {
			Bad("node " + std::to_string(p->id) + " carries " + std::to_string(pus) + " pu columns");
		}
		if (p->kind == PlanKind::Aggregate) {
			for (auto &a : p->aggs) {
				if (a.pac == PacMode::None) {
					continue;
				}
				if (!a.pu || Bind(a.pu, kids[0])->type != Type::Hash) {
					Bad("PAC aggregate " + a.name + " without a pu input");
				}
			}
		}
		if (p->kind == PlanKind::Project) {
			// fused aggregates are only read bare by the release directly above
			const PlanNode *below = p->children[0].get();
			std::vector<const PlanNode *> filters;
			while (below->kind == PlanKind::Filter) {
				filters.push_back(below);
				below = below->children[0].get();
			}
			if (below->kind == PlanKind::Aggregate) {
				for (auto &a : below->aggs) {
					if (a.pac != PacMode::Fused) {
						continue;
					}
					for (auto &e : p->exprs) {
						VisitExpr(e, [&](const ExprPtr &x) {
							if (x->kind == ExprKind::Func && x->func == "pac_noised") {
								return;
							}
							for (auto &arg : x->args) {
								if (x->kind != ExprKind::Func && arg->kind == ExprKind::Column && arg->name == a.name) {
									Bad("fused aggregate " + a.name + " used inside an expression");
								}
							}
						});
					}
				}
			}
		}
		return out;
	}
};

} // namespace

void ValidateRewritten(const PlanPtr &plan, const PrivacyCatalog &catalog) {
	Validator v {catalog, {}};
	v.Check(plan);
}

} // namespace pac
