#include "pac/catalog.hpp"
#include "pac/datagen.hpp"
#include "pac/engine.hpp"
#include "pac/errors.hpp"
#include "pac/hash.hpp"
#include "pac/parser.hpp"
#include "pac/rewrite.hpp"
#include "pac/worlds.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pac;

namespace {

py::object ToPy(const Value &v) {
	switch (v.type()) {
	case Type::Null:
		return py::none();
	case Type::Int64:
		return py::int_(v.as_int());
	case Type::Float64:
		return py::float_(v.as_float());
	case Type::Bool:
		return py::bool_(v.as_bool());
	case Type::Hash:
		return py::int_(v.as_hash());
	default:
		return py::str(v.ToString());
	}
}

py::dict ToPy(const Relation &r) {
	py::list cols, rows;
	for (size_t c = 0; c < r.schema.size(); c++) {
		cols.append(r.schema[c].name);
	}
	for (size_t i = 0; i < r.rows(); i++) {
		py::list row;
		for (auto &c : r.cols) {
			row.append(ToPy(c[i]));
		}
		rows.append(py::tuple(row));
	}
	py::dict d;
	d["columns"] = cols;
	d["rows"] = rows;
	return d;
}

// catalog plus loaded tables; the handle python holds
struct Session {
	PrivacyCatalog cat;
	Database db;
};

ExecConfig Config(uint64_t seed, bool noise, double mi) {
	ExecConfig c;
	c.seed = seed;
	c.noise = noise;
	c.budget = mi;
	return c;
}

const char *KindName(Classification::Kind k) {
	switch (k) {
	case Classification::Kind::Inconspicuous:
		return "Inconspicuous";
	case Classification::Kind::Rejected:
		return "Rejected";
	default:
		return "Rewritable";
	}
}

} // namespace

PYBIND11_MODULE(_core, m) {
	m.doc() = "PAC-private SQL over in-memory tables";

	static py::exception<PacError> error(m, "PacError");
	py::register_exception_translator([](std::exception_ptr p) {
		try {
			if (p) {
				std::rethrow_exception(p);
			}
		} catch (const PacError &e) {
			py::object exc = error;
			py::object inst = exc(std::string(ErrorCodeName(e.code())) + ": " + e.what());
			inst.attr("code") = ErrorCodeName(e.code());
			PyErr_SetObject(error.ptr(), inst.ptr());
		}
	});

	py::class_<Session>(m, "Database")
	    .def_static(
	        "load",
	        [](const std::string &ddl, const std::string &data_dir) {
		        auto s = std::make_unique<Session>();
		        s->cat.ParseDdl(ddl);
		        s->db = Database::Load(s->cat, data_dir);
		        return s;
	        },
	        py::arg("ddl"), py::arg("data_dir"))
	    .def_static(
	        "mini_tpch",
	        [](size_t rows, uint64_t seed) {
		        auto s = std::make_unique<Session>();
		        s->cat.ParseDdl(MiniTpchDdl());
		        for (auto &[name, rel] : GenerateMiniTpch(rows, seed)) {
			        s->db.Put(name, std::move(rel));
		        }
		        return s;
	        },
	        py::arg("rows") = 10000, py::arg("seed") = 1)
	    .def("tables",
	         [](const Session &s) {
		         std::vector<std::string> out;
		         for (auto &[name, rel] : s.db.tables()) {
			         out.push_back(name);
		         }
		         return out;
	         })
	    .def(
	        "run",
	        [](const Session &s, const std::string &sql, uint64_t seed, bool noise, double mi) {
		        QueryOutcome out;
		        {
			        py::gil_scoped_release nogil;
			        out = RunQuery(sql, s.cat, s.db, Config(seed, noise, mi));
		        }
		        py::dict d = ToPy(out.result);
		        d["classification"] = KindName(out.analysis.cls.kind);
		        if (out.rejected()) {
			        d["reason"] = RejectReasonName(out.analysis.cls.reason);
			        d["message"] = out.analysis.cls.message;
		        }
		        d["cells_released"] = out.cells_released;
		        return d;
	        },
	        py::arg("sql"), py::arg("seed") = 1, py::arg("noise") = true, py::arg("mi") = kDefaultBudget)
	    .def(
	        "oracle",
	        [](const Session &s, const std::string &sql, uint64_t seed, bool noise, double mi) {
		        Relation r;
		        {
			        py::gil_scoped_release nogil;
			        r = RunOracle(sql, s.cat, s.db, Config(seed, noise, mi));
		        }
		        return ToPy(r);
	        },
	        py::arg("sql"), py::arg("seed") = 1, py::arg("noise") = true, py::arg("mi") = kDefaultBudget)
	    .def(
	        "exact", [](const Session &s, const std::string &sql) { return ToPy(RunExact(sql, s.cat, s.db)); },
	        py::arg("sql"))
	    .def(
	        "explain",
	        [](const Session &s, const std::string &sql, bool json) {
		        auto a = Analyze(PrepareQuery(sql, s.cat), s.cat);
		        return json ? PlanToJson(a.plan, a.trace) : Explain(a.plan, a.trace);
	        },
	        py::arg("sql"), py::arg("json") = false)
	    .def(
	        "diff",
	        [](const Session &s, const std::string &sql, size_t key_cols, uint64_t seed, double mi) {
		        auto rep = PacDiff(sql, s.cat, s.db, Config(seed, true, mi), key_cols);
		        py::dict d;
		        d["mape"] = rep.mape;
		        d["precision"] = rep.precision;
		        d["recall"] = rep.recall;
		        d["matched"] = rep.matched;
		        d["missing"] = rep.missing;
		        d["spurious"] = rep.spurious;
		        return d;
	        },
	        py::arg("sql"), py::arg("key_cols") = 1, py::arg("seed") = 1, py::arg("mi") = kDefaultBudget);

	m.def("mia_bound", &MiaBound, py::arg("prior"), py::arg("total_mi"));
	m.def(
	    "pac_hash", [](int64_t key, uint64_t salt) { return PacHash(Value::Int(key), salt); }, py::arg("key"),
	    py::arg("salt"));
	m.def(
	    "gen_values",
	    [](const std::string &dist, size_t rows, uint64_t seed) {
		    auto d = ParseDistribution(dist);
		    if (!d) {
			    throw PacError(ErrorCode::DataError, "unknown distribution " + dist);
		    }
		    return GenerateValues(*d, rows, seed);
	    },
	    py::arg("dist"), py::arg("rows"), py::arg("seed") = 1);
	m.def("mini_tpch_ddl", &MiniTpchDdl);
	m.attr("DEFAULT_MI") = kDefaultBudget;
}
