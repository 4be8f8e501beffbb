#pragma once

#include <string>
#include <vector>

namespace pactest {

struct CorpusQuery {
	std::string name;
	std::string sql;
};

// privatized queries over the mini schema; every one is Rewritable
inline const std::vector<CorpusQuery> &Corpus() {
	static const std::vector<CorpusQuery> q = {
	    {"q01",
	     "SELECT l_returnflag, l_linestatus, sum(l_quantity) AS sum_qty, sum(l_extendedprice) AS sum_base_price, "
	     "sum(l_extendedprice * (1 - l_discount)) AS sum_disc_price, "
	     "sum(l_extendedprice * (1 - l_discount) * (1 + l_tax)) AS sum_charge, avg(l_quantity) AS avg_qty, "
	     "avg(l_extendedprice) AS avg_price, avg(l_discount) AS avg_disc, count(*) AS count_order "
	     "FROM lineitem WHERE l_shipdate <= DATE '1998-12-01' - 90 "
	     "GROUP BY l_returnflag, l_linestatus ORDER BY l_returnflag, l_linestatus"},
	    {"q06",
	     "SELECT sum(l_extendedprice * l_discount) AS revenue FROM lineitem "
	     "WHERE l_shipdate >= DATE '1994-01-01' AND l_shipdate < DATE '1995-01-01' "
	     "AND l_discount BETWEEN 0.05 AND 0.07 AND l_quantity < 24"},
	    {"q08_ratio",
	     "SELECT extract(year FROM o_orderdate) AS o_year, "
	     "sum(CASE WHEN n_name = 'BRAZIL' THEN l_extendedprice * (1 - l_discount) ELSE 0 END) / "
	     "sum(l_extendedprice * (1 - l_discount)) AS mkt_share "
	     "FROM lineitem, orders, supplier, nation "
	     "WHERE l_orderkey = o_orderkey AND l_suppkey = s_suppkey AND s_nationkey = n_nationkey "
	     "GROUP BY extract(year FROM o_orderdate) ORDER BY o_year"},
	    {"q13",
	     "SELECT c_count, count(*) AS custdist FROM ("
	     "SELECT c_custkey, count(o_orderkey) AS c_count FROM customer LEFT JOIN orders ON c_custkey = o_custkey "
	     "GROUP BY c_custkey) AS c_orders GROUP BY c_count ORDER BY custdist DESC, c_count DESC"},
	    {"q15",
	     "WITH revenue AS (SELECT l_suppkey AS supplier_no, sum(l_extendedprice * (1 - l_discount)) AS total_revenue "
	     "FROM lineitem WHERE l_shipdate >= DATE '1996-01-01' AND l_shipdate < DATE '1996-04-01' GROUP BY l_suppkey) "
	     "SELECT s_suppkey, s_name, total_revenue FROM supplier, revenue "
	     "WHERE s_suppkey = supplier_no AND total_revenue = (SELECT max(total_revenue) FROM revenue) "
	     "ORDER BY s_suppkey"},
	    {"q17",
	     "SELECT sum(l_extendedprice) / 7.0 AS avg_yearly FROM lineitem, part "
	     "WHERE p_partkey = l_partkey AND p_brand = 'Brand#23' AND p_container = 'MED BOX' "
	     "AND l_quantity < (SELECT 0.2 * avg(l_quantity) FROM lineitem WHERE l_partkey = p_partkey)"},
	    {"count_all", "SELECT count(*) AS n FROM lineitem"},
	    {"all_kinds",
	     "SELECT count(*) AS n, sum(l_quantity) AS q, avg(l_extendedprice) AS p, min(l_discount) AS lo, "
	     "max(l_tax) AS hi FROM lineitem"},
	    {"count_by_mode", "SELECT l_shipmode, count(*) AS n FROM lineitem GROUP BY l_shipmode ORDER BY l_shipmode"},
	    {"orders_by_priority",
	     "SELECT o_orderpriority, count(*) AS n, sum(o_totalprice) AS tot FROM orders "
	     "GROUP BY o_orderpriority ORDER BY o_orderpriority"},
	    {"customer_avg",
	     "SELECT c_mktsegment, count(*) AS n, avg(c_acctbal) AS bal FROM customer "
	     "GROUP BY c_mktsegment ORDER BY c_mktsegment"},
	    {"customer_minmax",
	     "SELECT c_nationkey, min(c_acctbal) AS lo, max(c_acctbal) AS hi FROM customer "
	     "GROUP BY c_nationkey ORDER BY c_nationkey"},
	    {"sum_by_year",
	     "SELECT extract(year FROM l_shipdate) AS y, sum(l_quantity) AS q FROM lineitem "
	     "GROUP BY extract(year FROM l_shipdate) ORDER BY y"},
	    {"nation_revenue",
	     "SELECT n_name, sum(l_extendedprice) AS rev FROM lineitem, supplier, nation "
	     "WHERE l_suppkey = s_suppkey AND s_nationkey = n_nationkey GROUP BY n_name ORDER BY n_name"},
	    {"flag_after_1995",
	     "SELECT l_returnflag, count(*) AS n FROM lineitem, orders WHERE l_orderkey = o_orderkey "
	     "AND o_orderdate >= DATE '1995-01-01' GROUP BY l_returnflag ORDER BY l_returnflag"},
	    {"segment_quantity",
	     "SELECT c_mktsegment, sum(l_quantity) AS q FROM customer, orders, lineitem "
	     "WHERE c_custkey = o_custkey AND o_orderkey = l_orderkey GROUP BY c_mktsegment ORDER BY c_mktsegment"},
	    {"above_average",
	     "SELECT count(*) AS n FROM orders WHERE o_totalprice > (SELECT avg(o_totalprice) FROM orders)"},
	    {"lifted_arith",
	     "SELECT l_linestatus, avg(l_quantity) * 2 AS a2, sum(l_quantity) / count(*) AS ratio FROM lineitem "
	     "GROUP BY l_linestatus ORDER BY l_linestatus"},
	    {"having_sum",
	     "SELECT p_brand, count(*) AS n FROM lineitem, part WHERE l_partkey = p_partkey "
	     "GROUP BY p_brand HAVING sum(l_quantity) > 1000 ORDER BY p_brand"},
	    {"minmax_having",
	     "SELECT l_shipmode, min(l_quantity) AS mn, max(l_extendedprice) AS mx, count(l_orderkey) AS c "
	     "FROM lineitem GROUP BY l_shipmode HAVING count(*) > 100"},
	    {"case_sum",
	     "SELECT sum(CASE WHEN l_shipmode = 'AIR' THEN 1 ELSE 0 END) AS air, count(*) AS n FROM lineitem"},
	    {"left_join_count",
	     "SELECT c_mktsegment, count(o_orderkey) AS n FROM customer LEFT JOIN orders ON c_custkey = o_custkey "
	     "GROUP BY c_mktsegment ORDER BY c_mktsegment"},
	    {"status_stats",
	     "SELECT o_orderstatus, min(o_totalprice) AS lo, max(o_totalprice) AS hi, avg(o_totalprice) AS mean "
	     "FROM orders GROUP BY o_orderstatus ORDER BY o_orderstatus"},
	    {"unit_price",
	     "SELECT l_shipmode, sum(l_extendedprice) / sum(l_quantity) AS unit FROM lineitem "
	     "GROUP BY l_shipmode ORDER BY l_shipmode"},
	    {"filtered_count", "SELECT count(*) AS n FROM lineitem WHERE l_quantity > 45"},
	    {"pu_filter_join",
	     "SELECT o_orderstatus, count(*) AS n FROM orders, customer WHERE o_custkey = c_custkey "
	     "AND c_mktsegment = 'BUILDING' GROUP BY o_orderstatus ORDER BY o_orderstatus"},
	};
	return q;
}

// unlinked-only queries: pass through untouched
inline const std::vector<CorpusQuery> &PassthroughCorpus() {
	static const std::vector<CorpusQuery> q = {
	    {"nations", "SELECT n_name FROM nation ORDER BY n_name"},
	    {"nation_suppliers",
	     "SELECT n_name, count(*) AS n, sum(s_acctbal) AS bal FROM supplier, nation WHERE s_nationkey = n_nationkey "
	     "GROUP BY n_name ORDER BY n DESC, n_name"},
	    {"brands",
	     "SELECT p_brand, avg(p_retailprice) AS price, min(p_size) AS lo, max(p_size) AS hi FROM part "
	     "WHERE p_size > 10 GROUP BY p_brand HAVING count(*) > 2 ORDER BY p_brand LIMIT 7"},
	    {"expensive_parts",
	     "SELECT p_partkey, p_name, p_retailprice FROM part WHERE p_retailprice > (SELECT avg(p_retailprice) FROM part) "
	     "ORDER BY p_retailprice DESC, p_partkey LIMIT 10"},
	    {"case_expr",
	     "SELECT s_suppkey, CASE WHEN s_acctbal > 5000 THEN 'rich' ELSE 'poor' END AS k, s_acctbal / 0 AS z "
	     "FROM supplier WHERE s_name LIKE 'Supplier#00000001%' ORDER BY s_suppkey"},
	    {"union_all",
	     "SELECT n_name AS x FROM nation WHERE n_regionkey = 1 UNION ALL SELECT s_name AS x FROM supplier "
	     "WHERE s_suppkey < 4"},
	    {"left_join",
	     "SELECT n_name, s_suppkey FROM nation LEFT JOIN supplier ON n_nationkey = s_nationkey AND s_acctbal > 9000 "
	     "ORDER BY n_name, s_suppkey"},
	    {"cte",
	     "WITH big AS (SELECT p_partkey, p_size FROM part WHERE p_size > 45) SELECT count(*) AS n, sum(p_size) AS s "
	     "FROM big"},
	};
	return q;
}

} // namespace pactest
