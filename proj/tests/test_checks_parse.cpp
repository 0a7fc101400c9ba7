#include "doctest.h"

#include <random>

#include "dataops/checks_parse.hpp"

using namespace dataops;

namespace {

ModelUnit model_of(const std::string& name, const std::string& sql,
                   Layer layer = Layer::Intermediate) {
    ModelUnit m;
    m.name = name;
    m.path = "models/" + name + ".sql";
    m.layer = layer;
    m.raw_sql = sql;
    int lines = 0;
    for (char c : sql)
        if (c == '\n') ++lines;
    if (!sql.empty() && sql.back() != '\n') ++lines;
    m.line_count = lines;
    return m;
}

std::vector<Finding> ast_parse(const std::string& sql, const PipelineConfig& cfg) {
    ModelUnit m = model_of("m", sql);
    return check_ast_parse(m, parse_status_for(m), cfg);
}

DependencyGraph empty_graph() { return {}; }

}  // namespace

TEST_CASE("check_ast_parse: one clean select passes") {
    PipelineConfig cfg = default_config();
    CHECK(ast_parse("select 1 as x", cfg).empty());
}

TEST_CASE("check_ast_parse: statement count and kind") {
    PipelineConfig cfg = default_config();
    auto multi = ast_parse("select 1 as x; select 2 as y", cfg);
    REQUIRE(multi.size() == 1);
    CHECK(multi[0].message.find("2 statements") != std::string::npos);

    auto create = ast_parse("create table t as select 1", cfg);
    REQUIRE(create.size() == 1);
    CHECK(create[0].message.find("create") != std::string::npos);

    auto unparseable = ast_parse("with oops", cfg);
    REQUIRE(unparseable.size() == 1);
    CHECK(unparseable[0].message.find("unparseable") != std::string::npos);
}

TEST_CASE("check_ast_parse: complexity budgets are off by default") {
    PipelineConfig cfg = default_config();
    std::string sql =
        "with a as (select 1 as x), b as (select x from a)\n"
        "select x from b union all select x from a";
    CHECK(ast_parse(sql, cfg).empty());
    cfg.max_ctes = 1;
    cfg.max_union_arms = 1;
    auto findings = ast_parse(sql, cfg);
    CHECK(findings.size() == 2);
    cfg.max_ctes.reset();
    cfg.max_union_arms.reset();
    cfg.max_subqueries = 0;
    auto sub = ast_parse("select (select 1) as v", cfg);
    REQUIRE(sub.size() == 1);
    CHECK(sub[0].message.find("subqueries") != std::string::npos);
}

TEST_CASE("check_column_usage: unused CTE columns are flagged") {
    std::string used =
        "with c as (select 1 as x) select c.x as x from c";
    ModelUnit m1 = model_of("m", used);
    CHECK(check_column_usage(m1, sql::parse_model(used)).empty());

    std::string partial =
        "with c as (select 1 as x, 2 as y) select c.x as x from c";
    ModelUnit m2 = model_of("m", partial);
    auto findings = check_column_usage(m2, sql::parse_model(partial));
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("'y'") != std::string::npos);
}

TEST_CASE("check_column_usage: select star uses everything") {
    std::string starred =
        "with c as (select 1 as x, 2 as y) select * from c";
    ModelUnit m = model_of("m", starred);
    CHECK(check_column_usage(m, sql::parse_model(starred)).empty());

    std::string star_defined =
        "with c as (select * from t) select c.x as x from c";
    ModelUnit m2 = model_of("m", star_defined);
    CHECK(check_column_usage(m2, sql::parse_model(star_defined)).empty());
}

TEST_CASE("check_column_usage: unqualified downstream use counts") {
    std::string sql =
        "with c as (select 1 as x, 2 as y)\n"
        "select x, y from c";
    ModelUnit m = model_of("m", sql);
    CHECK(check_column_usage(m, sql::parse_model(sql)).empty());
}

TEST_CASE("check_column_usage: dead CTEs are suppressed here") {
    std::string sql =
        "with live as (select 1 as x), dead as (select 2 as unused_col)\n"
        "select live.x as x from live";
    ModelUnit m = model_of("m", sql);
    CHECK(check_column_usage(m, sql::parse_model(sql)).empty());
    auto dead = check_dead_code(m, sql::parse_model(sql));
    REQUIRE(dead.size() == 1);
    CHECK(dead[0].message.find("'dead'") != std::string::npos);
}

TEST_CASE("check_dead_code: reachability is transitive") {
    std::string chained =
        "with a as (select 1 as x), b as (select a.x as x from a)\n"
        "select b.x as x from b";
    ModelUnit m = model_of("m", chained);
    CHECK(check_dead_code(m, sql::parse_model(chained)).empty());

    std::string orphaned =
        "with a as (select 1 as x), b as (select 2 as y)\n"
        "select a.x as x from a";
    ModelUnit m2 = model_of("m", orphaned);
    auto findings = check_dead_code(m2, sql::parse_model(orphaned));
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("'b'") != std::string::npos);
}

TEST_CASE("check_dead_code: matches brute-force reachability on random CTE graphs") {
    std::mt19937 rng(31337);
    for (int round = 0; round < 600; ++round) {
        std::uniform_int_distribution<int> count(1, 8);
        int n = count(rng);
        // dep[i] targets earlier CTEs only, as SQL scoping requires
        std::vector<std::vector<int>> deps(n);
        for (int i = 1; i < n; ++i) {
            std::uniform_int_distribution<int> how_many(0, std::min(i, 3));
            int k = how_many(rng);
            std::uniform_int_distribution<int> pick(0, i - 1);
            std::set<int> chosen;
            for (int d = 0; d < k; ++d) chosen.insert(pick(rng));
            deps[i].assign(chosen.begin(), chosen.end());
        }
        std::uniform_int_distribution<int> final_pick(0, n - 1);
        std::set<int> final_uses = {final_pick(rng)};
        if (n > 2 && round % 3 == 0) final_uses.insert(final_pick(rng));

        std::string sql = "with ";
        for (int i = 0; i < n; ++i) {
            if (i) sql += ", ";
            sql += "c" + std::to_string(i) + " as (select 1 as v";
            if (!deps[i].empty()) {
                sql += " from ";
                bool first = true;
                for (int d : deps[i]) {
                    if (!first) sql += ", ";
                    first = false;
                    sql += "c" + std::to_string(d);
                }
            }
            sql += ")";
        }
        sql += " select 1 as out_v from ";
        {
            bool first = true;
            for (int f : final_uses) {
                if (!first) sql += ", ";
                first = false;
                sql += "c" + std::to_string(f);
            }
        }

        // oracle: reachable set via DFS from the final select
        std::set<int> reachable;
        std::vector<int> stack(final_uses.begin(), final_uses.end());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (!reachable.insert(v).second) continue;
            for (int d : deps[v]) stack.push_back(d);
        }

        ModelUnit m = model_of("m", sql);
        auto findings = check_dead_code(m, sql::parse_model(sql));
        std::set<std::string> flagged;
        for (const auto& f : findings) {
            size_t open = f.message.find('\'');
            size_t close = f.message.find('\'', open + 1);
            flagged.insert(f.message.substr(open + 1, close - open - 1));
        }
        std::set<std::string> expected;
        for (int i = 0; i < n; ++i)
            if (!reachable.count(i)) expected.insert("c" + std::to_string(i));
        REQUIRE(flagged == expected);
    }
}

TEST_CASE("check_model_functions: staging discipline") {
    DependencyGraph g = empty_graph();

    std::string ok = "select s.a as a from {{ source('raw', 'orders') }} s";
    ModelUnit stg = model_of("stg_orders", ok, Layer::Staging);
    CHECK(check_model_functions(stg, sql::parse_model(ok), g).empty());

    std::string reffy = "select r.a as a from {{ ref('other_model') }} r";
    ModelUnit stg2 = model_of("stg_two", reffy, Layer::Staging);
    auto ref_findings = check_model_functions(stg2, sql::parse_model(reffy), g);
    REQUIRE(ref_findings.size() == 1);
    CHECK(ref_findings[0].message.find("sources only") != std::string::npos);

    std::string raw = "select t.a as a from warehouse_table t";
    ModelUnit stg3 = model_of("stg_three", raw, Layer::Staging);
    auto raw_findings = check_model_functions(stg3, sql::parse_model(raw), g);
    REQUIRE(raw_findings.size() == 1);
    CHECK(raw_findings[0].message.find("without a source() macro") != std::string::npos);
}

TEST_CASE("check_model_functions: non-staging models never call source()") {
    DependencyGraph g = empty_graph();
    std::string sql = "select s.a as a from {{ source('raw', 'orders') }} s";
    ModelUnit intm = model_of("int_x", sql, Layer::Intermediate);
    auto findings = check_model_functions(intm, sql::parse_model(sql), g);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("only staging models read sources") != std::string::npos);
}

TEST_CASE("check_model_functions: one staging model per source") {
    DependencyGraph g;
    for (const char* name : {"stg_orders", "stg_orders_v2"}) {
        g.nodes.insert(model_node(name));
        g.layer_of[name] = Layer::Staging;
    }
    g.nodes.insert(source_node("raw", "orders"));
    g.edges = {{model_node("stg_orders"), source_node("raw", "orders")},
               {model_node("stg_orders_v2"), source_node("raw", "orders")}};

    std::string sql = "select s.a as a from {{ source('raw', 'orders') }} s";
    ModelUnit first = model_of("stg_orders", sql, Layer::Staging);
    ModelUnit second = model_of("stg_orders_v2", sql, Layer::Staging);
    CHECK(check_model_functions(first, sql::parse_model(sql), g).empty());
    auto findings = check_model_functions(second, sql::parse_model(sql), g);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("already staged by model 'stg_orders'") !=
          std::string::npos);
}

TEST_CASE("check_model_length: inclusive boundary") {
    PipelineConfig cfg = default_config();
    CHECK(cfg.max_model_lines == 300);

    std::string exactly(299, '\n');
    ModelUnit at_limit = model_of("m", "select 1 as x\n" + exactly);
    CHECK(at_limit.line_count == 300);
    CHECK(check_model_length(at_limit, cfg).empty());

    ModelUnit over = model_of("m", "select 1 as x\n" + exactly + "-- one more\n");
    CHECK(over.line_count == 301);
    auto findings = check_model_length(over, cfg);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("301") != std::string::npos);
    CHECK(findings[0].message.find("300") != std::string::npos);

    ModelUnit tiny = model_of("m", "select 1 as x\n");
    CHECK(check_model_length(tiny, cfg).empty());
}
