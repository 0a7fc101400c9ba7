#include "doctest.h"

#include <random>

#include "dataops/parser.hpp"

using namespace dataops::sql;

TEST_CASE("parser: cte plus final select") {
    SqlAst ast = parse_model("with a as (select 1 as x) select x from a");
    REQUIRE(ast.statements.size() == 1);
    const Statement& st = ast.statements[0];
    CHECK(st.kind == StatementKind::Select);
    REQUIRE(st.ctes.size() == 1);
    CHECK(st.ctes[0].name == "a");
    REQUIRE(st.final_select.has_value());
    REQUIRE(st.final_select->from_relations.size() == 1);
    CHECK(st.final_select->from_relations[0].target == RelationRef::Target::Cte);
    CHECK(st.final_select->from_relations[0].name == "a");
    REQUIRE(st.ctes[0].body.select_items.size() == 1);
    CHECK(st.ctes[0].body.select_items[0].alias == "x");
    CHECK(st.final_select->referenced_columns.count("x") == 1);
}

TEST_CASE("parser: macro relation and star item") {
    SqlAst ast = parse_model("select * from {{ ref('stg_orders') }}");
    REQUIRE(ast.macro_refs.size() == 1);
    CHECK(ast.macro_refs[0].kind == MacroRef::Kind::Ref);
    CHECK(ast.macro_refs[0].args == std::vector<std::string>{"stg_orders"});
    const Statement& st = ast.statements.at(0);
    REQUIRE(st.final_select.has_value());
    REQUIRE(st.final_select->select_items.size() == 1);
    CHECK(st.final_select->select_items[0].is_star);
    REQUIRE(st.final_select->from_relations.size() == 1);
    CHECK(st.final_select->from_relations[0].target == RelationRef::Target::Macro);
    CHECK(st.final_select->from_relations[0].name == "stg_orders");
}

TEST_CASE("parser: non-select statements take their kind from the first keyword") {
    CHECK(parse_model("delete from t").statements.at(0).kind == StatementKind::Delete);
    CHECK(parse_model("create table t as select 1").statements.at(0).kind ==
          StatementKind::Create);
    CHECK(parse_model("insert into t values (1)").statements.at(0).kind ==
          StatementKind::Insert);
    CHECK(parse_model("update t set a = 1").statements.at(0).kind == StatementKind::Update);
    CHECK(parse_model("vacuum t").statements.at(0).kind == StatementKind::Other);
    CHECK_FALSE(parse_model("delete from t").statements.at(0).final_select.has_value());
}

TEST_CASE("parser: source macro and arg arity") {
    SqlAst ast = parse_model("select s.a as a from {{ source('raw', 'orders') }} s");
    REQUIRE(ast.macro_refs.size() == 1);
    CHECK(ast.macro_refs[0].kind == MacroRef::Kind::Source);
    CHECK(ast.macro_refs[0].target() == "raw.orders");
    CHECK(ast.unsupported_macros.empty());

    SqlAst bad = parse_model("select * from {{ ref('a', 'b') }}");
    CHECK(bad.macro_refs.empty());
    REQUIRE(bad.unsupported_macros.size() == 1);

    SqlAst cfg = parse_model("{{ config(materialized='table') }} select 1 as x");
    CHECK(cfg.macro_refs.empty());
    CHECK(cfg.unsupported_macros.size() == 1);
}

TEST_CASE("parser: aliases explicit, implicit, and absent") {
    SqlAst ast = parse_model(
        "select a.order_id as order_key, count(*) cnt, b.raw_col, 1 + 2 from a, b");
    const auto& items = ast.statements.at(0).final_select->select_items;
    REQUIRE(items.size() == 4);
    CHECK(items[0].alias == "order_key");
    CHECK(items[1].alias == "cnt");
    CHECK_FALSE(items[2].alias.has_value());
    CHECK(items[2].bare_column == "raw_col");
    CHECK_FALSE(items[3].alias.has_value());
    CHECK_FALSE(items[3].bare_column.has_value());
}

TEST_CASE("parser: qualified column refs bind through relation aliases") {
    SqlAst ast = parse_model(
        "with sales as (select 1 as amount, 2 as region from t)\n"
        "select s.amount from sales s where s.region = 'west'");
    const auto& body = *ast.statements.at(0).final_select;
    CHECK(body.referenced_columns.count("sales.amount") == 1);
    CHECK(body.referenced_columns.count("sales.region") == 1);
}

TEST_CASE("parser: unresolvable qualifiers degrade to bare column references") {
    SqlAst ast = parse_model("select x.alpha from ext_table x");
    const auto& body = *ast.statements.at(0).final_select;
    CHECK(body.referenced_columns.count("alpha") == 1);
}

TEST_CASE("parser: set operations, subqueries, nested with") {
    SqlAst ast = parse_model(
        "select a from t1 union all select b from t2 union select c from t3");
    CHECK(ast.statements.at(0).final_select->set_op_arms == 3);
    // Items come from the first arm only; references come from all arms.
    CHECK(ast.statements.at(0).final_select->select_items.size() == 1);
    CHECK(ast.statements.at(0).final_select->referenced_columns.count("c") == 1);

    SqlAst sub = parse_model(
        "select a from (select a from inner_t) s where a in (select v from lookup)");
    CHECK(sub.statements.at(0).final_select->subquery_count == 2);

    SqlAst nested = parse_model(
        "with outer_cte as (with inner_cte as (select 1 as x) select x from inner_cte)\n"
        "select x from outer_cte");
    REQUIRE(nested.statements.at(0).ctes.size() == 1);  // inner stays local
    CHECK(nested.statements.at(0).ctes[0].body.subquery_count >= 1);
}

TEST_CASE("parser: with-and-no-body is a located parse error") {
    CHECK_THROWS_AS(parse_model("with a as (select 1)"), ParseError);
    CHECK_THROWS_AS(parse_model("with a as select 1"), ParseError);
    CHECK_THROWS_AS(parse_model("select 1 )"), ParseError);
    try {
        parse_model("with a as (select 1)\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line >= 1);
    }
}

TEST_CASE("parser: macro count matches a naive source scan") {
    std::vector<std::string> corpus = {
        "select * from {{ ref('a') }}",
        "select x from {{ source('raw', 't') }} join {{ ref('b') }} on 1 = 1",
        "with c as (select 1 as v from {{ ref('m') }}) select v from c",
        "{{ config(alias='x') }} select 1 as one",
        "select 1 as one",
    };
    for (const auto& sql : corpus) {
        SqlAst ast = parse_model(sql);
        size_t naive = 0;
        for (size_t i = 0; i + 1 < sql.size(); ++i)
            if (sql[i] == '{' && sql[i + 1] == '{') ++naive;
        CHECK(ast.macro_refs.size() + ast.unsupported_macros.size() == naive);
    }
}

TEST_CASE("parser: never crashes on fuzzed input") {
    std::mt19937 rng(987654);
    const std::string alphabet =
        "abcselectfromwhiteunion(),;*='\"{}<>|.-_ \n\t0123456789/";
    for (int i = 0; i < 3000; ++i) {
        std::uniform_int_distribution<size_t> len(0, 120);
        std::string input;
        size_t n = len(rng);
        std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
        for (size_t k = 0; k < n; ++k) input += alphabet[pick(rng)];
        try {
            parse_model(input);
        } catch (const LexError&) {
        } catch (const ParseError&) {
        }
    }
    for (int i = 0; i < 1500; ++i) {
        std::uniform_int_distribution<int> byte(0, 255);
        std::uniform_int_distribution<size_t> len(0, 64);
        std::string input;
        size_t n = len(rng);
        for (size_t k = 0; k < n; ++k) input += static_cast<char>(byte(rng));
        try {
            parse_model(input);
        } catch (const LexError&) {
        } catch (const ParseError&) {
        }
    }
}

TEST_CASE("parser: deep nesting is rejected, not a crash") {
    std::string deep;
    for (int i = 0; i < 300; ++i) deep += "select * from (";
    deep += "select 1";
    for (int i = 0; i < 300; ++i) deep += ")";
    CHECK_THROWS_AS(parse_model(deep), ParseError);
}
