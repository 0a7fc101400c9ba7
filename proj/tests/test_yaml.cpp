#include "doctest.h"

#include "dataops/yaml.hpp"

using namespace dataops;

TEST_CASE("yaml: scalars, maps, sequences") {
    auto doc = yaml::parse(
        "name: demo\n"
        "count: 42\n"
        "ratio: 0.5\n"
        "flag: true\n"
        "tags: [a, b, 'c d']\n"
        "nested:\n"
        "  inner: value\n"
        "items:\n"
        "  - first\n"
        "  - second\n");
    CHECK(doc.find("name")->as_string("name") == "demo");
    CHECK(doc.find("count")->as_int("count") == 42);
    CHECK(doc.find("ratio")->as_double("ratio") == doctest::Approx(0.5));
    CHECK(doc.find("flag")->as_bool("flag"));
    REQUIRE(doc.find("tags")->is_seq());
    CHECK(doc.find("tags")->seq.size() == 3);
    CHECK(doc.find("tags")->seq[2].scalar == "c d");
    CHECK(doc.find("nested")->find("inner")->as_string("x") == "value");
    CHECK(doc.find("items")->seq.size() == 2);
}

TEST_CASE("yaml: sequence of maps") {
    auto doc = yaml::parse(
        "models:\n"
        "  - name: stg_orders\n"
        "    owner: ada\n"
        "    tests:\n"
        "      - type: unique\n"
        "        column: order_id\n"
        "  - name: mart_x\n");
    const auto* models = doc.find("models");
    REQUIRE(models != nullptr);
    REQUIRE(models->seq.size() == 2);
    CHECK(models->seq[0].find("name")->scalar == "stg_orders");
    CHECK(models->seq[0].find("tests")->seq[0].find("column")->scalar == "order_id");
    CHECK(models->seq[1].find("name")->scalar == "mart_x");
}

TEST_CASE("yaml: comments and quoting") {
    auto doc = yaml::parse(
        "# header comment\n"
        "a: plain value  # trailing comment\n"
        "b: 'quoted # not comment'\n"
        "c: \"esc\\\"aped\"\n"
        "d: 'it''s fine'\n");
    CHECK(doc.find("a")->scalar == "plain value");
    CHECK(doc.find("b")->scalar == "quoted # not comment");
    CHECK(doc.find("c")->scalar == "esc\"aped");
    CHECK(doc.find("d")->scalar == "it's fine");
}

TEST_CASE("yaml: rejects anchors, aliases, tags and tabs") {
    CHECK_THROWS_AS(yaml::parse("a: &anchor 1\n"), yaml::YamlError);
    CHECK_THROWS_AS(yaml::parse("a: *alias\n"), yaml::YamlError);
    CHECK_THROWS_AS(yaml::parse("a: !tag x\n"), yaml::YamlError);
    CHECK_THROWS_AS(yaml::parse("a:\n\tb: 1\n"), yaml::YamlError);
    CHECK_THROWS_AS(yaml::parse("a: |\n  block\n"), yaml::YamlError);
}

TEST_CASE("yaml: duplicate keys and bad structure carry line numbers") {
    try {
        yaml::parse("a: 1\nb: 2\na: 3\n");
        FAIL("expected YamlError");
    } catch (const yaml::YamlError& e) {
        CHECK(e.line == 3);
    }
    try {
        yaml::parse("a: 1\n  b: deeper\n");
        FAIL("expected YamlError");
    } catch (const yaml::YamlError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("yaml: empty document and empty values") {
    auto empty = yaml::parse("");
    CHECK(empty.is_map());
    CHECK(empty.map.empty());
    auto doc = yaml::parse("a:\nb: 1\n");
    CHECK(doc.find("a")->is_null());
    CHECK(doc.find("b")->scalar == "1");
}
