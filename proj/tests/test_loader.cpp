#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "dataops/project.hpp"
#include "support/fixture_builder.hpp"

using namespace dataops;
namespace fs = std::filesystem;

TEST_CASE("infer_layer: directory segment wins over prefix") {
    CHECK(infer_layer("models/staging/stg_orders.sql", "stg_orders") == Layer::Staging);
    CHECK(infer_layer("models/marts/finance/fct_revenue.sql", "fct_revenue") == Layer::Marts);
    CHECK(infer_layer("models/misc/helper.sql", "helper") == Layer::Other);
    CHECK(infer_layer("models/int_prep.sql", "int_prep") == Layer::Intermediate);
    CHECK(infer_layer("models/dim_dates.sql", "dim_dates") == Layer::Marts);
    CHECK(infer_layer("models/mart_kpis.sql", "mart_kpis") == Layer::Marts);
    // conflict: directory says marts, prefix says staging
    CHECK(infer_layer("models/marts/stg_weird.sql", "stg_weird") == Layer::Marts);
    // substring is not a segment
    CHECK(infer_layer("models/staging_area_x/helper.sql", "helper") == Layer::Other);
}

TEST_CASE("load_project: empty models directory") {
    fs::path dir = fixtures::temp_dir("loader-empty");
    fs::create_directories(dir / "models");
    std::ofstream(dir / "dataops.yml") << "vcs:\n  base_branch: main\n";
    ProjectSnapshot snapshot = load_project(dir);
    CHECK(snapshot.models.empty());
    CHECK(snapshot.sources.empty());
    fs::remove_all(dir);
}

TEST_CASE("load_project: joins properties and infers layers") {
    fs::path dir = fixtures::temp_dir("loader-join");
    fixtures::ProjectBuilder builder(dir);
    fixtures::add_base_chain(builder);
    builder.write();

    ProjectSnapshot snapshot = load_project(dir);
    REQUIRE(snapshot.models.size() == 3);
    // lexicographic by path: intermediate/, marts/, staging/
    CHECK(snapshot.models[0].name == "int_orders");
    CHECK(snapshot.models[1].name == "mart_revenue");
    CHECK(snapshot.models[2].name == "stg_orders");
    const ModelUnit* stg = snapshot.find_model("stg_orders");
    REQUIRE(stg != nullptr);
    CHECK(stg->layer == Layer::Staging);
    REQUIRE(stg->properties.has_value());
    CHECK(stg->properties->owner == "ada");
    CHECK(stg->properties->tests.size() == 2);
    CHECK(stg->line_count == 7);
    CHECK(snapshot.has_source("raw", "orders"));
    CHECK(snapshot.owner_roster.count("ada") == 1);
    CHECK(snapshot.team_of_owner.at("ada") == "analytics");
    fs::remove_all(dir);
}

TEST_CASE("load_project: duplicate model stems are a load error") {
    fs::path dir = fixtures::temp_dir("loader-dup");
    fs::create_directories(dir / "models/staging");
    fs::create_directories(dir / "models/marts");
    std::ofstream(dir / "dataops.yml") << "vcs:\n  base_branch: main\n";
    std::ofstream(dir / "models/staging/stg_orders.sql") << "select 1 as x\n";
    std::ofstream(dir / "models/marts/stg_orders.sql") << "select 2 as y\n";
    CHECK_THROWS_AS(load_project(dir), LoadError);
    fs::remove_all(dir);
}

TEST_CASE("load_project: missing config is an error") {
    fs::path dir = fixtures::temp_dir("loader-nocfg");
    fs::create_directories(dir / "models");
    CHECK_THROWS_AS(load_project(dir), LoadError);
    fs::remove_all(dir);
}

TEST_CASE("load_project: malformed properties reports path and line") {
    fs::path dir = fixtures::temp_dir("loader-badyml");
    fs::create_directories(dir / "models");
    std::ofstream(dir / "dataops.yml") << "vcs:\n  base_branch: main\n";
    std::ofstream(dir / "models/one.sql") << "select 1 as x\n";
    std::ofstream(dir / "models/schema.yml") << "models:\n  - name: one\n    tags: scalar_not_list\n";
    try {
        load_project(dir);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        std::string msg = e.what();
        CHECK(msg.find("schema.yml") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("load_project: unknown properties keys land in extra_keys") {
    fs::path dir = fixtures::temp_dir("loader-extra");
    fixtures::ProjectBuilder builder(dir);
    fixtures::add_base_chain(builder);
    builder.model("int_orders")->extra_keys = {{"materialised", "table"}};
    builder.write();
    ProjectSnapshot snapshot = load_project(dir);
    const ModelUnit* m = snapshot.find_model("int_orders");
    REQUIRE(m->properties.has_value());
    CHECK(m->properties->extra_keys == std::vector<std::string>{"materialised"});
    fs::remove_all(dir);
}

TEST_CASE("load_project: deterministic across runs") {
    fs::path dir = fixtures::temp_dir("loader-det");
    fixtures::ProjectBuilder builder(dir);
    fixtures::add_base_chain(builder);
    builder.write();
    ProjectSnapshot a = load_project(dir);
    ProjectSnapshot b = load_project(dir);
    REQUIRE(a.models.size() == b.models.size());
    for (size_t i = 0; i < a.models.size(); ++i) {
        CHECK(a.models[i].name == b.models[i].name);
        CHECK(a.models[i].path == b.models[i].path);
        CHECK(a.models[i].raw_sql == b.models[i].raw_sql);
        CHECK(a.models[i].line_count == b.models[i].line_count);
    }
    fs::remove_all(dir);
}
