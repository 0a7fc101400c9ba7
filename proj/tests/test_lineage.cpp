#include "doctest.h"

#include <functional>
#include <random>

#include "dataops/lineage.hpp"
#include "dataops/project.hpp"

using namespace dataops;

namespace {

ProjectSnapshot snapshot_with(const std::vector<std::pair<std::string, std::string>>& models,
                              const std::vector<std::pair<std::string, std::string>>& sources) {
    ProjectSnapshot snapshot;
    snapshot.config = default_config();
    for (const auto& [name, sql] : models) {
        ModelUnit m;
        m.name = name;
        m.path = "models/" + name + ".sql";
        m.layer = infer_layer(m.path, name);
        m.raw_sql = sql;
        snapshot.models.push_back(std::move(m));
    }
    for (const auto& [s, t] : sources) snapshot.sources.push_back({s, t});
    return snapshot;
}

GraphBuild build_from(const ProjectSnapshot& snapshot) {
    std::map<std::string, sql::SqlAst> asts;
    for (const auto& m : snapshot.models) asts.emplace(m.name, sql::parse_model(m.raw_sql));
    return build_graph(snapshot, asts);
}

DependencyGraph make_digraph(int n, const std::vector<std::pair<int, int>>& edges) {
    DependencyGraph g;
    std::vector<NodeId> nodes;
    for (int i = 0; i < n; ++i) {
        NodeId id = model_node(std::string(1, static_cast<char>('a' + i)));
        g.nodes.insert(id);
        g.layer_of[id.name] = Layer::Intermediate;
        nodes.push_back(id);
    }
    for (const auto& [from, to] : edges) g.edges.insert({nodes[from], nodes[to]});
    return g;
}

bool oracle_has_cycle(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : edges) adj[a].push_back(b);
    std::vector<int> state(n, 0);
    std::function<bool(int)> dfs = [&](int v) {
        state[v] = 1;
        for (int w : adj[v]) {
            if (state[w] == 1) return true;
            if (state[w] == 0 && dfs(w)) return true;
        }
        state[v] = 2;
        return false;
    };
    for (int v = 0; v < n; ++v)
        if (state[v] == 0 && dfs(v)) return true;
    return false;
}

}  // namespace

TEST_CASE("build_graph: empty project") {
    ProjectSnapshot snapshot = snapshot_with({}, {});
    GraphBuild build = build_from(snapshot);
    CHECK(build.graph.nodes.empty());
    CHECK(build.graph.edges.empty());
    CHECK(build.broken.empty());
}

TEST_CASE("build_graph: refs and sources become edges") {
    ProjectSnapshot snapshot = snapshot_with(
        {{"stg_b", "select s.x as x from {{ source('raw', 'orders') }} s"},
         {"int_a", "select b.x as x from {{ ref('stg_b') }} b"}},
        {{"raw", "orders"}});
    GraphBuild build = build_from(snapshot);
    CHECK(build.graph.nodes.size() == 3);
    CHECK(build.graph.edges.size() == 2);
    CHECK(build.broken.empty());
    CHECK(build.graph.edges.count({model_node("int_a"), model_node("stg_b")}) == 1);
    CHECK(build.graph.edges.count({model_node("stg_b"), source_node("raw", "orders")}) == 1);
}

TEST_CASE("build_graph: broken refs produce findings, not edges") {
    ProjectSnapshot snapshot = snapshot_with(
        {{"mart_x", "select g.x as x from {{ ref('ghost_model') }} g"}}, {});
    GraphBuild build = build_from(snapshot);
    REQUIRE(build.broken.size() == 1);
    CHECK(build.broken[0].model == "mart_x");
    CHECK(build.graph.edges.empty());
}

TEST_CASE("detect_cycles: chains are acyclic, two-cycles are found") {
    CHECK(detect_cycles(make_digraph(3, {{0, 1}, {1, 2}})).empty());
    auto cycles = detect_cycles(make_digraph(2, {{0, 1}, {1, 0}}));
    REQUIRE(cycles.size() == 1);
    REQUIRE(cycles[0].size() == 2);
    CHECK(cycles[0][0].name == "a");  // normalized to the smallest node
    CHECK(cycles[0][1].name == "b");
}

TEST_CASE("detect_cycles: existence agrees with a brute-force oracle") {
    std::mt19937 rng(424242);
    for (int round = 0; round < 1200; ++round) {
        std::uniform_int_distribution<int> size(1, 10);
        int n = size(rng);
        std::uniform_int_distribution<int> edge_count(0, n + n / 2);
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::set<std::pair<int, int>> edge_set;
        int m = edge_count(rng);
        for (int e = 0; e < m; ++e) {
            int a = pick(rng), b = pick(rng);
            if (a != b) edge_set.insert({a, b});
        }
        std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
        bool expected = oracle_has_cycle(n, edges);
        bool actual = !detect_cycles(make_digraph(n, edges)).empty();
        REQUIRE(expected == actual);
    }
}

TEST_CASE("layer_violations: the flow matrix") {
    PipelineConfig cfg = default_config();

    SUBCASE("intermediate depending on marts is flagged") {
        DependencyGraph g;
        g.nodes = {model_node("int_x"), model_node("mart_y")};
        g.layer_of = {{"int_x", Layer::Intermediate}, {"mart_y", Layer::Marts}};
        g.edges = {{model_node("int_x"), model_node("mart_y")}};
        auto findings = layer_violations(g, cfg);
        REQUIRE(findings.size() == 1);
        CHECK(findings[0].message.find("feeds intermediate") != std::string::npos);
    }
    SUBCASE("staging reading a source is canonical") {
        DependencyGraph g;
        g.nodes = {model_node("stg_a"), source_node("raw", "orders")};
        g.layer_of = {{"stg_a", Layer::Staging}};
        g.edges = {{model_node("stg_a"), source_node("raw", "orders")}};
        CHECK(layer_violations(g, cfg).empty());
    }
    SUBCASE("non-staging models may not read sources directly") {
        DependencyGraph g;
        g.nodes = {model_node("int_x"), source_node("raw", "orders")};
        g.layer_of = {{"int_x", Layer::Intermediate}};
        g.edges = {{model_node("int_x"), source_node("raw", "orders")}};
        auto findings = layer_violations(g, cfg);
        REQUIRE(findings.size() == 1);
        CHECK(findings[0].message.find("only staging models may call source()") !=
              std::string::npos);
        cfg.lineage_forbid_source_reads_outside_staging = false;
        CHECK(layer_violations(g, cfg).empty());
    }
    SUBCASE("same-layer intermediate chaining is allowed") {
        DependencyGraph g;
        g.nodes = {model_node("int_a"), model_node("int_b")};
        g.layer_of = {{"int_a", Layer::Intermediate}, {"int_b", Layer::Intermediate}};
        g.edges = {{model_node("int_a"), model_node("int_b")}};
        CHECK(layer_violations(g, cfg).empty());
    }
    SUBCASE("unlayered models are flagged for any edge") {
        DependencyGraph g;
        g.nodes = {model_node("helper"), model_node("int_b")};
        g.layer_of = {{"helper", Layer::Other}, {"int_b", Layer::Intermediate}};
        g.edges = {{model_node("helper"), model_node("int_b")}};
        auto findings = layer_violations(g, cfg);
        REQUIRE(findings.size() == 1);
        CHECK(*findings[0].model == "helper");
    }
}

TEST_CASE("unreferenced_models: marts are exempt") {
    DependencyGraph g;
    g.nodes = {model_node("stg_a"), model_node("int_b"), model_node("mart_c"),
               model_node("stg_orphan")};
    g.layer_of = {{"stg_a", Layer::Staging},
                  {"int_b", Layer::Intermediate},
                  {"mart_c", Layer::Marts},
                  {"stg_orphan", Layer::Staging}};
    g.edges = {{model_node("int_b"), model_node("stg_a")},
               {model_node("mart_c"), model_node("int_b")}};
    auto findings = unreferenced_models(g);
    REQUIRE(findings.size() == 1);
    CHECK(*findings[0].model == "stg_orphan");
    CHECK(findings[0].severity == Severity::Warning);
}

TEST_CASE("topo_order: chains, diamonds, determinism") {
    DependencyGraph g;
    for (const char* name : {"stg", "int_a", "int_b", "mart"}) {
        g.nodes.insert(model_node(name));
        g.layer_of[name] = Layer::Intermediate;
    }
    g.edges = {{model_node("int_a"), model_node("stg")},
               {model_node("int_b"), model_node("stg")},
               {model_node("mart"), model_node("int_a")},
               {model_node("mart"), model_node("int_b")}};

    auto order = topo_order(g, {model_node("stg")});
    REQUIRE(order.size() == 4);
    CHECK(order[0].name == "stg");
    CHECK(order[1].name == "int_a");  // lexicographic tie-break
    CHECK(order[2].name == "int_b");
    CHECK(order[3].name == "mart");
    // No edge may point backward in the sequence.
    for (size_t i = 0; i < order.size(); ++i)
        for (size_t j = i + 1; j < order.size(); ++j)
            CHECK(g.edges.count({order[i], order[j]}) == 0);

    auto again = topo_order(g, {model_node("stg")});
    CHECK(order == again);

    auto single = topo_order(g, {model_node("mart")});
    REQUIRE(single.size() == 1);
    CHECK(single[0].name == "mart");
}

TEST_CASE("topo_order: cycle is a contract breach") {
    DependencyGraph g = make_digraph(2, {{0, 1}, {1, 0}});
    CHECK_THROWS_AS(topo_order(g, {model_node("a")}), std::logic_error);
}

TEST_CASE("graph_to_json: stable shape") {
    ProjectSnapshot snapshot = snapshot_with(
        {{"stg_b", "select s.x as x from {{ source('raw', 'orders') }} s"},
         {"int_a", "select b.x as x from {{ ref('stg_b') }} b"}},
        {{"raw", "orders"}});
    GraphBuild build = build_from(snapshot);
    std::string json = graph_to_json(build.graph);
    CHECK(json.find("\"id\": \"model:int_a\"") != std::string::npos);
    CHECK(json.find("\"id\": \"source:raw.orders\"") != std::string::npos);
    CHECK(json.find("\"layer\": \"staging\"") != std::string::npos);
    CHECK(json == graph_to_json(build.graph));
}

TEST_CASE("build_graph: edge count equals well-resolved macro refs") {
    ProjectSnapshot snapshot = snapshot_with(
        {{"stg_b", "select s.x as x from {{ source('raw', 'orders') }} s"},
         {"int_a", "select b.x as x, c.y as y from {{ ref('stg_b') }} b join "
                   "{{ ref('ghost') }} c on 1 = 1"}},
        {{"raw", "orders"}});
    std::map<std::string, sql::SqlAst> asts;
    size_t resolved = 0;
    for (const auto& m : snapshot.models) {
        auto ast = sql::parse_model(m.raw_sql);
        for (const auto& mr : ast.macro_refs) {
            if (mr.kind == sql::MacroRef::Kind::Ref && snapshot.find_model(mr.args[0]))
                ++resolved;
            if (mr.kind == sql::MacroRef::Kind::Source &&
                snapshot.has_source(mr.args[0], mr.args[1]))
                ++resolved;
        }
        asts.emplace(m.name, std::move(ast));
    }
    GraphBuild build = build_graph(snapshot, asts);
    CHECK(build.graph.edges.size() == resolved);
    CHECK(build.broken.size() == 1);
}
