#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataops/config.hpp"

namespace dataops {

class LoadError : public std::runtime_error {
public:
    explicit LoadError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

enum class Layer { Staging, Intermediate, Marts, Other };

std::string layer_name(Layer layer);

struct TestDecl {
    std::string test_type;
    std::optional<std::string> column;
};

struct ModelProperties {
    std::optional<std::string> description;
    std::optional<std::string> owner;
    std::vector<std::string> tags;
    std::optional<std::string> materialized;  // raw value; validity is a check concern
    std::optional<std::string> target_schema;
    std::vector<std::pair<std::string, std::string>> columns;  // name -> doc
    std::vector<TestDecl> tests;
    std::map<std::string, std::string> meta;
    std::vector<std::string> extra_keys;  // unrecognized keys, in file order
};

struct ModelUnit {
    std::string name;     // file stem
    std::string path;     // relative to root, '/' separators
    Layer layer = Layer::Other;
    std::string raw_sql;
    std::optional<ModelProperties> properties;
    int line_count = 0;
};

struct SourceDecl {
    std::string source_name;
    std::string table_name;

    auto operator<=>(const SourceDecl&) const = default;
};

struct ProjectSnapshot {
    std::filesystem::path root;
    std::vector<ModelUnit> models;  // lexicographic by path
    std::vector<SourceDecl> sources;
    std::set<std::string> owner_roster;
    std::map<std::string, std::string> team_of_owner;
    PipelineConfig config;

    const ModelUnit* find_model(std::string_view name) const;
    bool has_source(std::string_view source_name, std::string_view table_name) const;
};

// Directory segment wins over name prefix when they disagree.
Layer infer_layer(const std::string& rel_path, const std::string& name);

// Reads dataops.yml, owners.yml, models/**/*.sql and models/**/schema.yml.
ProjectSnapshot load_project(const std::filesystem::path& root);

}  // namespace dataops
