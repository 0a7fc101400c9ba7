#include "dataops/project.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dataops/yaml.hpp"

namespace dataops {

namespace {

namespace fs = std::filesystem;
using yaml::Node;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot read file: " + path.generic_string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int count_lines(const std::string& text) {
    if (text.empty()) return 0;
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    if (text.back() != '\n') ++lines;
    return lines;
}

bool has_segment(const std::string& rel_path, std::string_view segment) {
    size_t pos = 0;
    while (pos <= rel_path.size()) {
        size_t slash = rel_path.find('/', pos);
        std::string_view part(rel_path.data() + pos,
                              (slash == std::string::npos ? rel_path.size() : slash) - pos);
        if (part == segment) return true;
        if (slash == std::string::npos) break;
        pos = slash + 1;
    }
    return false;
}

const std::vector<std::string>& recognized_model_keys() {
    static const std::vector<std::string> keys = {
        "name",   "description", "owner", "tags", "materialized",
        "target_schema", "columns", "tests", "meta"};
    return keys;
}

[[noreturn]] void malformed(const fs::path& file, int line, const std::string& msg) {
    throw LoadError(file.generic_string() + " line " + std::to_string(line) + ": " + msg);
}

ModelProperties parse_model_entry(const Node& entry, const fs::path& file) {
    ModelProperties props;
    for (const auto& [key, value] : entry.map) {
        if (std::find(recognized_model_keys().begin(), recognized_model_keys().end(), key) ==
            recognized_model_keys().end()) {
            props.extra_keys.push_back(key);
            continue;
        }
        if (key == "name") continue;
        if (key == "description") {
            if (!value.is_scalar() && !value.is_null())
                malformed(file, value.line, "description must be a scalar");
            if (value.is_scalar()) props.description = value.scalar;
        } else if (key == "owner") {
            if (!value.is_scalar()) malformed(file, value.line, "owner must be a scalar");
            props.owner = value.scalar;
        } else if (key == "tags") {
            if (!value.is_seq()) malformed(file, value.line, "tags must be a list");
            for (const auto& tag : value.seq) {
                if (!tag.is_scalar()) malformed(file, tag.line, "tags entries must be scalars");
                props.tags.push_back(tag.scalar);
            }
        } else if (key == "materialized") {
            if (!value.is_scalar()) malformed(file, value.line, "materialized must be a scalar");
            props.materialized = value.scalar;
        } else if (key == "target_schema") {
            if (!value.is_scalar()) malformed(file, value.line, "target_schema must be a scalar");
            props.target_schema = value.scalar;
        } else if (key == "columns") {
            if (!value.is_map()) malformed(file, value.line, "columns must be a mapping");
            for (const auto& [col, doc] : value.map) {
                if (!doc.is_scalar() && !doc.is_null())
                    malformed(file, doc.line, "column doc must be a scalar");
                props.columns.emplace_back(col, doc.is_scalar() ? doc.scalar : "");
            }
        } else if (key == "tests") {
            if (!value.is_seq()) malformed(file, value.line, "tests must be a list");
            for (const auto& test : value.seq) {
                TestDecl decl;
                if (test.is_scalar()) {
                    decl.test_type = test.scalar;
                } else if (test.is_map()) {
                    for (const auto& [tk, tv] : test.map) {
                        if (tk == "type") decl.test_type = tv.as_string("test type");
                        else if (tk == "column") decl.column = tv.as_string("test column");
                        else malformed(file, tv.line, "unknown test key '" + tk + "'");
                    }
                } else {
                    malformed(file, test.line, "tests entries must be scalars or maps");
                }
                if (decl.test_type.empty())
                    malformed(file, test.line, "test entry is missing its type");
                props.tests.push_back(std::move(decl));
            }
        } else if (key == "meta") {
            if (!value.is_map()) malformed(file, value.line, "meta must be a mapping");
            for (const auto& [mk, mv] : value.map) {
                if (!mv.is_scalar()) malformed(file, mv.line, "meta values must be scalars");
                props.meta[mk] = mv.scalar;
            }
        }
    }
    return props;
}

void parse_schema_file(const fs::path& file, const fs::path& display,
                       std::map<std::string, ModelProperties>& properties,
                       std::set<SourceDecl>& sources) {
    Node root;
    try {
        root = yaml::parse(read_file(file));
    } catch (const yaml::YamlError& e) {
        malformed(display, e.line, e.what());
    }
    if (!root.is_map()) malformed(display, root.line, "expected a mapping document");
    for (const auto& [key, value] : root.map) {
        if (key == "models") {
            if (!value.is_seq()) malformed(display, value.line, "models must be a list");
            for (const auto& entry : value.seq) {
                if (!entry.is_map()) malformed(display, entry.line, "model entry must be a map");
                const Node* name = entry.find("name");
                if (!name) malformed(display, entry.line, "model entry is missing 'name'");
                std::string model_name = name->as_string("model name");
                if (properties.count(model_name))
                    malformed(display, entry.line,
                              "duplicate properties entry for model '" + model_name + "'");
                properties.emplace(model_name, parse_model_entry(entry, display));
            }
        } else if (key == "sources") {
            if (!value.is_seq()) malformed(display, value.line, "sources must be a list");
            for (const auto& entry : value.seq) {
                if (!entry.is_map()) malformed(display, entry.line, "source entry must be a map");
                const Node* name = entry.find("name");
                if (!name) malformed(display, entry.line, "source entry is missing 'name'");
                const Node* tables = entry.find("tables");
                if (!tables || !tables->is_seq())
                    malformed(display, entry.line, "source entry needs a 'tables' list");
                for (const auto& table : tables->seq) {
                    std::string table_name;
                    if (table.is_scalar()) {
                        table_name = table.scalar;
                    } else if (table.is_map()) {
                        const Node* tn = table.find("name");
                        if (!tn) malformed(display, table.line, "source table is missing 'name'");
                        table_name = tn->as_string("source table name");
                    } else {
                        malformed(display, table.line, "source tables must be names");
                    }
                    sources.insert({name->as_string("source name"), table_name});
                }
            }
        } else {
            malformed(display, value.line, "unknown top-level key '" + key + "'");
        }
    }
}

void parse_owners_file(const fs::path& file, ProjectSnapshot& snapshot) {
    Node root;
    try {
        root = yaml::parse(read_file(file));
    } catch (const yaml::YamlError& e) {
        malformed(file.filename(), e.line, e.what());
    }
    for (const auto& [key, value] : root.map) {
        if (key == "active") {
            if (!value.is_seq()) malformed(file.filename(), value.line, "active must be a list");
            for (const auto& owner : value.seq)
                snapshot.owner_roster.insert(owner.as_string("owner"));
        } else if (key == "teams") {
            if (!value.is_map()) malformed(file.filename(), value.line, "teams must be a mapping");
            for (const auto& [owner, team] : value.map)
                snapshot.team_of_owner[owner] = team.as_string("team");
        } else {
            malformed(file.filename(), value.line, "unknown top-level key '" + key + "'");
        }
    }
}

}  // namespace

std::string layer_name(Layer layer) {
    switch (layer) {
        case Layer::Staging: return "staging";
        case Layer::Intermediate: return "intermediate";
        case Layer::Marts: return "marts";
        case Layer::Other: return "other";
    }
    return "other";
}

Layer infer_layer(const std::string& rel_path, const std::string& name) {
    if (has_segment(rel_path, "staging")) return Layer::Staging;
    if (has_segment(rel_path, "intermediate")) return Layer::Intermediate;
    if (has_segment(rel_path, "marts")) return Layer::Marts;
    if (name.rfind("stg_", 0) == 0) return Layer::Staging;
    if (name.rfind("int_", 0) == 0) return Layer::Intermediate;
    if (name.rfind("fct_", 0) == 0 || name.rfind("dim_", 0) == 0 ||
        name.rfind("mart_", 0) == 0)
        return Layer::Marts;
    return Layer::Other;
}

const ModelUnit* ProjectSnapshot::find_model(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

bool ProjectSnapshot::has_source(std::string_view source_name,
                                 std::string_view table_name) const {
    return std::any_of(sources.begin(), sources.end(), [&](const SourceDecl& s) {
        return s.source_name == source_name && s.table_name == table_name;
    });
}

ProjectSnapshot load_project(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
        throw LoadError("project root does not exist: " + root.generic_string());
    fs::path config_path = root / "dataops.yml";
    if (!fs::is_regular_file(config_path))
        throw LoadError("missing dataops.yml in " + root.generic_string());
    fs::path models_dir = root / "models";
    if (!fs::is_directory(models_dir))
        throw LoadError("missing models/ directory in " + root.generic_string());

    ProjectSnapshot snapshot;
    snapshot.root = root;
    snapshot.config = load_config_file(config_path);

    fs::path owners_path = root / "owners.yml";
    if (fs::is_regular_file(owners_path)) parse_owners_file(owners_path, snapshot);

    std::vector<fs::path> sql_files;
    std::vector<fs::path> schema_files;
    for (const auto& entry : fs::recursive_directory_iterator(models_dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".sql") sql_files.push_back(entry.path());
        else if (entry.path().filename() == "schema.yml") schema_files.push_back(entry.path());
    }
    auto rel = [&](const fs::path& p) {
        return fs::relative(p, root).generic_string();
    };
    std::sort(sql_files.begin(), sql_files.end(),
              [&](const fs::path& a, const fs::path& b) { return rel(a) < rel(b); });
    std::sort(schema_files.begin(), schema_files.end(),
              [&](const fs::path& a, const fs::path& b) { return rel(a) < rel(b); });

    std::map<std::string, ModelProperties> properties;
    std::set<SourceDecl> sources;
    for (const auto& file : schema_files)
        parse_schema_file(file, rel(file), properties, sources);

    std::map<std::string, std::string> seen;  // name -> path
    for (const auto& file : sql_files) {
        ModelUnit model;
        model.name = file.stem().generic_string();
        model.path = rel(file);
        auto [it, inserted] = seen.emplace(model.name, model.path);
        if (!inserted)
            throw LoadError("duplicate model name '" + model.name + "': " + it->second +
                            " and " + model.path);
        model.layer = infer_layer(model.path, model.name);
        model.raw_sql = read_file(file);
        model.line_count = count_lines(model.raw_sql);
        auto props = properties.find(model.name);
        if (props != properties.end()) model.properties = props->second;
        snapshot.models.push_back(std::move(model));
    }
    snapshot.sources.assign(sources.begin(), sources.end());
    return snapshot;
}

}  // namespace dataops
