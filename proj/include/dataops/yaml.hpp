#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dataops::yaml {

// Minimal YAML subset: block maps, block sequences, flow sequences of
// scalars, and plain/quoted scalars. Anchors, aliases, tags, merge keys
// and multi-line scalars are rejected so that documents parse the same
// way everywhere.

class YamlError : public std::runtime_error {
public:
    YamlError(std::string msg, int line)
        : std::runtime_error(std::move(msg)), line(line) {}
    int line;
};

enum class NodeKind { Null, Scalar, Map, Seq };

struct Node {
    NodeKind kind = NodeKind::Null;
    std::string scalar;
    std::vector<std::pair<std::string, Node>> map;  // insertion order
    std::vector<Node> seq;
    int line = 0;

    bool is_null() const { return kind == NodeKind::Null; }
    bool is_scalar() const { return kind == NodeKind::Scalar; }
    bool is_map() const { return kind == NodeKind::Map; }
    bool is_seq() const { return kind == NodeKind::Seq; }

    const Node* find(std::string_view key) const;

    // Typed accessors; throw YamlError naming `what` on mismatch.
    std::string as_string(std::string_view what) const;
    long long as_int(std::string_view what) const;
    double as_double(std::string_view what) const;
    bool as_bool(std::string_view what) const;
};

Node parse(std::string_view text);

}  // namespace dataops::yaml
