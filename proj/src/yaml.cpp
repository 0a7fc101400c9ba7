#include "dataops/yaml.hpp"

#include <cctype>
#include <charconv>

namespace dataops::yaml {

namespace {

struct Line {
    int number = 0;
    int indent = 0;
    std::string content;  // comment-stripped, no indentation
};

bool is_space_only(std::string_view s) {
    for (char c : s)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

// Strips a trailing comment. A '#' begins a comment when it is the first
// character or is preceded by whitespace, and is not inside quotes.
std::string strip_comment(std::string_view s, int line) {
    std::string out;
    char quote = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (quote == '"' && c == '\\' && i + 1 < s.size()) {
                out += c;
                out += s[i + 1];
                ++i;
                continue;
            }
            if (c == quote) {
                if (quote == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
                    out += "''";
                    ++i;
                    continue;
                }
                quote = 0;
            }
            out += c;
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            out += c;
            continue;
        }
        if (c == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t'))
            break;
        out += c;
    }
    if (quote) throw YamlError("unterminated quoted string", line);
    while (!out.empty() && (out.back() == ' ' || out.back() == '\r' || out.back() == '\t'))
        out.pop_back();
    return out;
}

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++number;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (is_space_only(raw)) continue;
        int indent = 0;
        for (char c : raw) {
            if (c == ' ') ++indent;
            else if (c == '\t') throw YamlError("tab character in indentation", number);
            else break;
        }
        std::string content = strip_comment(raw.substr(indent), number);
        if (content.empty()) continue;
        if (number == 1 && content == "---") continue;  // optional document marker
        lines.push_back({number, indent, std::move(content)});
    }
    return lines;
}

void reject_unsupported(std::string_view scalar, int line) {
    if (scalar.empty()) return;
    char c = scalar.front();
    if (c == '&' || c == '*')
        throw YamlError("anchors and aliases are not supported", line);
    if (c == '!')
        throw YamlError("tags are not supported", line);
    if (c == '|' || c == '>')
        throw YamlError("block scalars are not supported", line);
    if (c == '{')
        throw YamlError("flow mappings are not supported", line);
}

std::string parse_quoted(std::string_view s, size_t& i, int line) {
    char quote = s[i];
    ++i;
    std::string out;
    while (i < s.size()) {
        char c = s[i];
        if (c == quote) {
            if (quote == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
                out += '\'';
                i += 2;
                continue;
            }
            ++i;
            return out;
        }
        if (quote == '"' && c == '\\' && i + 1 < s.size()) {
            char e = s[i + 1];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: out += e; break;
            }
            i += 2;
            continue;
        }
        out += c;
        ++i;
    }
    throw YamlError("unterminated quoted string", line);
}

Node scalar_node(std::string value, int line) {
    Node n;
    n.kind = NodeKind::Scalar;
    n.scalar = std::move(value);
    n.line = line;
    return n;
}

// Parses an inline value: quoted or plain scalar, or a flow sequence
// of scalars like [a, b, c].
Node parse_inline(std::string_view s, int line) {
    reject_unsupported(s, line);
    if (s.front() == '[') {
        Node n;
        n.kind = NodeKind::Seq;
        n.line = line;
        size_t i = 1;
        bool expect_item = true;
        while (i < s.size()) {
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
            if (i >= s.size()) break;
            if (s[i] == ']') {
                if (expect_item && !n.seq.empty())
                    throw YamlError("trailing comma in flow sequence", line);
                ++i;
                while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
                if (i != s.size())
                    throw YamlError("unexpected text after flow sequence", line);
                return n;
            }
            if (s[i] == ',') {
                if (expect_item) throw YamlError("empty item in flow sequence", line);
                expect_item = true;
                ++i;
                continue;
            }
            if (!expect_item) throw YamlError("missing comma in flow sequence", line);
            if (s[i] == '\'' || s[i] == '"') {
                n.seq.push_back(scalar_node(parse_quoted(s, i, line), line));
            } else {
                size_t start = i;
                while (i < s.size() && s[i] != ',' && s[i] != ']') ++i;
                std::string item(s.substr(start, i - start));
                while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.pop_back();
                if (item.empty()) throw YamlError("empty item in flow sequence", line);
                reject_unsupported(item, line);
                n.seq.push_back(scalar_node(std::move(item), line));
            }
            expect_item = false;
        }
        throw YamlError("unterminated flow sequence", line);
    }
    if (s.front() == '\'' || s.front() == '"') {
        size_t i = 0;
        std::string value = parse_quoted(s, i, line);
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        if (i != s.size()) throw YamlError("unexpected text after quoted scalar", line);
        return scalar_node(std::move(value), line);
    }
    if (s == "[]") {
        Node n;
        n.kind = NodeKind::Seq;
        n.line = line;
        return n;
    }
    if (s == "~" || s == "null") {
        Node n;
        n.line = line;
        return n;
    }
    return scalar_node(std::string(s), line);
}

// Splits "key: value" / "key:"; returns false when the line is not a
// mapping entry (plain scalar, e.g. inside a sequence).
bool split_key(const std::string& content, int line, std::string& key, std::string& rest) {
    size_t i = 0;
    if (content[0] == '\'' || content[0] == '"') {
        std::string_view sv(content);
        key = parse_quoted(sv, i, line);
        if (i >= content.size() || content[i] != ':') return false;
        ++i;
    } else {
        size_t colon = std::string::npos;
        for (size_t j = 0; j < content.size(); ++j) {
            if (content[j] == ':' && (j + 1 == content.size() || content[j + 1] == ' ')) {
                colon = j;
                break;
            }
        }
        if (colon == std::string::npos) return false;
        key = content.substr(0, colon);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        if (key.empty()) throw YamlError("empty mapping key", line);
        i = colon + 1;
    }
    while (i < content.size() && content[i] == ' ') ++i;
    rest = content.substr(i);
    return true;
}

class Parser {
public:
    explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    Node parse_document() {
        if (lines_.empty()) {
            Node n;
            n.kind = NodeKind::Map;
            return n;
        }
        Node root = parse_block(lines_[0].indent);
        if (pos_ != lines_.size())
            throw YamlError("unexpected indentation", lines_[pos_].number);
        return root;
    }

private:
    std::vector<Line> lines_;
    size_t pos_ = 0;

    Node parse_block(int indent) {
        const Line& first = lines_[pos_];
        if (first.indent != indent)
            throw YamlError("unexpected indentation", first.number);
        if (first.content[0] == '-' &&
            (first.content.size() == 1 || first.content[1] == ' '))
            return parse_sequence(indent);
        return parse_map(indent);
    }

    Node parse_map(int indent) {
        Node n;
        n.kind = NodeKind::Map;
        n.line = lines_[pos_].number;
        while (pos_ < lines_.size() && lines_[pos_].indent == indent) {
            const Line& ln = lines_[pos_];
            if (ln.content[0] == '-' && (ln.content.size() == 1 || ln.content[1] == ' '))
                break;
            std::string key, rest;
            if (!split_key(ln.content, ln.number, key, rest))
                throw YamlError("expected 'key: value'", ln.number);
            for (const auto& [k, v] : n.map)
                if (k == key) throw YamlError("duplicate key '" + key + "'", ln.number);
            ++pos_;
            Node value;
            if (!rest.empty()) {
                value = parse_inline(rest, ln.number);
            } else if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
                value = parse_block(lines_[pos_].indent);
            } else {
                value.line = ln.number;  // empty value
            }
            n.map.emplace_back(std::move(key), std::move(value));
            if (pos_ < lines_.size() && lines_[pos_].indent > indent)
                throw YamlError("unexpected indentation", lines_[pos_].number);
        }
        return n;
    }

    Node parse_sequence(int indent) {
        Node n;
        n.kind = NodeKind::Seq;
        n.line = lines_[pos_].number;
        while (pos_ < lines_.size() && lines_[pos_].indent == indent) {
            Line& ln = lines_[pos_];
            if (!(ln.content[0] == '-' && (ln.content.size() == 1 || ln.content[1] == ' ')))
                break;
            std::string rest = ln.content.size() > 1 ? ln.content.substr(2) : "";
            size_t lead = 0;
            while (lead < rest.size() && rest[lead] == ' ') ++lead;
            rest = rest.substr(lead);
            if (rest.empty()) {
                ++pos_;
                if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
                    n.seq.push_back(parse_block(lines_[pos_].indent));
                } else {
                    Node empty;
                    empty.line = ln.number;
                    n.seq.push_back(empty);
                }
                continue;
            }
            std::string key, value_rest;
            bool is_entry = false;
            if (rest[0] != '[' && rest[0] != '\'' && rest[0] != '"')
                is_entry = split_key(rest, ln.number, key, value_rest);
            else if (rest[0] == '\'' || rest[0] == '"')
                is_entry = split_key(rest, ln.number, key, value_rest);
            if (is_entry) {
                // Map item: rewrite the dash as indentation and reparse the
                // whole item as a nested map block.
                int item_indent = indent + 2 + static_cast<int>(lead);
                ln.indent = item_indent;
                ln.content = rest;
                n.seq.push_back(parse_block(item_indent));
            } else {
                ++pos_;
                n.seq.push_back(parse_inline(rest, ln.number));
                if (pos_ < lines_.size() && lines_[pos_].indent > indent)
                    throw YamlError("unexpected indentation", lines_[pos_].number);
            }
        }
        return n;
    }
};

}  // namespace

const Node* Node::find(std::string_view key) const {
    for (const auto& [k, v] : map)
        if (k == key) return &v;
    return nullptr;
}

std::string Node::as_string(std::string_view what) const {
    if (kind != NodeKind::Scalar)
        throw YamlError("expected a scalar for " + std::string(what), line);
    return scalar;
}

long long Node::as_int(std::string_view what) const {
    std::string s = as_string(what);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw YamlError("expected an integer for " + std::string(what), line);
    return value;
}

double Node::as_double(std::string_view what) const {
    std::string s = as_string(what);
    try {
        size_t consumed = 0;
        double value = std::stod(s, &consumed);
        if (consumed != s.size()) throw std::invalid_argument(s);
        return value;
    } catch (const std::exception&) {
        throw YamlError("expected a number for " + std::string(what), line);
    }
}

bool Node::as_bool(std::string_view what) const {
    std::string s = as_string(what);
    if (s == "true") return true;
    if (s == "false") return false;
    throw YamlError("expected true or false for " + std::string(what), line);
}

Node parse(std::string_view text) {
    Parser parser(split_lines(text));
    return parser.parse_document();
}

}  // namespace dataops::yaml
