#include "dataops/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace dataops::sql {

namespace {

const std::unordered_set<std::string>& keyword_table() {
    static const std::unordered_set<std::string> keywords = {
        "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT",
        "OFFSET", "WITH", "AS", "JOIN", "INNER", "LEFT", "RIGHT", "FULL",
        "OUTER", "CROSS", "NATURAL", "ON", "USING", "UNION", "ALL",
        "INTERSECT", "EXCEPT", "DISTINCT", "CASE", "WHEN", "THEN", "ELSE",
        "END", "AND", "OR", "NOT", "IN", "EXISTS", "BETWEEN", "LIKE",
        "ILIKE", "IS", "NULL", "TRUE", "FALSE", "CAST", "CREATE", "TABLE",
        "VIEW", "INSERT", "INTO", "VALUES", "UPDATE", "SET", "DELETE",
        "ASC", "DESC", "OVER", "PARTITION", "QUALIFY", "WINDOW", "LATERAL",
        "INTERVAL", "EXTRACT", "COALESCE", "NULLIF", "ANY", "SOME",
    };
    return keywords;
}

bool is_word_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_space_char(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

class Lexer {
public:
    explicit Lexer(std::string_view input) : input_(input) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (pos_ < input_.size()) tokens.push_back(next());
        return tokens;
    }

private:
    std::string_view input_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(size_t ahead = 0) const {
        return pos_ + ahead < input_.size() ? input_[pos_ + ahead] : '\0';
    }

    Token make(TokenKind kind, size_t start, int line, int col) {
        return {kind, std::string(input_.substr(start, pos_ - start)), line, col};
    }

    void advance() {
        if (input_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance_until(std::string_view terminator, const char* what, int line, int col) {
        while (pos_ < input_.size()) {
            if (input_.compare(pos_, terminator.size(), terminator) == 0) {
                for (size_t i = 0; i < terminator.size(); ++i) advance();
                return;
            }
            advance();
        }
        throw LexError(std::string("unterminated ") + what, line, col);
    }

    Token next() {
        size_t start = pos_;
        int line = line_, col = col_;
        char c = peek();

        if (is_space_char(static_cast<unsigned char>(c))) {
            while (pos_ < input_.size() && is_space_char(static_cast<unsigned char>(peek())))
                advance();
            return make(TokenKind::Whitespace, start, line, col);
        }
        if (c == '-' && peek(1) == '-') {
            while (pos_ < input_.size() && peek() != '\n') advance();
            return make(TokenKind::Comment, start, line, col);
        }
        if (c == '/' && peek(1) == '*') {
            advance();
            advance();
            advance_until("*/", "block comment", line, col);
            return make(TokenKind::Comment, start, line, col);
        }
        if (c == '{' && peek(1) == '{') {
            advance();
            advance();
            advance_until("}}", "macro region", line, col);
            return make(TokenKind::Macro, start, line, col);
        }
        if (c == '\'') {
            advance();
            while (pos_ < input_.size()) {
                if (peek() == '\'') {
                    advance();
                    if (peek() == '\'') {
                        advance();  // '' escape
                        continue;
                    }
                    return make(TokenKind::String, start, line, col);
                }
                advance();
            }
            throw LexError("unterminated string literal", line, col);
        }
        if (c == '"') {
            advance();
            while (pos_ < input_.size()) {
                if (peek() == '"') {
                    advance();
                    if (peek() == '"') {
                        advance();
                        continue;
                    }
                    return make(TokenKind::QuotedIdentifier, start, line, col);
                }
                advance();
            }
            throw LexError("unterminated quoted identifier", line, col);
        }
        if (is_word_start(static_cast<unsigned char>(c))) {
            while (pos_ < input_.size() && is_word_char(static_cast<unsigned char>(peek())))
                advance();
            std::string upper = to_upper(input_.substr(start, pos_ - start));
            TokenKind kind = keyword_table().count(upper) ? TokenKind::Keyword
                                                          : TokenKind::Identifier;
            return make(kind, start, line, col);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            }
            if ((peek() == 'e' || peek() == 'E') &&
                (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                 ((peek(1) == '+' || peek(1) == '-') &&
                  std::isdigit(static_cast<unsigned char>(peek(2)))))) {
                advance();
                if (peek() == '+' || peek() == '-') advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            }
            return make(TokenKind::Number, start, line, col);
        }
        switch (c) {
            case ',': advance(); return make(TokenKind::Comma, start, line, col);
            case '(': advance(); return make(TokenKind::LParen, start, line, col);
            case ')': advance(); return make(TokenKind::RParen, start, line, col);
            case ';': advance(); return make(TokenKind::Semicolon, start, line, col);
            default: break;
        }
        static const std::array<std::string_view, 9> two_char = {
            "::", "<=", ">=", "<>", "!=", "||", "->", "=>", "**"};
        for (std::string_view op : two_char) {
            if (input_.compare(pos_, 2, op) == 0) {
                advance();
                advance();
                return make(TokenKind::Operator, start, line, col);
            }
        }
        advance();  // any other byte is a one-character operator
        return make(TokenKind::Operator, start, line, col);
    }
};

}  // namespace

std::vector<Token> tokenize(std::string_view sql) {
    return Lexer(sql).run();
}

bool is_trivia(TokenKind kind) {
    return kind == TokenKind::Whitespace || kind == TokenKind::Comment;
}

std::string to_upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_keyword(const Token& token, std::string_view upper) {
    return token.kind == TokenKind::Keyword && to_upper(token.text) == upper;
}

std::vector<std::span<const Token>> split_statements(const std::vector<Token>& tokens) {
    std::vector<std::span<const Token>> slices;
    size_t begin = 0;
    for (size_t i = 0; i <= tokens.size(); ++i) {
        bool at_end = i == tokens.size();
        if (!at_end && tokens[i].kind != TokenKind::Semicolon) continue;
        std::span<const Token> slice(tokens.data() + begin, i - begin);
        bool has_content = std::any_of(slice.begin(), slice.end(), [](const Token& t) {
            return !is_trivia(t.kind);
        });
        // The final slice is dropped when it holds only trivia.
        if (!at_end || has_content) slices.push_back(slice);
        begin = i + 1;
    }
    return slices;
}

}  // namespace dataops::sql
