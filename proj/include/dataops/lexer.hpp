#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dataops::sql {

enum class TokenKind {
    Keyword,
    Identifier,
    QuotedIdentifier,
    Number,
    String,
    Operator,
    Comma,
    LParen,
    RParen,
    Semicolon,
    Comment,
    Whitespace,
    Macro,  // a whole {{ ... }} region
};

struct Token {
    TokenKind kind;
    std::string text;  // exact source bytes
    int line = 1;      // 1-based
    int col = 1;       // 1-based
};

class LexError : public std::runtime_error {
public:
    LexError(std::string msg, int line, int col)
        : std::runtime_error(std::move(msg)), line(line), col(col) {}
    int line;
    int col;
};

// Lossless: concatenating the token texts reproduces the input
// byte-for-byte. Strings, comments and {{ ... }} macro regions are
// single tokens, so a ';' inside them never splits statements.
std::vector<Token> tokenize(std::string_view sql);

bool is_trivia(TokenKind kind);  // whitespace or comment

bool is_keyword(const Token& token, std::string_view upper);
std::string to_upper(std::string_view text);
std::string to_lower(std::string_view text);

// Splits on semicolon tokens. The semicolons themselves are dropped, as
// is a trailing slice holding nothing but trivia.
std::vector<std::span<const Token>> split_statements(const std::vector<Token>& tokens);

}  // namespace dataops::sql
