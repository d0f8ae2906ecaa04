#ifndef COOL_LEXER_HPP
#define COOL_LEXER_HPP

#include <string>
#include <vector>

#include "cool/source.hpp"

namespace cool {

enum class Tok {
    Word,
    Number,
    At,        // @
    LBrace,    // {
    RBrace,    // }
    LParen,    // (
    RParen,    // )
    Semi,      // ;
    Comma,     // ,
    Colon,     // :
    Dot,       // .
    Hash,      // #
    Dollar,    // $
    Plus,      // +
    Minus,     // -
    Star,      // *
    Slash,     // /
    Caret,     // ^
    Assign,    // =
    EqEq,      // ==
    AndAnd,    // &&
    LtLt,      // <<
    FatArrow,  // =>
    Arrow,     // -->
    End,
};

struct Token {
    Tok kind;
    std::string text; // Word text
    double number = 0.0;
    SourceLoc loc;
};

// Tokenizes UTF-8 source; bytes >= 0x80 are treated as identifier characters
// so names like θ lex as words.
std::vector<Token> lex(const std::string& source);

const char* tok_name(Tok t);

} // namespace cool

#endif
