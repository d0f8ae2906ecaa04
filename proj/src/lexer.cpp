#include "cool/lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace cool {

namespace {

bool is_word_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

} // namespace

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Word: return "identifier";
        case Tok::Number: return "number";
        case Tok::At: return "'@'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Semi: return "';'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Dot: return "'.'";
        case Tok::Hash: return "'#'";
        case Tok::Dollar: return "'$'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::Assign: return "'='";
        case Tok::EqEq: return "'=='";
        case Tok::AndAnd: return "'&&'";
        case Tok::LtLt: return "'<<'";
        case Tok::FatArrow: return "'=>'";
        case Tok::Arrow: return "'-->'";
        case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;

    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok k, SourceLoc loc, std::string text = "", double num = 0.0) {
        out.push_back(Token{k, std::move(text), num, loc});
    };

    while (i < src.size()) {
        unsigned char c = src[i];
        SourceLoc loc{line, col};
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
            if (i + 1 >= src.size()) throw CoolError("unterminated block comment", loc);
            advance(2);
            continue;
        }
        if (std::isdigit(c) || (c == '.' && i + 1 < src.size() && std::isdigit((unsigned char)src[i + 1]))) {
            size_t start = i;
            while (i < src.size() && std::isdigit((unsigned char)src[i])) advance(1);
            if (i < src.size() && src[i] == '.' && i + 1 < src.size() &&
                std::isdigit((unsigned char)src[i + 1])) {
                advance(1);
                while (i < src.size() && std::isdigit((unsigned char)src[i])) advance(1);
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                size_t k = i + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit((unsigned char)src[k])) {
                    advance(k - i);
                    while (i < src.size() && std::isdigit((unsigned char)src[i])) advance(1);
                }
            }
            std::string text = src.substr(start, i - start);
            push(Tok::Number, loc, text, std::strtod(text.c_str(), nullptr));
            continue;
        }
        if (is_word_start(c)) {
            size_t start = i;
            while (i < src.size() && is_word_char((unsigned char)src[i])) advance(1);
            push(Tok::Word, loc, src.substr(start, i - start));
            continue;
        }
        auto two = [&](char a, char b) {
            return src[i] == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (src.compare(i, 3, "-->") == 0) {
            push(Tok::Arrow, loc);
            advance(3);
            continue;
        }
        if (two('=', '=')) { push(Tok::EqEq, loc); advance(2); continue; }
        if (two('=', '>')) { push(Tok::FatArrow, loc); advance(2); continue; }
        if (two('&', '&')) { push(Tok::AndAnd, loc); advance(2); continue; }
        if (two('<', '<')) { push(Tok::LtLt, loc); advance(2); continue; }
        switch (c) {
            case '@': push(Tok::At, loc); break;
            case '{': push(Tok::LBrace, loc); break;
            case '}': push(Tok::RBrace, loc); break;
            case '(': push(Tok::LParen, loc); break;
            case ')': push(Tok::RParen, loc); break;
            case ';': push(Tok::Semi, loc); break;
            case ',': push(Tok::Comma, loc); break;
            case ':': push(Tok::Colon, loc); break;
            case '.': push(Tok::Dot, loc); break;
            case '#': push(Tok::Hash, loc); break;
            case '$': push(Tok::Dollar, loc); break;
            case '+': push(Tok::Plus, loc); break;
            case '-': push(Tok::Minus, loc); break;
            case '*': push(Tok::Star, loc); break;
            case '/': push(Tok::Slash, loc); break;
            case '^': push(Tok::Caret, loc); break;
            case '=': push(Tok::Assign, loc); break;
            default:
                throw CoolError(std::string("unexpected character '") + char(c) + "'", loc);
        }
        advance(1);
    }
    out.push_back(Token{Tok::End, "", 0.0, SourceLoc{line, col}});
    return out;
}

} // namespace cool
