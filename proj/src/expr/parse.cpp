#include <cctype>
#include <charconv>
#include <numbers>

#include "fracbs/error.hpp"
#include "fracbs/expr.hpp"

namespace fracbs::expr {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind = Tok::End;
    std::size_t pos = 0;
    std::string_view text;
    double number = 0.0;
};

std::string_view describe(const Token& t) {
    return t.kind == Tok::End ? std::string_view("end of input") : t.text;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        Token t;
        t.pos = pos_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            t.kind = Tok::Ident;
            t.text = src_.substr(start, pos_ - start);
            return t;
        }
        t.text = src_.substr(pos_, 1);
        ++pos_;
        switch (c) {
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case '*': t.kind = Tok::Star; break;
            case '/': t.kind = Tok::Slash; break;
            case '^': t.kind = Tok::Caret; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case ',': t.kind = Tok::Comma; break;
            default: throw ParseError("unexpected character '" + std::string(t.text) + "'", t.pos);
        }
        return t;
    }

private:
    Token number() {
        Token t;
        t.pos = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        };
        digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            digits();
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t mark = end++;
            if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
            if (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
                digits();
            } else {
                end = mark;  // not an exponent; leave 'e' for the next token
            }
        }
        t.text = src_.substr(pos_, end - pos_);
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size())
            throw ParseError("malformed number '" + std::string(t.text) + "'", t.pos);
        t.kind = Tok::Number;
        pos_ = end;
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    Expr parse() {
        Expr e = expression();
        if (cur_.kind != Tok::End)
            throw ParseError("unexpected '" + std::string(describe(cur_)) + "'", cur_.pos);
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    bool starts_operand() const {
        switch (cur_.kind) {
            case Tok::Number:
            case Tok::Ident:
            case Tok::LParen:
            case Tok::Minus:
            case Tok::Plus: return true;
            default: return false;
        }
    }

    // Reports a missing operand at the operator that needed it.
    void require_operand(const Token& op) {
        if (!starts_operand())
            throw ParseError("expected operand after '" + std::string(op.text) + "'", op.pos);
    }

    Expr expression() {
        if (++depth_ > kMaxDepth) throw ParseError("expression nested too deeply", cur_.pos);
        struct Leave {
            int& d;
            ~Leave() { --d; }
        } leave{depth_};
        std::vector<Expr> terms;
        terms.push_back(term());
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            Token op = cur_;
            advance();
            require_operand(op);
            Expr t = term();
            terms.push_back(op.kind == Tok::Minus ? -t : t);
        }
        return Expr::add(std::move(terms));
    }

    Expr term() {
        std::vector<Expr> factors;
        factors.push_back(unary());
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
            Token op = cur_;
            advance();
            require_operand(op);
            Expr f = unary();
            factors.push_back(op.kind == Tok::Slash ? Expr::pow(f, num(-1.0)) : f);
        }
        return Expr::mul(std::move(factors));
    }

    Expr unary() {
        if (cur_.kind == Tok::Minus || cur_.kind == Tok::Plus) {
            Token op = cur_;
            advance();
            require_operand(op);
            if (++depth_ > kMaxDepth) throw ParseError("expression nested too deeply", op.pos);
            Expr operand = unary();
            --depth_;
            return op.kind == Tok::Minus ? -operand : operand;
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (cur_.kind != Tok::Caret) return base;
        Token op = cur_;
        advance();
        require_operand(op);
        bool negate = false;
        if (cur_.kind == Tok::Minus || cur_.kind == Tok::Plus) {
            negate = cur_.kind == Tok::Minus;
            Token sign = cur_;
            advance();
            require_operand(sign);
        }
        if (++depth_ > kMaxDepth) throw ParseError("expression nested too deeply", op.pos);
        Expr exponent = power();
        --depth_;
        return Expr::pow(base, negate ? -exponent : exponent);
    }

    Expr atom() {
        switch (cur_.kind) {
            case Tok::Number: {
                double v = cur_.number;
                advance();
                return num(v);
            }
            case Tok::LParen: {
                advance();
                Expr e = expression();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident: return identifier();
            default:
                throw ParseError("expected operand, found '" + std::string(describe(cur_)) + "'",
                                 cur_.pos);
        }
    }

    Expr identifier() {
        Token id = cur_;
        advance();
        if (id.text == "pi") return num(std::numbers::pi);
        if (auto v = var_from_name(id.text)) return var(*v);

        std::optional<Kind> fn;
        if (id.text == "exp") fn = Kind::Exp;
        else if (id.text == "ln") fn = Kind::Ln;
        else if (id.text == "sin") fn = Kind::Sin;
        else if (id.text == "cos") fn = Kind::Cos;
        else if (id.text == "max") fn = Kind::Max;
        if (!fn) throw ParseError("unknown identifier '" + std::string(id.text) + "'", id.pos);

        if (cur_.kind != Tok::LParen)
            throw ParseError("expected '(' after function '" + std::string(id.text) + "'", cur_.pos);
        advance();
        std::vector<Expr> args;
        args.push_back(expression());
        while (cur_.kind == Tok::Comma) {
            advance();
            args.push_back(expression());
        }
        expect(Tok::RParen, "')'");

        const std::size_t want = *fn == Kind::Max ? 2 : 1;
        if (args.size() != want) {
            throw ParseError(std::string(id.text) + " expects " + std::to_string(want) +
                                 " argument(s), got " + std::to_string(args.size()),
                             id.pos);
        }
        if (*fn == Kind::Max) return Expr::max(args[0], args[1]);
        return Expr::apply(*fn, args[0]);
    }

    void expect(Tok kind, std::string_view what) {
        if (cur_.kind != kind)
            throw ParseError("expected " + std::string(what) + ", found '" +
                                 std::string(describe(cur_)) + "'",
                             cur_.pos);
        advance();
    }

    static constexpr int kMaxDepth = 256;

    Lexer lex_;
    Token cur_;
    int depth_ = 0;
};

}  // namespace

Expr parse_expr_raw(std::string_view text) {
    if (text.size() > kMaxInputBytes)
        throw ParseError("expression exceeds " + std::to_string(kMaxInputBytes) + " bytes",
                         kMaxInputBytes);
    return Parser(text).parse();
}

Expr parse_expr(std::string_view text) { return simplify(parse_expr_raw(text)); }

}  // namespace fracbs::expr
