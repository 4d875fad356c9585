#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "diffrep/errors.hpp"
#include "diffrep/expr.hpp"

namespace diffrep::expr {

namespace {

class Parser {
public:
    Parser(const std::string& src, const VarContext& ctx) : s_(src), ctx_(ctx) {}

    Expr parse_all() {
        for (std::size_t i = 0; i < s_.size(); ++i)
            if (static_cast<unsigned char>(s_[i]) > 127) throw ParseError("non-ASCII character", i);
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+')) e = add(e, term());
            else if (accept('-')) e = sub(e, term());
            else return e;
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (accept('*')) {
                e = mul(e, factor());
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Expr d = factor();
                if (is_const(d, 0.0)) throw ParseError("division by zero", at);
                e = div(e, d);
            } else {
                return e;
            }
        }
    }

    Expr factor() {
        Expr b = base();
        if (accept('^')) {
            skip();
            const std::size_t at = pos_;
            bool negative = false;
            if (pos_ < s_.size() && s_[pos_] == '-') {
                negative = true;
                ++pos_;
            }
            std::size_t end = pos_;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
            if (end == pos_) throw ParseError("expected integer exponent", at);
            if (end - pos_ > 6) throw ParseError("exponent too large", at);
            const int k = std::stoi(s_.substr(pos_, end - pos_));
            pos_ = end;
            if (is_const(b, 0.0) && negative) throw ParseError("zero raised to a negative power", at);
            return pow(b, negative ? -k : k);
        }
        return b;
    }

    Expr base() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        std::size_t i = pos_;
        auto digits = [&] {
            const std::size_t d0 = i;
            while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
            return i - d0;
        };
        std::size_t nd = digits();
        if (i < s_.size() && s_[i] == '.') {
            ++i;
            nd += digits();
        }
        if (nd == 0) throw ParseError("malformed number", start);
        if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
            const std::size_t e0 = j;
            while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
            if (j == e0) throw ParseError("malformed exponent", i);
            i = j;
        }
        const std::string text = s_.substr(start, i - start);
        pos_ = i;
        const double v = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(v)) throw ParseError("number out of range", start);
        return constant(v);
    }

    Expr ident() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        skip();
        const bool call = pos_ < s_.size() && s_[pos_] == '(';
        if (name == "exp" || name == "sin" || name == "cos" || name == "bump") {
            if (!call) throw ParseError("function '" + name + "' needs arguments", pos_);
            ++pos_;
            std::vector<std::pair<Expr, std::size_t>> args;
            skip();
            args.emplace_back(nullptr, pos_);
            args.back().first = expr();
            while (accept(',')) {
                skip();
                args.emplace_back(nullptr, pos_);
                args.back().first = expr();
            }
            expect(')');
            if (name == "bump") {
                if (args.size() != 2) throw ParseError("bump takes 2 arguments", start);
                for (const auto& [e, at] : args)
                    if (!is_const(e)) throw ParseError("bump radius must be a constant", at);
                const double r1 = args[0].first->value, r2 = args[1].first->value;
                if (!(r1 >= 0.0 && r1 < r2)) throw ParseError("bump radii need 0 <= r1 < r2", args[0].second);
                return bump(r1, r2, ctx_.dim());
            }
            if (args.size() != 1) throw ParseError("function '" + name + "' takes 1 argument", start);
            if (name == "exp") return expr::exp(args[0].first);
            if (name == "sin") return expr::sin(args[0].first);
            return expr::cos(args[0].first);
        }
        if (call) throw ParseError("unknown function '" + name + "'", start);
        const int k = ctx_.lookup(name);
        if (k < 0) throw ParseError("unknown identifier '" + name + "'", start);
        return var(k);
    }

    const std::string& s_;
    const VarContext& ctx_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(const std::string& source, const VarContext& ctx) { return Parser(source, ctx).parse_all(); }

}  // namespace diffrep::expr
