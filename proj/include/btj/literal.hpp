#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "btj/field.hpp"

namespace btj {

/*
 * Element literal grammar, shared by the CLI and the JSON formats:
 *
 *   rational form   "num/den", plain integers included
 *   expansion form  "p^v * (d0 + d1*p + d2*p^2 + ...) + O(p^N)"
 *   zero            "0" or "O(p^N)"
 *
 * with the uniformiser spelled "p" for padic fields and "t" for Laurent
 * fields. Arbitrary +,-,*,/ combinations and parentheses are accepted, so
 * entries like "1/p" or "2+p^3" parse directly. Sequence entries may use the
 * symbol n in exponents ("p^n", "p^(2n+1)"); evaluation then requires an
 * index.
 */

class ElementExpr {
public:
    ElementExpr() = default;

    static ElementExpr parse(const std::string& text) {
        ElementExpr e;
        e.text_ = text;
        Parser p(text);
        e.root_ = p.parse_expr();
        p.expect_end();
        return e;
    }

    // Evaluates in the given field. `n` substitutes the sequence index.
    Element eval(const Field& f, std::optional<long long> n = std::nullopt) const {
        if (!root_) throw Error("empty element expression");
        return eval_node(*root_, f, n);
    }

    bool uses_index() const { return root_ && node_uses_index(*root_); }
    const std::string& text() const { return text_; }

private:
    struct Affine { // a*n + b exponents
        long long coef_n = 0;
        long long cst = 0;
        long long at(std::optional<long long> n) const {
            if (coef_n == 0) return cst;
            if (!n) throw Error("expression uses the index n but no index was supplied");
            return coef_n * *n + cst;
        }
    };
    struct Node {
        enum class Kind { integer, uniformiser, big_oh, add, sub, mul, div, neg, pow } kind;
        long long value = 0; // integer payload
        Affine exponent;     // pow / big_oh payload
        std::unique_ptr<Node> lhs, rhs;
    };

    static bool node_uses_index(const Node& nd) {
        if ((nd.kind == Node::Kind::pow || nd.kind == Node::Kind::big_oh) &&
            nd.exponent.coef_n != 0)
            return true;
        if (nd.lhs && node_uses_index(*nd.lhs)) return true;
        if (nd.rhs && node_uses_index(*nd.rhs)) return true;
        return false;
    }

    static Element eval_node(const Node& nd, const Field& f, std::optional<long long> n) {
        switch (nd.kind) {
            case Node::Kind::integer: return Element::from_int(f, nd.value);
            case Node::Kind::uniformiser: return Element::uniformiser(f);
            case Node::Kind::big_oh: return Element::zero_like(f, nd.exponent.at(n));
            case Node::Kind::add: return eval_node(*nd.lhs, f, n) + eval_node(*nd.rhs, f, n);
            case Node::Kind::sub: return eval_node(*nd.lhs, f, n) - eval_node(*nd.rhs, f, n);
            case Node::Kind::mul: return eval_node(*nd.lhs, f, n) * eval_node(*nd.rhs, f, n);
            case Node::Kind::div: return eval_node(*nd.lhs, f, n) / eval_node(*nd.rhs, f, n);
            case Node::Kind::neg: return -eval_node(*nd.lhs, f, n);
            case Node::Kind::pow: {
                const Node& base = *nd.lhs;
                long long k = nd.exponent.at(n);
                if (base.kind == Node::Kind::uniformiser)
                    return Element::uniformiser(f, k);
                return eval_node(base, f, n).pow(k);
            }
        }
        throw Error("corrupt element expression");
    }

    class Parser {
    public:
        explicit Parser(const std::string& s) : s_(s) {}

        std::unique_ptr<Node> parse_expr() {
            auto lhs = parse_term();
            for (;;) {
                skip_ws();
                if (peek() == '+') {
                    ++pos_;
                    lhs = binary(Node::Kind::add, std::move(lhs), parse_term());
                } else if (peek() == '-') {
                    ++pos_;
                    lhs = binary(Node::Kind::sub, std::move(lhs), parse_term());
                } else {
                    return lhs;
                }
            }
        }

        void expect_end() {
            skip_ws();
            if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        }

    private:
        std::unique_ptr<Node> parse_term() {
            auto lhs = parse_factor();
            for (;;) {
                skip_ws();
                if (peek() == '*') {
                    ++pos_;
                    lhs = binary(Node::Kind::mul, std::move(lhs), parse_factor());
                } else if (peek() == '/') {
                    ++pos_;
                    lhs = binary(Node::Kind::div, std::move(lhs), parse_factor());
                } else {
                    return lhs;
                }
            }
        }

        std::unique_ptr<Node> parse_factor() {
            skip_ws();
            if (peek() == '-') {
                ++pos_;
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::neg;
                n->lhs = parse_factor();
                return n;
            }
            auto atom = parse_atom();
            skip_ws();
            if (peek() == '^') {
                ++pos_;
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::pow;
                n->exponent = parse_exponent();
                n->lhs = std::move(atom);
                return n;
            }
            return atom;
        }

        std::unique_ptr<Node> parse_atom() {
            skip_ws();
            size_t at = pos_;
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::integer;
                n->value = parse_int_body();
                return n;
            }
            if (c == 'p' || c == 't') {
                ++pos_;
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::uniformiser;
                return n;
            }
            if (c == 'O') {
                ++pos_;
                skip_ws();
                if (peek() != '(') throw ParseError("expected '(' after O", pos_);
                ++pos_;
                skip_ws();
                char sym = peek();
                if (sym != 'p' && sym != 't')
                    throw ParseError("expected uniformiser inside O(...)", pos_);
                ++pos_;
                skip_ws();
                Affine e{0, 1};
                if (peek() == '^') {
                    ++pos_;
                    e = parse_exponent();
                }
                skip_ws();
                if (peek() != ')') throw ParseError("expected ')' to close O(...)", pos_);
                ++pos_;
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::big_oh;
                n->exponent = e;
                return n;
            }
            if (c == '(') {
                ++pos_;
                auto inner = parse_expr();
                skip_ws();
                if (peek() != ')') throw ParseError("expected ')'", pos_);
                ++pos_;
                return inner;
            }
            throw ParseError(std::string("unexpected character '") + c + "' in element literal",
                             at);
        }

        // integer | n | k*n | kn | n+k | (affine)
        Affine parse_exponent() {
            skip_ws();
            if (peek() == '(') {
                ++pos_;
                Affine a = parse_affine();
                skip_ws();
                if (peek() != ')') throw ParseError("expected ')' in exponent", pos_);
                ++pos_;
                return a;
            }
            return parse_affine_atom();
        }

        Affine parse_affine() {
            Affine a = parse_affine_atom();
            for (;;) {
                skip_ws();
                if (peek() == '+') {
                    ++pos_;
                    Affine b = parse_affine_atom();
                    a.coef_n += b.coef_n;
                    a.cst += b.cst;
                } else if (peek() == '-') {
                    ++pos_;
                    Affine b = parse_affine_atom();
                    a.coef_n -= b.coef_n;
                    a.cst -= b.cst;
                } else {
                    return a;
                }
            }
        }

        Affine parse_affine_atom() {
            skip_ws();
            bool negate = false;
            if (peek() == '-') {
                negate = true;
                ++pos_;
                skip_ws();
            }
            Affine a;
            if (peek() == 'n') {
                ++pos_;
                a.coef_n = 1;
            } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
                long long k = parse_int_body();
                skip_ws();
                if (peek() == 'n') { // "2n"
                    ++pos_;
                    a.coef_n = k;
                } else if (peek() == '*') { // "2*n"
                    size_t save = pos_;
                    ++pos_;
                    skip_ws();
                    if (peek() == 'n') {
                        ++pos_;
                        a.coef_n = k;
                    } else {
                        pos_ = save;
                        a.cst = k;
                    }
                } else {
                    a.cst = k;
                }
            } else {
                throw ParseError("expected integer or n in exponent", pos_);
            }
            if (negate) {
                a.coef_n = -a.coef_n;
                a.cst = -a.cst;
            }
            return a;
        }

        long long parse_int_body() {
            size_t at = pos_;
            long long v = 0;
            bool any = false;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                v = v * 10 + (s_[pos_] - '0');
                ++pos_;
                any = true;
                if (v > (1LL << 60)) throw ParseError("integer literal too large", at);
            }
            if (!any) throw ParseError("expected integer", at);
            return v;
        }

        static std::unique_ptr<Node> binary(Node::Kind k, std::unique_ptr<Node> l,
                                            std::unique_ptr<Node> r) {
            auto n = std::make_unique<Node>();
            n->kind = k;
            n->lhs = std::move(l);
            n->rhs = std::move(r);
            return n;
        }

        char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
        void skip_ws() {
            while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }

        const std::string& s_;
        size_t pos_ = 0;
    };

    std::shared_ptr<Node> root_;
    std::string text_;
};

inline Element parse_element(const Field& f, const std::string& text,
                             std::optional<long long> n = std::nullopt) {
    // The uniformiser must be spelled to match the field.
    char wrong = f.kind == FieldKind::padic ? 't' : 'p';
    for (size_t i = 0; i < text.size(); ++i)
        if (text[i] == wrong)
            throw ParseError(std::string("uniformiser must be spelled '") +
                                 f.uniformiser_symbol() + "' for " + f.to_string(),
                             i);
    return ElementExpr::parse(text).eval(f, n);
}

// Canonical serialisation; parse_element(serialize_element(x)) == x.
inline std::string serialize_element(const Element& x) {
    const Field& f = x.field();
    const char sym = f.uniformiser_symbol();
    std::ostringstream os;
    if (x.is_zero_like()) {
        if (x.is_exact_zero()) return "0";
        os << "O(" << sym << "^" << x.zero_bound() << ")";
        return os.str();
    }
    os << sym << "^" << x.val() << " * (";
    bool first = true;
    for (size_t i = 0; i < x.digits().size(); ++i) {
        if (x.digits()[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << x.digits()[i];
        if (i == 1) os << "*" << sym;
        if (i > 1) os << "*" << sym << "^" << i;
    }
    if (first) os << "0";
    os << ") + O(" << sym << "^" << x.horizon() << ")";
    return os.str();
}

inline Field parse_field(const std::string& spec, int precision = 64) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ParseError("field spec must look like padic:7 or laurent:5", 0);
    std::string kind = spec.substr(0, colon);
    long long p = 0;
    try {
        p = std::stoll(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParseError("bad prime in field spec '" + spec + "'", colon + 1);
    }
    if (kind == "padic") return Field::padic(p, precision);
    if (kind == "laurent") return Field::laurent(p, precision);
    throw ParseError("unknown field kind '" + kind + "'", 0);
}

} // namespace btj
