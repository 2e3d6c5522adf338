#include "doctest.h"

#include "btj/literal.hpp"
#include "helpers.hpp"

using namespace btj;
using namespace btj_test;

TEST_CASE("rational and uniformiser literals") {
    Field q5 = Field::padic(5);
    CHECK(agrees(parse_element(q5, "3/4"), Element::from_rational(q5, 3, 4)));
    CHECK(agrees(parse_element(q5, "-7"), Element::from_int(q5, -7)));
    CHECK(parse_element(q5, "p").valuation() == Valuation::Exact(1));
    CHECK(parse_element(q5, "1/p").valuation() == Valuation::Exact(-1));
    CHECK(parse_element(q5, "p^3").valuation() == Valuation::Exact(3));
    CHECK(parse_element(q5, "p^-2").valuation() == Valuation::Exact(-2));
    CHECK(agrees(parse_element(q5, "2 + p^3"),
                 Element::from_int(q5, 2) + Element::uniformiser(q5, 3)));
    CHECK(agrees(parse_element(q5, "1/(1+p)"),
                 (Element::one(q5) + Element::uniformiser(q5)).inverse()));
    CHECK(parse_element(q5, "0").is_exact_zero());

    Field l3 = Field::laurent(3);
    CHECK(parse_element(l3, "t^2").valuation() == Valuation::Exact(2));
    CHECK(agrees(parse_element(l3, "1 + 2*t"),
                 Element::one(l3) + Element::from_int(l3, 2) * Element::uniformiser(l3)));
}

TEST_CASE("zero-like literals") {
    Field q5 = Field::padic(5);
    Element z = parse_element(q5, "O(p^9)");
    CHECK(z.is_zero_like());
    CHECK(z.zero_bound() == 9);
    Element y = parse_element(q5, "p^2 * (3 + 1*p) + O(p^9)");
    CHECK(y.val() == 2);
    CHECK(y.digit(0) == 3);
    CHECK(y.digit(1) == 1);
    CHECK(y.precision() == 7);
}

TEST_CASE("serialisation round-trips digit for digit") {
    Rng rng(5);
    for (const Field& f : {Field::padic(5, 24), Field::padic(2, 24), Field::laurent(3, 24)}) {
        for (int i = 0; i < 50; ++i) {
            Element x = random_element(rng, f);
            Element back = parse_element(f, serialize_element(x));
            CHECK(back == x);
        }
        CHECK(parse_element(f, serialize_element(Element::exact_zero(f))).is_exact_zero());
        Element zl = Element::zero_like(f, 7);
        CHECK(parse_element(f, serialize_element(zl)).zero_bound() == 7);
    }
}

TEST_CASE("sequence expressions use the index in exponents") {
    Field q5 = Field::padic(5);
    ElementExpr e = ElementExpr::parse("1 + p^n");
    CHECK(e.uses_index());
    CHECK(agrees(e.eval(q5, 3), Element::one(q5) + Element::uniformiser(q5, 3)));
    CHECK_THROWS_AS(e.eval(q5), Error);

    ElementExpr f2 = ElementExpr::parse("p^(2n+1)");
    CHECK(f2.eval(q5, 2).valuation() == Valuation::Exact(5));

    ElementExpr g = ElementExpr::parse("1/(1+p^n)");
    Element v = g.eval(q5, 2);
    CHECK(agrees_with_int(v * (Element::one(q5) + Element::uniformiser(q5, 2)), 1));
}

TEST_CASE("parse errors carry positions and the right symbol is enforced") {
    Field q5 = Field::padic(5);
    CHECK_THROWS_AS(parse_element(q5, "1 + *"), ParseError);
    CHECK_THROWS_AS(parse_element(q5, "t^2"), ParseError); // wrong uniformiser
    CHECK_THROWS_AS(parse_element(Field::laurent(5), "p^2"), ParseError);
    CHECK_THROWS_AS(parse_element(q5, "(1"), ParseError);
    CHECK_THROWS_AS(parse_element(q5, "1/0"), DivisionByZeroLike);
    try {
        parse_element(q5, "2 + @");
    } catch (const ParseError& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("field specs") {
    Field f = parse_field("padic:7", 32);
    CHECK(f.kind == FieldKind::padic);
    CHECK(f.p == 7);
    CHECK(f.precision == 32);
    CHECK(parse_field("laurent:5").kind == FieldKind::laurent);
    CHECK_THROWS_AS(parse_field("real:5"), ParseError);
    CHECK_THROWS_AS(parse_field("padic"), ParseError);
    CHECK_THROWS_AS(parse_field("padic:6"), Error); // not prime
}
