#include "doctest.h"

#include "btj/field.hpp"
#include "helpers.hpp"

using namespace btj;
using namespace btj_test;

TEST_CASE("rational images carry exact valuations") {
    Field q7 = Field::padic(7, 8);
    Element x = Element::from_rational(q7, 49, 3);
    CHECK(x.valuation() == Valuation::Exact(2));
    CHECK(x.digit(0) == 5); // 49/3 = 49 * 3^{-1}, 3^{-1} = 5 mod 7

    CHECK(Element::from_rational(q7, 1, 1).valuation() == Valuation::Exact(0));
    CHECK(Element::from_rational(q7, 1, 1).digit(0) == 1);
    CHECK(Element::from_rational(q7, 7, 1).valuation() == Valuation::Exact(1));
    CHECK(Element::from_rational(q7, 7, 1).digit(0) == 1);

    CHECK_THROWS_AS(Element::from_rational(q7, 1, 0), DivisionByZeroLike);

    // cross-check a spread of rationals against the long-division oracle
    Rng rng(17);
    for (const Field& f : {Field::padic(2), Field::padic(5), Field::padic(97)}) {
        for (int i = 0; i < 200; ++i) {
            long long num = rng.uniform(-5000, 5000);
            long long den = rng.uniform(1, 5000);
            if (num == 0) continue;
            CHECK(Element::from_rational(f, num, den).valuation() ==
                  Valuation::Exact(rational_valuation_oracle(num, den, f.p)));
        }
    }
}

TEST_CASE("valuation answers for signed integers match long division") {
    CHECK(Element::from_int(Field::padic(2), -4).valuation() == Valuation::Exact(2));
    CHECK(Element::from_int(Field::padic(7), -4).valuation() == Valuation::Exact(0));
    Field q5 = Field::padic(5);
    Rng rng(3);
    Element y = random_element(rng, q5);
    Element z = y + (-y);
    CHECK(z.is_zero_like());
    CHECK(z.valuation() == Valuation::AtLeast(y.val() + y.precision()));
}

TEST_CASE("uniformiser algebra") {
    for (const Field& f : {Field::padic(5), Field::laurent(3)}) {
        Element pi = Element::uniformiser(f);
        CHECK((pi * pi).valuation() == Valuation::Exact(2));
        Element one_plus_pi = Element::one(f) + pi;
        CHECK(one_plus_pi.valuation() == Valuation::Exact(0));
        CHECK(one_plus_pi.digit(0) == 1);
        CHECK(one_plus_pi.digit(1) == 1);
    }
}

TEST_CASE("multiplicativity and the ultrametric law hold on random pairs") {
    Rng rng(42);
    for (const Field& f : {Field::padic(2, 32), Field::padic(5, 32), Field::padic(7, 32),
                           Field::laurent(2, 32), Field::laurent(5, 32)}) {
        for (int i = 0; i < 1000; ++i) {
            Element x = random_element(rng, f);
            Element y = random_element(rng, f);
            CHECK((x * y).valuation() == Valuation::Exact(x.val() + y.val()));
            Element s = x + y;
            long long lo = std::min(x.val(), y.val());
            CHECK(s.valuation().n >= lo);
            if (x.val() != y.val()) CHECK(s.valuation() == Valuation::Exact(lo));
        }
    }
}

TEST_CASE("inverse round-trips") {
    Rng rng(7);
    for (const Field& f : {Field::padic(2, 32), Field::padic(13, 32), Field::laurent(2, 32),
                           Field::laurent(7, 32)}) {
        for (int i = 0; i < 100; ++i) {
            Element x = random_element(rng, f);
            CHECK(agrees(x.inverse().inverse(), x));
            CHECK(agrees_with_int(x * x.inverse(), 1));
        }
    }
    CHECK_THROWS_AS(Element::exact_zero(Field::padic(5)).inverse(), DivisionByZeroLike);
}

TEST_CASE("square detection") {
    Field q7 = Field::padic(7);
    CHECK(is_square(Element::from_int(q7, -3)) == Ternary::yes);
    CHECK(is_square(Element::from_int(q7, 12)) == Ternary::no);
    CHECK(is_square(Element::from_int(q7, -4)) == Ternary::no);

    Field q5 = Field::padic(5);
    // squares mod 5 are {1, 4}
    for (long long r = 1; r < 5; ++r) {
        bool residue_square = (r == 1 || r == 4);
        CHECK((is_square(Element::from_int(q5, r)) == Ternary::yes) == residue_square);
    }
    CHECK(is_square(Element::from_int(q5, 2)) == Ternary::no);
    CHECK(is_square(Element::uniformiser(q5)) == Ternary::no); // odd valuation

    Field q2 = Field::padic(2);
    CHECK(is_square(Element::from_int(q2, 17)) == Ternary::yes);  // 1 mod 8
    CHECK(is_square(Element::from_int(q2, 3)) == Ternary::no);
    CHECK(is_square(Element::from_int(q2, 5)) == Ternary::no);
    CHECK(is_square(Element::from_int(q2, 1, 2)) == Ternary::indeterminate);

    Field l2 = Field::laurent(2);
    Element t = Element::uniformiser(l2);
    CHECK(is_square(Element::one(l2) + t) == Ternary::no); // odd coefficient
    CHECK(is_square(Element::one(l2) + t * t) == Ternary::indeterminate);

    CHECK_THROWS_AS(is_square(Element::exact_zero(q5)), ZeroLikeInput);
}

TEST_CASE("square roots lift correctly and pick the canonical branch") {
    Field q7 = Field::padic(7);
    Element r = btj::sqrt(Element::from_int(q7, -3));
    CHECK(r.digit(0) == 2); // 2^2 = 4 = -3 mod 7; canonical root has the smaller digit
    CHECK(agrees(r * r, Element::from_int(q7, -3)));

    Field q5 = Field::padic(5);
    CHECK(btj::sqrt(Element::from_int(q5, 4)).digit(0) == 2);
    CHECK_THROWS_AS(btj::sqrt(Element::from_int(q5, 2)), NotASquare);

    Rng rng(11);
    for (const Field& f : {Field::padic(5, 32), Field::padic(2, 32), Field::laurent(3, 32),
                           Field::laurent(2, 32)}) {
        int done = 0;
        while (done < 50) {
            Element x = random_element(rng, f);
            Element sq = x * x;
            Element root = btj::sqrt(sq);
            CHECK(agrees(root * root, sq));
            ++done;
        }
    }

    // Q_2 canonical branch: 1 mod 4
    Field q2 = Field::padic(2);
    Element s = btj::sqrt(Element::from_int(q2, 17));
    CHECK(s.digit(0) == 1);
    CHECK(s.digit(1) == 0);
    CHECK(agrees(s * s, Element::from_int(q2, 17)));
}

TEST_CASE("quadratic roots of x^2 - t x + 1") {
    SUBCASE("negative trace valuation always splits with v(lambda) = v(t)") {
        for (const Field& f : {Field::padic(5), Field::padic(2), Field::laurent(3)}) {
            Element t = Element::uniformiser(f) + Element::uniformiser(f, -1);
            QuadRoots qr = quadratic_roots(t);
            REQUIRE(qr.kind == QuadRoots::Kind::split);
            CHECK(qr.lambda.val() == -1);
            CHECK(qr.lambda_inv.val() == 1);
            CHECK(agrees_with_int(qr.lambda * qr.lambda_inv, 1));
            CHECK(agrees(qr.lambda + qr.lambda_inv, t));
        }
    }
    SUBCASE("non-split by residue obstruction") {
        CHECK(quadratic_roots(Element::exact_zero(Field::padic(7))).kind ==
              QuadRoots::Kind::non_split); // x^2 + 1 over Q_7, -4 non-square
        CHECK(quadratic_roots(Element::one(Field::padic(2))).kind ==
              QuadRoots::Kind::non_split); // order-6 trace is not split over Q_2
    }
    SUBCASE("repeated eigenvalue boundary is indeterminate") {
        CHECK(quadratic_roots(Element::from_int(Field::padic(5), 2)).kind ==
              QuadRoots::Kind::indeterminate);
    }
    SUBCASE("split roots satisfy both symmetric functions") {
        Rng rng(23);
        for (const Field& f : {Field::padic(5, 32), Field::padic(2, 32),
                               Field::laurent(5, 32)}) {
            int split_seen = 0;
            for (int i = 0; i < 200 && split_seen < 40; ++i) {
                Element t = random_element(rng, f);
                QuadRoots qr = quadratic_roots(t);
                if (qr.kind != QuadRoots::Kind::split) continue;
                ++split_seen;
                CHECK(agrees_with_int(qr.lambda * qr.lambda_inv, 1));
                CHECK(agrees(qr.lambda + qr.lambda_inv, t));
            }
            CHECK(split_seen > 0);
        }
    }
}

TEST_CASE("precision model: cancellation produces honest bounds") {
    Field q5 = Field::padic(5, 16);
    Element a = Element::from_int(q5, 1) + Element::uniformiser(q5, 10);
    Element b = Element::one(q5);
    Element d = a - b; // = p^10 exactly, well inside the window
    CHECK(d.valuation() == Valuation::Exact(10));
    Element e = a - a;
    CHECK(e.is_zero_like());
    CHECK(e.zero_bound() == 16);

    // zero-like absorbs additions beyond its bound
    Element z = Element::zero_like(q5, 3);
    Element big = Element::uniformiser(q5, 5);
    CHECK((z + big).is_zero_like());
    CHECK((z + big).zero_bound() == 3);
    Element small = Element::one(q5);
    CHECK((z + small).valuation() == Valuation::Exact(0));
    CHECK((z + small).precision() == 3);
}
