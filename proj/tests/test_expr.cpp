#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "crforge/expr.hpp"

using namespace crforge;

namespace {

using lcplx = std::complex<long double>;

lcplx fd1(const expr_ptr& e, const std::vector<std::string>& coords,
          std::vector<long double> p, int i, long double h) {
    std::vector<long double> a = p, b = p;
    a[size_t(i)] += h;
    b[size_t(i)] -= h;
    return (eval_value<long double>(e, coords, a) -
            eval_value<long double>(e, coords, b)) /
           (2.0L * h);
}

lcplx fd2(const expr_ptr& e, const std::vector<std::string>& coords,
          std::vector<long double> p, int i, int j, long double h) {
    if (i == j) {
        std::vector<long double> a = p, b = p;
        a[size_t(i)] += h;
        b[size_t(i)] -= h;
        return (eval_value<long double>(e, coords, a) -
                2.0L * eval_value<long double>(e, coords, p) +
                eval_value<long double>(e, coords, b)) /
               (h * h);
    }
    std::vector<long double> pp = p, pm = p, mp = p, mm = p;
    pp[size_t(i)] += h; pp[size_t(j)] += h;
    pm[size_t(i)] += h; pm[size_t(j)] -= h;
    mp[size_t(i)] -= h; mp[size_t(j)] += h;
    mm[size_t(i)] -= h; mm[size_t(j)] -= h;
    return (eval_value<long double>(e, coords, pp) -
            eval_value<long double>(e, coords, pm) -
            eval_value<long double>(e, coords, mp) +
            eval_value<long double>(e, coords, mm)) /
           (4.0L * h * h);
}

double rel_err(cplx a, lcplx b) {
    long double d = std::abs(lcplx(a) - b);
    long double s = std::max({(long double)1.0, std::abs(lcplx(a)), std::abs(b)});
    return double(d / s);
}

}  // namespace

TEST_CASE("parser shapes") {
    expr_ptr e = parse_expr("x + 2*y");
    REQUIRE(e->kind == expr_kind::add);
    CHECK(e->a->kind == expr_kind::var);
    CHECK(e->a->name == "x");
    REQUIRE(e->b->kind == expr_kind::mul);
    CHECK(e->b->a->kind == expr_kind::literal);
    CHECK(e->b->b->name == "y");

    expr_ptr n = parse_expr("exp(-(x^2+y^2))");
    REQUIRE(n->kind == expr_kind::call);
    CHECK(n->name == "exp");
    CHECK(n->a->kind == expr_kind::neg);
}

TEST_CASE("precedence and associativity") {
    std::vector<std::string> c = {"x"};
    std::vector<double> p = {2.0};
    // Power binds tighter than unary minus.
    CHECK(eval_value(parse_expr("-x^2"), c, p).real() == -4.0);
    // Left associativity of subtraction and division.
    CHECK(eval_value(parse_expr("10 - 3 - 2"), c, p).real() == 5.0);
    CHECK(eval_value(parse_expr("16/4/2"), c, p).real() == 2.0);
    // Multiplication over addition.
    CHECK(eval_value(parse_expr("1 + 2*3"), c, p).real() == 7.0);
    CHECK(eval_value(parse_expr("x^-2"), c, p).real() == 0.25);
    // The imaginary unit is reserved.
    cplx z = eval_value(parse_expr("(1 + 2*i)*(1 - 2*i)"), c, p);
    CHECK(std::abs(z - cplx(5.0)) < 1e-15);
}

TEST_CASE("print/parse round-trip is idempotent") {
    const char* cases[] = {
        "x + 2*y",
        "exp(-(x^2 + y^2))",
        "(x + y)*(x - y)/(1 + x^2)",
        "-x^3 + conj(x + i*y)",
        "sin(x)*cos(y) - sqrt(x*x + 1)",
        "re(x + i*y) + im(x - i*y)",
        "1/(2 + cosh(x))^2",
        "-(x + y)^2",
    };
    for (const char* s : cases) {
        std::string once = print_expr(parse_expr(s));
        std::string twice = print_expr(parse_expr(once));
        CHECK(once == twice);
        // Semantics preserved.
        std::vector<std::string> c = {"x", "y"};
        std::vector<double> p = {0.37, -0.81};
        cplx v1 = eval_value(parse_expr(s), c, p);
        cplx v2 = eval_value(parse_expr(once), c, p);
        CHECK(std::abs(v1 - v2) < 1e-14);
    }
}

TEST_CASE("parse errors carry position and expectations") {
    try {
        parse_expr("x + * y");
        FAIL("no error");
    } catch (const parse_error& err) {
        CHECK(err.col == 5);
        CHECK(std::string(err.what()).find("expected") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("sin x"), parse_error);
    CHECK_THROWS_AS(parse_expr("(x + y"), parse_error);
    CHECK_THROWS_AS(parse_expr("x ^ y"), parse_error);
    CHECK_THROWS_AS(parse_expr("x @ y"), parse_error);
    CHECK_THROWS_AS(parse_expr("x + ", {"x"}), parse_error);

    // Unknown identifier diagnostics list the declared coordinates.
    try {
        parse_expr("x + q", {"x", "y", "t"});
        FAIL("no error");
    } catch (const parse_error& err) {
        std::string msg = err.what();
        CHECK(msg.find("'q'") != std::string::npos);
        CHECK(msg.find("x, y, t") != std::string::npos);
    }
}

TEST_CASE("parser totality on fuzzed inputs") {
    std::mt19937 rng(99);
    const std::string alphabet = "xy+-*/^()0123456789. iconjexplogsqrt,";
    for (int trial = 0; trial < 2000; ++trial) {
        int len = 1 + int(rng() % 24);
        std::string s;
        for (int k = 0; k < len; ++k)
            s += alphabet[rng() % alphabet.size()];
        try {
            expr_ptr e = parse_expr(s);
            CHECK(e != nullptr);
        } catch (const parse_error&) {
            // positioned error is the accepted outcome
        }
    }
}

TEST_CASE("jet evaluation matches hand values") {
    std::vector<std::string> c = {"x", "y"};
    jet j = eval_jet(parse_expr("x*y"), c, {1.0, 2.0}, 2);
    CHECK(j.coeff({0, 0}) == cplx(2.0));
    CHECK(j.coeff({1, 0}) == cplx(2.0));
    CHECK(j.coeff({0, 1}) == cplx(1.0));
    CHECK(j.coeff({1, 1}) == cplx(1.0));
    CHECK(j.coeff({2, 0}) == cplx(0.0));

    CHECK_THROWS_AS(eval_jet(parse_expr("1/x"), {"x"}, {0.0}, 2),
                    domain_error);
    CHECK_THROWS_AS(eval_jet(parse_expr("log(x - 1)"), {"x"}, {1.0}, 2),
                    domain_error);
}

TEST_CASE("jet coefficients agree with central differences") {
    struct sample {
        const char* text;
        std::vector<long double> at;
    };
    const std::vector<std::string> c = {"x", "y"};
    const sample samples[] = {
        {"sin(x)", {0.3L, 0.0L}},
        {"exp(x*y) - y^2", {0.4L, -0.6L}},
        {"conj(x + i*y)*(x + i*y)", {0.5L, 0.2L}},
        {"sqrt(1 + x^2 + y^2)", {0.7L, -0.3L}},
        {"(x + i*y)/(2 + x)", {0.25L, 0.75L}},
        {"sinh(x)*cos(y) + cosh(y)", {0.45L, 0.15L}},
        {"re(exp(i*x)) + im(exp(i*y))", {0.6L, 0.35L}},
    };
    const long double h = 1e-5L;
    for (const sample& s : samples) {
        expr_ptr e = parse_expr(s.text);
        std::vector<double> p(s.at.begin(), s.at.end());
        jet j = eval_jet(e, c, p, 3);
        for (int i = 0; i < 2; ++i) {
            std::vector<int> idx = {0, 0};
            idx[size_t(i)] = 1;
            CHECK(rel_err(j.partial(idx), fd1(e, c, s.at, i, h)) < 1e-6);
            for (int k = i; k < 2; ++k) {
                std::vector<int> idx2 = {0, 0};
                idx2[size_t(i)] += 1;
                idx2[size_t(k)] += 1;
                CHECK(rel_err(j.partial(idx2), fd2(e, c, s.at, i, k, h)) <
                      1e-6);
            }
        }
    }
}
