#include "doctest.h"

#include "hplab/linalg.hpp"

#include <random>

using namespace hplab;

namespace {

template <class T>
bool annihilates(const Matrix<T>& m, const std::vector<T>& x)
{
    for (const auto& r : apply(m, x))
        if (!is_zero(r)) return false;
    return true;
}

}  // namespace

TEST_CASE("rational nullspace of a rank-deficient matrix")
{
    Matrix<Rational> m(2, 4, Rational(0));
    // rows: (1, 2, 3, 4), (2, 4, 6, 9)  -> rank 2, nullity 2
    const int vals[2][4] = {{1, 2, 3, 4}, {2, 4, 6, 9}};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = ratio(vals[r][c], r + 2);
    const auto ns = exact_nullspace(m);
    CHECK(ns.rank == 2);
    REQUIRE(ns.basis.size() == 2);
    for (const auto& v : ns.basis) CHECK(annihilates(m, v));
}

TEST_CASE("random rational systems: rank + nullity = columns")
{
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 4 + trial % 4, cols = rows + 1 + trial % 3;
        Matrix<Rational> m(rows, cols, Rational(0));
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = ratio(num(rng), den(rng));
        // force a dependent row
        for (int c = 0; c < cols; ++c) m(rows - 1, c) = m(0, c) * Rational(3, 2) - m(1, c);
        const auto ns = exact_nullspace(m);
        CHECK(ns.rank + static_cast<int>(ns.basis.size()) == cols);
        CHECK(ns.rank <= rows - 1);
        for (const auto& v : ns.basis) CHECK(annihilates(m, v));
    }
}

TEST_CASE("nullspace over Q(sqrt(-3))")
{
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    const int rows = 6, cols = 7;
    Matrix<QF> m(rows, cols, QF(0));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = QF(ratio(num(rng), den(rng)), ratio(num(rng), den(rng)), -3);
    const auto ns = exact_nullspace(m);
    CHECK(ns.rank == 6);
    REQUIRE(ns.basis.size() == 1);
    CHECK(annihilates(m, ns.basis[0]));
}

TEST_CASE("a zero column is a free variable")
{
    Matrix<Rational> m(2, 3, Rational(0));
    m(0, 1) = 1;
    m(1, 2) = 1;
    const auto ns = exact_nullspace(m);
    REQUIRE(ns.basis.size() == 1);
    CHECK(ns.basis[0][0] == 1);
    CHECK(ns.basis[0][1] == 0);
    CHECK(ns.basis[0][2] == 0);
}

TEST_CASE("float nullspace matches the exact one")
{
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> num(-9, 9);
    const int rows = 5, cols = 6;
    Matrix<Rational> q(rows, cols, Rational(0));
    Matrix<BigComplex> f(rows, cols, BigComplex(128));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            q(r, c) = ratio(num(rng), 7);
            f(r, c) = embed(q(r, c), 128);
        }
    const auto exact = exact_nullspace(q);
    const auto approx = float_nullspace(f, -64);
    REQUIRE(exact.basis.size() == 1);
    REQUIRE(approx.basis.size() == 1);
    CHECK(approx.residual < 1e-30);
    // normalize both on the last component and compare
    const auto& e = exact.basis[0];
    const auto& a = approx.basis[0];
    const Rational& el = e.back();
    for (int c = 0; c < cols; ++c) {
        const BigComplex ratio = a[static_cast<std::size_t>(c)] / a.back();
        const double want = Rational(e[static_cast<std::size_t>(c)] / el).get_d();
        CHECK(ratio.re().to_double() == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::abs(ratio.im().to_double()) < 1e-25);
    }
}
