#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "veccoh/diff_op.hpp"

using namespace veccoh;
using veccoh::testing::Rng;
using veccoh::testing::random_field;
using veccoh::testing::random_multivector;
using veccoh::testing::random_poly;

namespace {

// First-order divergence-type operator: T -> sum_i i_{dx^i} d_i T on Lambda^{q+1} -> Lambda^q.
DiffOp divergence_like(int m, int q) {
    ModuleSpec sp = ModuleSpec::multivectors(m, q + 1, q, 1);
    DiffOp d(sp);
    for (int i = 0; i < m; ++i)
        for (const auto& src : increasing_tuples(m, q + 1)) {
            auto contracted = interior_product(Covector::basis(m, i), basis_multivector(m, src));
            for (const auto& [dst, c] : contracted.components()) d.add({{i}, src, dst}, c);
        }
    return d;
}

DiffOp random_op(Rng& rng, const ModuleSpec& sp, int max_deg) {
    DiffOp d(sp);
    const int src_deg = sp.species == Species::function ? 0 : sp.p;
    const int dst_deg = sp.species == Species::function ? 0 : sp.q;
    for (int r = 0; r <= sp.k; ++r)
        for (const auto& der : nondecreasing_tuples(sp.m, r))
            for (const auto& src : increasing_tuples(sp.m, src_deg))
                for (const auto& dst : increasing_tuples(sp.m, dst_deg))
                    if (rng.small(0, 3) == 0) d.add({der, src, dst}, random_poly(rng, sp.m, max_deg, 1));
    return d;
}

}  // namespace

TEST(DiffOp, ApplyExamples) {
    // identity operator fixes fields
    Rng rng(10);
    auto id = DiffOp::identity(ModuleSpec::multivectors(2, 1, 1, 0));
    auto t = random_multivector(rng, 2, 1, 3);
    EXPECT_EQ(apply(id, t), t);

    // D = i_{dx^1} d_1 on T = x1 d1^d2 gives d2
    ModuleSpec sp = ModuleSpec::multivectors(2, 2, 1, 1);
    DiffOp d(sp);
    d.add({{0}, {0, 1}, {1}}, Poly::constant(2, 1));  // i_{e^1}(d1^d2) = d2
    PolyMultiVector t2(2, 2);
    t2.add_component({0, 1}, Poly::variable(2, 0));
    EXPECT_EQ(apply(d, t2), basis_multivector(2, {1}));

    // anything applied to zero is zero
    EXPECT_TRUE(apply(d, PolyMultiVector(2, 2)).is_zero());
}

TEST(DiffOp, ApplyRejectsMismatch) {
    auto id = DiffOp::identity(ModuleSpec::multivectors(2, 1, 1, 0));
    EXPECT_THROW(apply(id, PolyMultiVector(2, 2)), std::invalid_argument);
}

TEST(DiffOp, LieDerivativeExamples) {
    // identity is equivariant
    Rng rng(20);
    auto id = DiffOp::identity(ModuleSpec::multivectors(2, 1, 1, 1));
    for (int trial = 0; trial < 5; ++trial) {
        auto x = random_field(rng, 2, 3);
        EXPECT_TRUE(lie_derivative_op(x, id).is_zero());
    }

    // L_E (f -> d1 f) = -(f -> d1 f)
    ModuleSpec fsp = ModuleSpec::functions(2, 1);
    DiffOp d1(fsp);
    d1.add({{0}, {}, {}}, Poly::constant(2, 1));
    EXPECT_EQ(lie_derivative_op(VectorField::euler(2), d1), Rational(-1) * d1);

    // L_{d1} (f -> x1 f) = (f -> f)
    ModuleSpec f0 = ModuleSpec::functions(2, 0);
    DiffOp mult(f0);
    mult.add({{}, {}, {}}, Poly::variable(2, 0));
    DiffOp one(f0);
    one.add({{}, {}, {}}, Poly::constant(2, 1));
    EXPECT_EQ(lie_derivative_op(VectorField::coordinate(2, 0), mult), one);
}

TEST(DiffOp, LieDerivativeMatchesCommutator) {
    // apply(L_X D, T) = L_X(apply(D, T)) - apply(D, L_X T)
    Rng rng(30);
    for (int trial = 0; trial < 10; ++trial) {
        int m = 2;
        int p = 1 + (int)rng.small(0, 1), q = (int)rng.small(0, 2);
        ModuleSpec sp = ModuleSpec::multivectors(m, p, q, 1 + (int)rng.small(0, 1));
        auto d = random_op(rng, sp, 2);
        auto x = random_field(rng, m, 3);
        auto t = random_multivector(rng, m, p, 3);
        auto lhs = apply(lie_derivative_op(x, d), t);
        auto rhs = lie_derivative(x, apply(d, t)) - apply(d, lie_derivative(x, t));
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(DiffOp, LieDerivativeMatchesCommutatorOnForms) {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        int m = 2;
        int p = (int)rng.small(0, 1), q = (int)rng.small(0, 2);
        ModuleSpec sp = ModuleSpec::forms(m, p, q, 1 + (int)rng.small(0, 1));
        auto d = random_op(rng, sp, 2);
        auto x = random_field(rng, m, 3);
        auto w = veccoh::testing::random_form(rng, m, p, 3);
        auto lhs = apply(lie_derivative_op(x, d), w);
        auto rhs = lie_derivative(x, apply(d, w)) - apply(d, lie_derivative(x, w));
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(DiffOp, OrderIsPreserved) {
    Rng rng(40);
    for (int trial = 0; trial < 10; ++trial) {
        ModuleSpec sp = ModuleSpec::multivectors(2, 1, 1, 2);
        auto d = random_op(rng, sp, 2);
        auto x = random_field(rng, 2, 3);
        auto ld = lie_derivative_op(x, d);  // add() would throw past the bound
        EXPECT_LE(ld.order(), 2);
    }
}

TEST(DiffOp, LieBracketCompatibility) {
    // L_{[X,Y]} D = L_X L_Y D - L_Y L_X D
    Rng rng(50);
    for (int trial = 0; trial < 6; ++trial) {
        ModuleSpec sp = ModuleSpec::multivectors(2, 1, 1, 1);
        auto d = random_op(rng, sp, 2);
        auto x = random_field(rng, 2, 3), y = random_field(rng, 2, 3);
        auto lhs = lie_derivative_op(lie_bracket(x, y), d);
        auto rhs = lie_derivative_op(x, lie_derivative_op(y, d)) -
                   lie_derivative_op(y, lie_derivative_op(x, d));
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(DiffOp, PrincipalSymbolExamples) {
    // order-0 operator inside D^1 has zero symbol
    auto id = DiffOp::identity(ModuleSpec::multivectors(2, 1, 1, 1));
    EXPECT_TRUE(principal_symbol(id).is_zero());

    // divergence-like operator: symbol is T -> i_eta T
    auto dvg = divergence_like(2, 0);
    auto sym = principal_symbol(dvg);
    EXPECT_EQ(sym.coeffs.size(), 2u);
    EXPECT_EQ(sym.at({{0}, {0}, {}}), Poly::constant(2, 1));
    EXPECT_EQ(sym.at({{1}, {1}, {}}), Poly::constant(2, 1));

    // x1 d1 d1 at k = 2
    ModuleSpec f2 = ModuleSpec::functions(2, 2);
    DiffOp d(f2);
    d.add({{0, 0}, {}, {}}, Poly::variable(2, 0));
    auto s = principal_symbol(d);
    EXPECT_EQ(s.at({{0, 0}, {}, {}}), Poly::variable(2, 0));
}

TEST(DiffOp, LiftSymbolIsASection) {
    Rng rng(60);
    // sigma(lift(S)) = S on random symbols
    for (int trial = 0; trial < 20; ++trial) {
        ModuleSpec sp = ModuleSpec::multivectors(2, 1 + (int)rng.small(0, 1), (int)rng.small(0, 1),
                                                 1 + (int)rng.small(0, 1))
                            .as_symbol();
        SymbolTensor s(sp);
        for (const auto& eta : nondecreasing_tuples(2, sp.k))
            for (const auto& src : increasing_tuples(2, sp.p))
                for (const auto& dst : increasing_tuples(2, sp.q))
                    if (rng.small(0, 2) == 0) s.add({eta, src, dst}, random_poly(rng, 2, 2, 1));
        EXPECT_EQ(principal_symbol(lift_symbol(s)), s);
    }
    // lift(0) = 0
    SymbolTensor z(ModuleSpec::multivectors(2, 1, 0, 1).as_symbol());
    EXPECT_TRUE(lift_symbol(z).is_zero());
}

TEST(DiffOp, SymbolLieDerivativeCommutingSquare) {
    // sigma(L_X D) = L_X sigma(D) for exact order k operators
    Rng rng(70);
    for (int trial = 0; trial < 10; ++trial) {
        int p = 1 + (int)rng.small(0, 1), q = (int)rng.small(0, 2);
        ModuleSpec sp = ModuleSpec::multivectors(2, p, q, 1);
        auto d = random_op(rng, sp, 2);
        auto x = random_field(rng, 2, 3);
        EXPECT_EQ(principal_symbol(lie_derivative_op(x, d)), symbol_lie_derivative(x, principal_symbol(d)));
    }
    for (int trial = 0; trial < 10; ++trial) {
        int p = (int)rng.small(0, 1), q = (int)rng.small(0, 2);
        ModuleSpec sp = ModuleSpec::forms(2, p, q, 1 + (int)rng.small(0, 1));
        auto d = random_op(rng, sp, 2);
        auto x = random_field(rng, 2, 3);
        EXPECT_EQ(principal_symbol(lie_derivative_op(x, d)), symbol_lie_derivative(x, principal_symbol(d)));
    }
}

TEST(DiffOp, SymbolConstantFieldActsComponentwise) {
    ModuleSpec sp = ModuleSpec::multivectors(2, 1, 1, 1).as_symbol();
    SymbolTensor s(sp);
    s.add({{0}, {0}, {1}}, Poly::monomial(2, {2, 1}, 1));
    auto ls = symbol_lie_derivative(VectorField::coordinate(2, 0), s);
    SymbolTensor expect(sp);
    expect.add({{0}, {0}, {1}}, Poly::monomial(2, {1, 1}, 2));
    EXPECT_EQ(ls, expect);
}

TEST(DiffOp, SymbolEulerActionIsDiagonal) {
    // X = x^i d_i acts on a monomial symbol by its weight
    ModuleSpec sp = ModuleSpec::multivectors(2, 1, 0, 1).as_symbol();
    SymbolTensor s(sp);
    s.add({{0}, {0}, {}}, Poly::monomial(2, {1, 1}, 1));  // x1 x2 eta_1, weight 2 - 1 + 1 = 2
    auto ls = symbol_lie_derivative(VectorField::euler(2), s);
    EXPECT_EQ(ls, Rational(2) * s);
}

TEST(DiffOp, ModuleSpecValidation) {
    EXPECT_THROW(ModuleSpec::multivectors(2, 3, 0, 1), std::invalid_argument);  // p > m rejected
    EXPECT_THROW(ModuleSpec::multivectors(2, -1, 0, 1), std::invalid_argument);
    EXPECT_THROW(ModuleSpec(2, Species::function, 1, 0, 1), std::invalid_argument);
    EXPECT_THROW(ModuleSpec::multivectors(2, 1, 1, -1), std::invalid_argument);
    EXPECT_EQ(ModuleSpec::forms(3, 1, 2, 2).slug(), "form_p1_q2_k2_m3");
}
