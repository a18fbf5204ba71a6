#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "veccoh/ce_complex.hpp"

using namespace veccoh;
using veccoh::testing::Rng;
using veccoh::testing::random_field;
using veccoh::testing::random_poly;

namespace {

DiffOp multiplication_op(int m, const Poly& f) {
    DiffOp d(ModuleSpec::functions(m, 0));
    d.add({{}, {}, {}}, f);
    return d;
}

/// The divergence 0-cochain c(X) = tr DX as a function-module 1-cochain table.
Cochain<DiffOp> divergence_cochain(const SlContext& ctx) {
    Cochain<DiffOp> c(ModuleSpec::functions(ctx.m, 0), 1);
    for (int b = 0; b < ctx.dim(); ++b) c.add_value({b}, multiplication_op(ctx.m, trace_div(ctx.fields[b])));
    return c;
}

Cochain<DiffOp> random_zero_cochain(Rng& rng, const ModuleSpec& sp, const SlContext& ctx, int max_deg) {
    Cochain<DiffOp> c(sp, 0);
    DiffOp d(sp);
    const int src_deg = sp.species == Species::function ? 0 : sp.p;
    const int dst_deg = sp.species == Species::function ? 0 : sp.q;
    for (int r = 0; r <= sp.k; ++r)
        for (const auto& der : nondecreasing_tuples(sp.m, r))
            for (const auto& src : increasing_tuples(sp.m, src_deg))
                for (const auto& dst : increasing_tuples(sp.m, dst_deg))
                    if (rng.small(0, 3) == 0) d.add({der, src, dst}, random_poly(rng, sp.m, max_deg, 1));
    c.add_value({}, d);
    return c;
}

std::size_t sub_rank(const ModuleSpec& spec, int u, int w, const SlContext& ctx) {
    auto dom = weight_block(spec, u, w, ctx);
    auto cod = weight_block(spec, u + 1, w, ctx);
    return differential_matrix<DiffOp>(dom, cod, ctx).rank();
}

}  // namespace

TEST(CeComplex, DifferentialOfZeroCochainIsLie) {
    // u = 0: (db)(X) = L_X b
    SlContext ctx(2);
    Rng rng(1);
    auto b = random_zero_cochain(rng, ModuleSpec::multivectors(2, 1, 1, 1), ctx, 2);
    auto db = ce_differential(b, ctx);
    for (int i = 0; i < ctx.dim(); ++i)
        EXPECT_EQ(db.value({i}), lie_derivative_op(ctx.fields[i], b.value({})));
}

TEST(CeComplex, DivergenceCochainIsACocycleOnSlBasis) {
    for (int m : {2, 3}) {
        SlContext ctx(m);
        EXPECT_TRUE(ce_differential(divergence_cochain(ctx), ctx).is_zero());
    }
}

TEST(CeComplex, DivergenceIdentityOnRandomPolynomialPairs) {
    // the same cocycle identity off the subalgebra, directly on formulas
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        int m = 2 + (int)rng.small(0, 1);
        auto x = random_field(rng, m, 3), y = random_field(rng, m, 3);
        Poly lhs = x.apply(trace_div(y)) - y.apply(trace_div(x)) - trace_div(lie_bracket(x, y));
        EXPECT_TRUE(lhs.is_zero());
    }
}

TEST(CeComplex, DifferentialSquaresToZero) {
    SlContext ctx(2);
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        auto b = random_zero_cochain(rng, ModuleSpec::multivectors(2, 1, 1, 1), ctx, 2);
        EXPECT_TRUE(ce_differential(ce_differential(b, ctx), ctx).is_zero());
    }
    // also on a random 1-cochain table
    Cochain<DiffOp> c(ModuleSpec::forms(2, 0, 1, 1), 1);
    for (int b = 0; b < ctx.dim(); ++b) {
        DiffOp d(c.spec);
        for (const auto& dst : increasing_tuples(2, 1))
            if (rng.small(0, 1) == 0) d.add({{}, {}, dst}, random_poly(rng, 2, 2, 1));
        c.add_value({b}, d);
    }
    EXPECT_TRUE(ce_differential(ce_differential(c, ctx), ctx).is_zero());
}

TEST(CeComplex, ModuleWeightExamples) {
    // constant function
    EXPECT_EQ(module_weight(multiplication_op(2, Poly::constant(2, 1))), 0);

    // d1^d2 as an order-0 operator from functions into Lambda^2: weight -2
    DiffOp vol(ModuleSpec::multivectors(2, 0, 2, 0));
    vol.add({{}, {}, {0, 1}}, Poly::constant(2, 1));
    EXPECT_EQ(module_weight(vol), -2);
    // matches the Lie derivative of the plain multivector
    auto top = basis_multivector(2, {0, 1});
    EXPECT_EQ(lie_derivative(VectorField::euler(2), top), Rational(-2) * top);

    EXPECT_THROW(module_weight(DiffOp::identity(ModuleSpec::multivectors(2, 1, 1, 0))),
                 std::invalid_argument);  // not a monomial
}

TEST(CeComplex, MonomialWeightClosedFormMatchesEulerAction) {
    // brute force over monomial instances with p, q, |beta|, |der| <= 2
    const int m = 2;
    for (Species species : {Species::multivector, Species::form, Species::function}) {
        for (int p = 0; p <= (species == Species::function ? 0 : 2); ++p)
            for (int q = 0; q <= (species == Species::function ? 0 : 2); ++q)
                for (int k = 0; k <= 2; ++k) {
                    ModuleSpec sp(m, species, species == Species::function ? 0 : p,
                                  species == Species::function ? 0 : q, k);
                    for (int w = -6; w <= 6; ++w)
                        for (const auto& mon : enumerate_monomials(sp, w)) {
                            if (total_degree(mon.beta) > 2) continue;
                            EXPECT_EQ(monomial_weight(sp, mon), w);
                            EXPECT_EQ(module_weight(monomial_op(sp, mon, Rational(1))), w);
                        }
                }
    }
}

TEST(CeComplex, MultiweightClosedFormMatchesDiagonalAction) {
    const int m = 2;
    SlContext ctx(m);
    ModuleSpec sp = ModuleSpec::multivectors(m, 1, 1, 1);
    ModuleSpec spf = ModuleSpec::forms(m, 0, 2, 1);
    for (const ModuleSpec& s : {sp, spf})
        for (int w = -3; w <= 3; ++w)
            for (const auto& mon : enumerate_monomials(s, w)) {
                if (total_degree(mon.beta) > 2) continue;
                auto closed = monomial_multiweight(s, mon);
                for (int i = 0; i < m; ++i) {
                    // embedded diagonal matrix unit: -x^i d_i
                    SlElement h(m);
                    h.a[i][i] = 1;
                    auto v = monomial_op(s, mon, Rational(1));
                    auto lv = lie_derivative_op(sl_embed(h), v);
                    auto mons = lv.monomials();
                    if (mons.empty()) {
                        EXPECT_EQ(closed[i], 0);
                    } else {
                        ASSERT_EQ(mons.size(), 1u);
                        EXPECT_EQ(mons[0].first, mon);
                        EXPECT_EQ(mons[0].second, Rational(closed[i]));
                    }
                }
            }
}

TEST(CeComplex, WeightZeroBasisExamples) {
    SlContext ctx(2);
    // functions, u = 0: constants only
    EXPECT_EQ(weight_zero_basis(ModuleSpec::functions(2, 0), 0, ctx).size(), 1u);
    // D^0(L^1, L^1), u = 0: constants tensor Hom, 4 entries
    EXPECT_EQ(weight_zero_basis(ModuleSpec::multivectors(2, 1, 1, 0), 0, ctx).size(), 4u);
    // u = 1 blocks are inhabited for D^1(L^1, L^1)
    EXPECT_GT(weight_zero_basis(ModuleSpec::multivectors(2, 1, 1, 1), 1, ctx).size(), 0u);
}

TEST(CeComplex, MatrixCompositionIsZero) {
    SlContext ctx(2);
    for (const ModuleSpec& sp : {ModuleSpec::multivectors(2, 1, 1, 1), ModuleSpec::forms(2, 0, 1, 1),
                                 ModuleSpec::functions(2, 1)}) {
        auto b0 = weight_zero_basis(sp, 0, ctx);
        auto b1 = weight_zero_basis(sp, 1, ctx);
        auto b2 = weight_zero_basis(sp, 2, ctx);
        auto m0 = differential_matrix<DiffOp>(b0, b1, ctx);
        auto m1 = differential_matrix<DiffOp>(b1, b2, ctx);
        // explicit sparse product m1 * m0 must vanish
        std::map<std::pair<std::size_t, std::size_t>, Rational> prod;
        for (const auto& [rc1, v1] : m1.entries())
            for (const auto& [rc0, v0] : m0.entries())
                if (rc1.second == rc0.first) prod[{rc1.first, rc0.second}] += v1 * v0;
        for (const auto& [rc, v] : prod) EXPECT_TRUE(v.is_zero());
    }
}

TEST(CeComplex, FunctionsDegreeZeroMatrixHasRankZero) {
    SlContext ctx(2);
    auto sp = ModuleSpec::functions(2, 0);
    EXPECT_EQ(differential_matrix<DiffOp>(sp, 0, ctx).rank(), 0u);  // constants are invariant
}

TEST(CeComplex, NoInvariantOrderZeroOperatorFromL2ToL1) {
    SlContext ctx(2);
    auto sp = ModuleSpec::multivectors(2, 2, 1, 0);
    auto b0 = weight_zero_basis(sp, 0, ctx);
    auto b1 = weight_zero_basis(sp, 1, ctx);
    auto m0 = differential_matrix<DiffOp>(b0, b1, ctx);
    EXPECT_EQ(m0.rank(), b0.size());
}

TEST(CeComplex, CohomologyDimensionExamples) {
    SlContext ctx(2);
    // H^0(D^k(L^p, L^p)) is one dimensional
    for (int k : {0, 1, 2})
        for (int p : {0, 1, 2})
            EXPECT_EQ(cohomology_dim<DiffOp>(ModuleSpec::multivectors(2, p, p, k), 0, ctx), 1u)
                << "p=" << p << " k=" << k;
    // H^1(D^1(L^1, L^1)) = R
    EXPECT_EQ(cohomology_dim<DiffOp>(ModuleSpec::multivectors(2, 1, 1, 1), 1, ctx), 1u);
    // H^1(D^0(L^2, L^1)) = R but dies at order 1
    EXPECT_EQ(cohomology_dim<DiffOp>(ModuleSpec::multivectors(2, 2, 1, 0), 1, ctx), 1u);
    EXPECT_EQ(cohomology_dim<DiffOp>(ModuleSpec::multivectors(2, 2, 1, 1), 1, ctx), 0u);
}

TEST(CeComplex, CohomologyDimIndependentOfEnumerationOrder) {
    SlContext ctx(2);
    auto sp = ModuleSpec::multivectors(2, 1, 1, 1);
    for (int u : {0, 1}) {
        auto fwd_dom = weight_zero_basis(sp, u, ctx, false);
        auto fwd_cod = weight_zero_basis(sp, u + 1, ctx, false);
        auto rev_dom = weight_zero_basis(sp, u, ctx, true);
        auto rev_cod = weight_zero_basis(sp, u + 1, ctx, true);
        EXPECT_EQ(differential_matrix<DiffOp>(fwd_dom, fwd_cod, ctx).rank(),
                  differential_matrix<DiffOp>(rev_dom, rev_cod, ctx).rank());
    }
}

TEST(CeComplex, ClassifiedRankAgreesWithFullRank) {
    SlContext ctx(2);
    for (const ModuleSpec& sp : {ModuleSpec::multivectors(2, 1, 1, 1), ModuleSpec::forms(2, 0, 1, 1)}) {
        for (int u : {0, 1}) {
            auto dom = weight_zero_basis(sp, u, ctx);
            auto cod = weight_zero_basis(sp, u + 1, ctx);
            auto full = differential_matrix<DiffOp>(dom, cod, ctx).rank();
            auto split = detail::classified_rank<DiffOp>(detail::classify(dom, ctx),
                                                         detail::classify(cod, ctx), ctx);
            EXPECT_EQ(full, split);
        }
    }
}

TEST(CeComplex, IsCoboundaryRoundTrip) {
    SlContext ctx(2);
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        auto b = random_zero_cochain(rng, ModuleSpec::multivectors(2, 1, 1, 1), ctx, 1);
        auto c = ce_differential(b, ctx);
        auto witness = is_coboundary(c, ctx);
        ASSERT_TRUE(witness.has_value());
        EXPECT_EQ(ce_differential(*witness, ctx), c);
    }
}

TEST(CeComplex, DivergenceTimesIdentityIsNotACoboundary) {
    for (int m : {2}) {
        SlContext ctx(m);
        for (int k : {0, 1}) {
            Cochain<DiffOp> c(ModuleSpec::multivectors(m, 1, 1, k), 1);
            for (int b = 0; b < ctx.dim(); ++b) {
                DiffOp d(c.spec);
                Poly tr = trace_div(ctx.fields[b]);
                for (const auto& t : increasing_tuples(m, 1)) d.add({{}, t, t}, tr);
                c.add_value({b}, d);
            }
            EXPECT_FALSE(is_coboundary(c, ctx).has_value()) << "k=" << k;
        }
    }
}

TEST(CeComplex, IsCoboundaryRejectsNonCocycle) {
    SlContext ctx(2);
    Cochain<DiffOp> c(ModuleSpec::functions(2, 0), 1);
    c.add_value({0}, multiplication_op(2, Poly::variable(2, 0)));
    EXPECT_THROW(is_coboundary(c, ctx), std::invalid_argument);
}

TEST(CeComplex, ClassCoordinatesOfAGenerator) {
    SlContext ctx(2);
    // generator: the divergence-times-identity cocycle in D^0(L^1, L^1)
    Cochain<DiffOp> gen(ModuleSpec::multivectors(2, 1, 1, 0), 1);
    for (int b = 0; b < ctx.dim(); ++b) {
        DiffOp d(gen.spec);
        Poly tr = trace_div(ctx.fields[b]);
        for (const auto& t : increasing_tuples(2, 1)) d.add({{}, t, t}, tr);
        gen.add_value({b}, d);
    }
    auto exact = class_coordinates(gen, {gen}, ctx);
    ASSERT_TRUE(exact.has_value());
    EXPECT_EQ(exact->lambda[0], Rational(1));

    // adding a coboundary leaves the coordinate unchanged
    Rng rng(4);
    auto b = random_zero_cochain(rng, gen.spec, ctx, 1);
    auto shifted = gen + ce_differential(b, ctx);
    auto again = class_coordinates(shifted, {gen}, ctx);
    ASSERT_TRUE(again.has_value());
    EXPECT_EQ(again->lambda[0], Rational(1));
    EXPECT_EQ(ce_differential(again->witness, ctx), shifted - gen);
}

TEST(CeComplex, MatrixColumnsMatchTheTableDifferential) {
    // the targeted column generator and the full evaluation are independent
    // paths to the same coboundary
    SlContext ctx(2);
    auto sp = ModuleSpec::multivectors(2, 1, 1, 1);
    auto dom = weight_zero_basis(sp, 1, ctx);
    auto cod = weight_zero_basis(sp, 2, ctx);
    auto mat = differential_matrix<DiffOp>(dom, cod, ctx);
    Rng rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        std::size_t col = (std::size_t)rng.small(0, (long)dom.size() - 1);
        const auto& pr = dom.pairs[col];
        Cochain<DiffOp> c(sp, 1);
        c.add_value(pr.tuple, monomial_op(sp, pr.mon, Rational(1)));
        auto dc = ce_differential(c, ctx);
        std::map<std::pair<std::size_t, std::size_t>, Rational> expected;
        for (const auto& [tuple, v] : dc.values)
            for (const auto& [mon, coeff] : v.monomials())
                expected[{cod.index.at({tuple, mon}), col}] = coeff;
        for (const auto& [rc, v] : expected) EXPECT_EQ(mat.at(rc.first, rc.second), v);
        for (const auto& [rc, v] : mat.entries())
            if (rc.second == col) EXPECT_EQ(expected.count(rc), 1u);
    }
}

TEST(CeComplex, NonzeroWeightBlocksAreAcyclic) {
    // the degree <= 4 truncation of the function module: every weight block in
    // range has vanishing H^0 and H^1 except weight 0, which matches the
    // weight-zero computation
    SlContext ctx(2);
    auto sp = ModuleSpec::functions(2, 0);
    for (int w = -2; w <= 6; ++w) {
        std::size_t b0 = weight_block(sp, 0, w, ctx).size();
        std::size_t r0 = sub_rank(sp, 0, w, ctx);
        std::size_t r1 = sub_rank(sp, 1, w, ctx);
        std::size_t b1 = weight_block(sp, 1, w, ctx).size();
        std::size_t h0 = b0 - r0;
        std::size_t h1 = b1 - r1 - r0;
        if (w == 0) {
            EXPECT_EQ(h0, 1u);
            EXPECT_EQ(h1, 1u);  // the divergence class
        } else {
            EXPECT_EQ(h0, 0u) << "w=" << w;
            EXPECT_EQ(h1, 0u) << "w=" << w;
        }
    }
}
