#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "veccoh/invariants.hpp"

namespace veccoh {

/// Scalar 1-cocycle gamma: Vect -> C^inf, a multiple of the divergence plus an
/// optional constant-covector pairing (a closed 1-form paired with the field).
struct ScalarCocycle {
    Rational div_coeff = Rational(1);
    std::optional<Covector> pairing;

    static ScalarCocycle divergence() { return {}; }
    static ScalarCocycle divergence_plus_pairing(Covector xi) { return {Rational(1), std::move(xi)}; }
    static ScalarCocycle pairing_only(Covector xi) { return {Rational(0), std::move(xi)}; }

    Poly eval(const VectorField& x) const {
        Poly out = div_coeff * trace_div(x);
        if (pairing) out += pairing->pair(x);
        return out;
    }
};

enum class CocycleTag { div, id_times, iota_dc, c0, c01, c10, c2 };

inline std::string cocycle_tag_name(CocycleTag t) {
    switch (t) {
        case CocycleTag::div: return "div";
        case CocycleTag::id_times: return "id_times";
        case CocycleTag::iota_dc: return "iota";
        case CocycleTag::c0: return "c0";
        case CocycleTag::c01: return "c01";
        case CocycleTag::c10: return "c10";
        case CocycleTag::c2: return "c2";
    }
    return "?";
}

/// A named 1-cocycle family together with its coefficient module.
struct NamedCocycleFamily {
    CocycleTag tag;
    ModuleSpec spec;

    NamedCocycleFamily(CocycleTag t, ModuleSpec sp) : tag(t), spec(sp.as_operator()) { validate(); }

    void validate() const {
        switch (tag) {
            case CocycleTag::div:
                if (spec.species != Species::function)
                    throw std::invalid_argument("div family is function valued");
                break;
            case CocycleTag::id_times:
                if (spec.species == Species::function || spec.p != spec.q)
                    throw std::invalid_argument("id_times family needs p = q");
                break;
            case CocycleTag::iota_dc:
                if (spec.species != Species::multivector || spec.p != spec.q + 1)
                    throw std::invalid_argument("iota family needs multivectors with p = q + 1");
                break;
            case CocycleTag::c0:
                if (spec.species != Species::form || spec.p != spec.q)
                    throw std::invalid_argument("c0 family needs forms with p = q");
                break;
            case CocycleTag::c01:
                if (spec.species != Species::form || spec.q != spec.p + 1 || spec.k < 1)
                    throw std::invalid_argument("c01 family needs forms with q = p + 1 and order >= 1");
                break;
            case CocycleTag::c10:
                if (spec.species != Species::form || spec.q != spec.p + 1)
                    throw std::invalid_argument("c10 family needs forms with q = p + 1");
                break;
            case CocycleTag::c2:
                if (spec.species != Species::form || spec.q != spec.p + 2 || spec.k < 1)
                    throw std::invalid_argument("c2 family needs forms with q = p + 2 and order >= 1");
                break;
        }
    }
};

namespace detail {

/// f times the identity, in any p = q module.
inline DiffOp scaled_identity_op(const ModuleSpec& sp, const Poly& f) {
    DiffOp d(sp);
    const int deg = sp.species == Species::function ? 0 : sp.p;
    for (const auto& t : increasing_tuples(sp.m, deg)) d.add({{}, t, t}, f);
    return d;
}

/// omega -> f * d omega.
inline DiffOp scaled_exterior_derivative_op(const ModuleSpec& sp, const Poly& f) {
    DiffOp d(sp);
    for (const auto& src : increasing_tuples(sp.m, sp.p))
        for (int j = 0; j < sp.m; ++j) {
            auto merged = merge_with_sign({j}, src);
            if (!merged) continue;
            d.add({{j}, src, merged->first}, merged->second < 0 ? -f : f);
        }
    return d;
}

/// omega -> xi ^ omega for a polynomial 1-form xi.
inline DiffOp wedge_by_op(const ModuleSpec& sp, const PolyForm& xi) {
    DiffOp d(sp);
    for (const auto& src : increasing_tuples(sp.m, sp.p)) {
        PolyForm w = wedge(xi, basis_form(sp.m, src));
        for (const auto& [dst, c] : w.components()) d.add({{}, src, dst}, c);
    }
    return d;
}

/// omega -> xi ^ d omega.
inline DiffOp wedge_d_op(const ModuleSpec& sp, const PolyForm& xi) {
    DiffOp d(sp);
    for (const auto& src : increasing_tuples(sp.m, sp.p))
        for (int j = 0; j < sp.m; ++j) {
            auto merged = merge_with_sign({j}, src);
            if (!merged) continue;
            PolyForm w = wedge(xi, basis_form(sp.m, merged->first));
            for (const auto& [dst, c] : w.components())
                d.add({{j}, src, dst}, merged->second < 0 ? -c : c);
        }
    return d;
}

/// T -> i_xi T for a polynomial 1-form xi.
inline DiffOp interior_by_op(const ModuleSpec& sp, const PolyForm& xi) {
    DiffOp d(sp);
    for (const auto& src : increasing_tuples(sp.m, sp.p)) {
        PolyMultiVector w = interior_product(xi, basis_multivector(sp.m, src));
        for (const auto& [dst, c] : w.components()) d.add({{}, src, dst}, c);
    }
    return d;
}

}  // namespace detail

/// The value of a named family at X, built from a scalar cocycle gamma:
///   div: gamma(X);          id_times: gamma(X) id;   iota: i_{d gamma(X)};
///   c0: gamma(X) w;         c01: gamma(X) dw;
///   c10: d gamma(X) ^ w;    c2: d gamma(X) ^ dw.
inline DiffOp named_cocycle(const NamedCocycleFamily& fam, const VectorField& x,
                            const ScalarCocycle& gamma = ScalarCocycle::divergence()) {
    if (x.dimension() != fam.spec.m) throw std::invalid_argument("named_cocycle: dimension mismatch");
    const Poly g = gamma.eval(x);
    switch (fam.tag) {
        case CocycleTag::div: {
            DiffOp d(fam.spec);
            d.add({{}, {}, {}}, g);
            return d;
        }
        case CocycleTag::id_times:
        case CocycleTag::c0:
            return detail::scaled_identity_op(fam.spec, g);
        case CocycleTag::c01:
            return detail::scaled_exterior_derivative_op(fam.spec, g);
        case CocycleTag::iota_dc:
            return detail::interior_by_op(fam.spec, exterior_derivative(g));
        case CocycleTag::c10:
            return detail::wedge_by_op(fam.spec, exterior_derivative(g));
        case CocycleTag::c2:
            return detail::wedge_d_op(fam.spec, exterior_derivative(g));
    }
    throw std::logic_error("named_cocycle: unreachable");
}

/// L_X c(Y) - L_Y c(X) - c([X, Y]); zero exactly when c is a 1-cocycle.
inline DiffOp cocycle_defect(const std::function<DiffOp(const VectorField&)>& c, const VectorField& x,
                             const VectorField& y) {
    return lie_derivative_op(x, c(y)) - lie_derivative_op(y, c(x)) - c(lie_bracket(x, y));
}

/// The family evaluated along the embedded basis, as a degree-1 cochain table.
inline Cochain<DiffOp> named_cocycle_cochain(const NamedCocycleFamily& fam, const SlContext& ctx,
                                             const ScalarCocycle& gamma = ScalarCocycle::divergence()) {
    Cochain<DiffOp> c(fam.spec, 1);
    for (int b = 0; b < ctx.dim(); ++b) c.add_value({b}, named_cocycle(fam, ctx.fields[b], gamma));
    return c;
}

/// The order-1 witness T -> sum_i i_{dx^i} d_i T whose coboundary is the iota
/// family.
inline DiffOp divergence_witness_op(int m, int q) {
    ModuleSpec sp = ModuleSpec::multivectors(m, q + 1, q, 1);
    DiffOp d(sp);
    for (int i = 0; i < m; ++i)
        for (const auto& src : increasing_tuples(m, q + 1)) {
            auto contracted = interior_product(Covector::basis(m, i), basis_multivector(m, src));
            for (const auto& [dst, c] : contracted.components()) d.add({{i}, src, dst}, c);
        }
    return d;
}

// ---------------------------------------------------------------------------
// Connecting homomorphism
// ---------------------------------------------------------------------------

/// Reinterprets a cochain of order-bound-k operators whose values are actually
/// order 0 as a cochain over the order-0 module.
inline Cochain<DiffOp> restrict_to_order_zero(const Cochain<DiffOp>& c) {
    Cochain<DiffOp> out(c.spec.with_order(0), c.degree);
    for (const auto& [tuple, v] : c.values) {
        DiffOp d(out.spec);
        for (const auto& [key, coeff] : v.coeffs) d.add(key, coeff);  // throws on a surviving derivative
        out.add_value(tuple, d);
    }
    return out;
}

/// Constant part at x = 0 of every coefficient.
inline DiffOp eval_at_zero(const DiffOp& d) {
    DiffOp out(d.spec);
    for (const auto& [key, coeff] : d.coeffs)
        out.add(key, Poly::constant(d.spec.m, coeff.constant_term()));
    return out;
}

struct ThetaResult {
    Rational theta;            // class coordinate against the order-0 generator
    Rational theta_at_zero;    // the x = 0 shortcut evaluation
    bool order_drop = false;   // the lifted coboundary landed in order 0
    bool routes_agree = false; // both computations produced the same constant
};

/// Connecting constant of the order filtration at k = 1: lifts the degree-1
/// invariant symbol cochain, takes its coboundary (which drops to order 0),
/// and expresses the class in terms of the order-0 invariant cochain. The
/// result is cross-checked by evaluating both sides at the origin on the
/// distinguished basis tuple.
inline ThetaResult theta_constant(Species species, int m, int p, int q, int a) {
    if (a != 0 && a != 1) throw std::invalid_argument("theta_constant: gl degree must be 0 or 1");
    if (species == Species::multivector) {
        if (p <= q) throw std::invalid_argument("theta_constant: multivector case needs p > q");
    } else if (species == Species::form) {
        if (q != p + 1) throw std::invalid_argument("theta_constant: form case needs q = p + 1");
    } else {
        throw std::invalid_argument("theta_constant: function species has no symbol invariants here");
    }

    SlContext ctx(m);
    const bool mv = species == Species::multivector;
    auto fam1 = invariant_family(mv ? InvariantKind::I1 : InvariantKind::J1, m, p, q);
    auto fam0 = invariant_family(mv ? InvariantKind::I0 : InvariantKind::J0, m, p, q);

    // degree-1-symbol side, lifted to operators
    auto c1_sym = chi_cochain(gamma_tensor_family(a, fam1), ctx);
    if (!ce_differential(c1_sym, ctx).is_zero())
        throw std::logic_error("theta_constant: chi image is not a symbol cocycle");
    Cochain<DiffOp> lifted(c1_sym.spec.as_operator(), c1_sym.degree);
    for (const auto& [tuple, v] : c1_sym.values) lifted.add_value(tuple, lift_symbol(v));

    auto boundary = ce_differential(lifted, ctx);
    ThetaResult res;
    for (const auto& [tuple, v] : boundary.values)
        if (v.order() > 0) throw std::logic_error("theta_constant: coboundary did not drop order");
    res.order_drop = true;
    auto boundary0 = restrict_to_order_zero(boundary);

    // order-0 generator cochain
    auto c0_sym = chi_cochain(gamma_tensor_family(a, fam0), ctx);
    Cochain<DiffOp> gen(c0_sym.spec.as_operator(), c0_sym.degree);
    for (const auto& [tuple, v] : c0_sym.values) gen.add_value(tuple, lift_symbol(v));
    if (gen.is_zero()) throw std::logic_error("theta_constant: order-0 generator vanished");

    auto coords = class_coordinates(boundary0, {gen}, ctx);
    if (!coords) throw std::invalid_argument("theta_constant: class comparison is unsolvable");
    res.theta = coords->lambda[0];

    // x = 0 shortcut on the distinguished tuple (gl diagonal then covectors)
    std::vector<int> tuple;
    if (a == 1) tuple.push_back(m + 0 * m + 0);  // E^1_1, trace 1
    const int ncov = mv ? p - q : q - p;
    for (int c = 0; c < ncov; ++c) tuple.push_back(m + m * m + c);
    DiffOp lhs = eval_at_zero(boundary0.value(tuple));
    DiffOp rhs = eval_at_zero(gen.value(tuple));
    if (rhs.is_zero()) throw std::logic_error("theta_constant: generator vanishes on the distinguished tuple");
    if (lhs.is_zero()) {
        res.theta_at_zero = Rational(0);
    } else {
        Rational ratio = lhs.monomials().front().second / rhs.monomials().front().second;
        if (!(lhs == ratio * rhs))
            throw std::logic_error("theta_constant: x = 0 evaluation is not proportional to the generator");
        res.theta_at_zero = ratio;
    }
    res.routes_agree = res.theta == res.theta_at_zero;
    return res;
}

/// The per-term origin evaluation inside the connecting-constant computation:
/// (-1)^i L_{a_i*} lift(I1(a_0,..,a_i-hat,..,a_b))|_0 = (m+1) I0(a_0,..,a_b),
/// for the basis covectors a_j = e^{j+1}.
inline bool intermediate_contraction_identity(int m, int p, int q) {
    if (p - q < 1 || p - q > m) throw std::invalid_argument("needs 1 <= p - q <= m");
    const int nargs = p - q;
    std::vector<Covector> alphas;
    for (int j = 0; j < nargs; ++j) alphas.push_back(Covector::basis(m, j));
    DiffOp i0_full = lift_symbol(invariant_I(InvariantKind::I0, m, p, q, alphas));
    const Rational target(m + 1);
    for (int i = 0; i < nargs; ++i) {
        std::vector<Covector> rest;
        for (int j = 0; j < nargs; ++j)
            if (j != i) rest.push_back(alphas[j]);
        DiffOp lifted = lift_symbol(invariant_I(InvariantKind::I1, m, p, q, rest));
        SlElement alpha_elt(m);
        alpha_elt.alpha[i] = 1;
        DiffOp acted = lie_derivative_op(sl_embed(alpha_elt), lifted);
        DiffOp at_zero = eval_at_zero(acted);
        DiffOp expected(acted.spec);  // the order-0 target inside the order-1 module
        for (const auto& [key, c] : i0_full.coeffs) expected.add(key, (i % 2 == 0 ? target : -target) * c);
        if (!(at_zero == expected)) return false;
    }
    return true;
}

}  // namespace veccoh
