#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "veccoh/ce_complex.hpp"

namespace veccoh {

/// Multiplies every coefficient of a symbol by a polynomial.
inline SymbolTensor poly_scale(const Poly& f, const SymbolTensor& s) {
    SymbolTensor out(s.spec);
    if (f.is_zero()) return out;
    for (const auto& [key, c] : s.coeffs) out.add(key, f * c);
    return out;
}

/// Canonical gl(m) action on a symbol value with a constant matrix: the
/// derivation action on the eta slots plus the Hom action on both basis slots.
inline SymbolTensor gl_act_symbol(const std::vector<std::vector<Rational>>& a, const SymbolTensor& s) {
    const ModuleSpec& sp = s.spec;
    const int m = sp.m;
    PolyMatrix pa = PolyMatrix::from_rational(m, a);
    const bool dual = sp.species == Species::form;
    SymbolTensor out(sp);
    std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> fwd_dst, rev_src;
    if (sp.species != Species::function) {
        fwd_dst = detail::gl_action_table(pa, sp.q, dual);
        rev_src = detail::reverse_table(detail::gl_action_table(pa, sp.p, dual));
    }
    for (const auto& [key, coeff] : s.coeffs) {
        for (std::size_t slot = 0; slot < key.der.size(); ++slot)
            for (int j = 0; j < m; ++j) {
                if (a[j][key.der[slot]].is_zero()) continue;
                AxisTuple eta = key.der;
                eta[slot] = j;
                std::sort(eta.begin(), eta.end());
                out.add({eta, key.src, key.dst}, a[j][key.der[slot]] * coeff);
            }
        if (sp.species != Species::function) {
            auto itd = fwd_dst.find(key.dst);
            if (itd != fwd_dst.end())
                for (const auto& [j2, c] : itd->second) out.add({key.der, key.src, j2}, c * coeff);
            auto its = rev_src.find(key.src);
            if (its != rev_src.end())
                for (const auto& [i2, c] : its->second) out.add({key.der, i2, key.dst}, -(c * coeff));
        }
    }
    return out;
}

/// Alternating multilinear family on covector tuples with constant symbol
/// values; carries the invariant generators and the covector half of the
/// chi-map domain.
struct CovariantFamily {
    int m = 0;
    int arity = 0;
    ModuleSpec value_spec;
    std::map<AxisTuple, SymbolTensor> values;  // strictly increasing covector index tuples

    CovariantFamily(int m_, int arity_, ModuleSpec vs) : m(m_), arity(arity_), value_spec(vs.as_symbol()) {}

    void set(const AxisTuple& tuple, const SymbolTensor& v) {
        if ((int)tuple.size() != arity) throw std::invalid_argument("CovariantFamily: tuple arity");
        if (!v.is_zero()) values.insert_or_assign(tuple, v);
    }

    SymbolTensor value(const AxisTuple& tuple) const {
        auto it = values.find(tuple);
        return it == values.end() ? SymbolTensor(value_spec) : it->second;
    }

    /// Multilinear alternating evaluation on polynomial 1-forms.
    SymbolTensor eval(const std::vector<PolyForm>& args) const {
        if ((int)args.size() != arity) throw std::invalid_argument("CovariantFamily: argument arity");
        SymbolTensor acc(value_spec);
        for (const auto& [tuple, v] : values) {
            Poly det = alternating_det(args, tuple);
            if (!det.is_zero()) acc = acc + poly_scale(det, v);
        }
        return acc;
    }

    Poly alternating_det(const std::vector<PolyForm>& args, const AxisTuple& tuple) const {
        const int n = arity;
        if (n == 0) return Poly::constant(m, 1);
        // permutation expansion; arities here are at most 3
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        Poly det(m);
        do {
            int sign = 1;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (perm[i] > perm[j]) sign = -sign;
            Poly prod = Poly::constant(m, sign);
            for (int i = 0; i < n && !prod.is_zero(); ++i) prod *= args[i].component({tuple[perm[i]]});
            det += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return det;
    }
};

// ---------------------------------------------------------------------------
// The invariant generators
// ---------------------------------------------------------------------------

enum class InvariantKind { I0, I1, J0, J1 };

/// I0(a_1..a_{p-q}): T -> i_{a_1} ... i_{a_{p-q}} T, as a constant order-0 symbol.
/// I1(a_1..a_{p-q-1}): T -> i_eta i_{a_1} ... i_{a_{p-q-1}} T, of symbol degree 1.
inline SymbolTensor invariant_I(InvariantKind kind, int m, int p, int q, const std::vector<Covector>& alphas) {
    if (kind != InvariantKind::I0 && kind != InvariantKind::I1)
        throw std::invalid_argument("invariant_I: needs an I-kind");
    if (p < q) throw std::invalid_argument("invariant_I: needs p >= q");
    const int want = kind == InvariantKind::I0 ? p - q : p - q - 1;
    if ((int)alphas.size() != want) throw std::invalid_argument("invariant_I: argument arity");
    const int k = kind == InvariantKind::I0 ? 0 : 1;
    SymbolTensor s(ModuleSpec::multivectors(m, p, q, k).as_symbol());
    for (const auto& src : increasing_tuples(m, p)) {
        PolyMultiVector w = basis_multivector(m, src);
        for (auto it = alphas.rbegin(); it != alphas.rend(); ++it) w = interior_product(*it, w);
        if (w.is_zero()) continue;
        if (kind == InvariantKind::I0) {
            for (const auto& [dst, c] : w.components()) s.add({{}, src, dst}, c);
        } else {
            for (int j = 0; j < m; ++j) {
                PolyMultiVector wj = interior_product(Covector::basis(m, j), w);
                for (const auto& [dst, c] : wj.components()) s.add({{j}, src, dst}, c);
            }
        }
    }
    return s;
}

/// J0(a_1..a_{q-p}): w -> a_1 ^ ... ^ a_{q-p} ^ w.
/// J1(a_1..a_{q-p-1}): w -> eta ^ a_1 ^ ... ^ a_{q-p-1} ^ w.
inline SymbolTensor invariant_J(InvariantKind kind, int m, int p, int q, const std::vector<Covector>& alphas) {
    if (kind != InvariantKind::J0 && kind != InvariantKind::J1)
        throw std::invalid_argument("invariant_J: needs a J-kind");
    if (q < p) throw std::invalid_argument("invariant_J: needs q >= p");
    if (q > m) throw std::invalid_argument("invariant_J: target degree exceeds dimension");
    const int want = kind == InvariantKind::J0 ? q - p : q - p - 1;
    if ((int)alphas.size() != want) throw std::invalid_argument("invariant_J: argument arity");
    const int k = kind == InvariantKind::J0 ? 0 : 1;
    SymbolTensor s(ModuleSpec::forms(m, p, q, k).as_symbol());
    for (const auto& src : increasing_tuples(m, p)) {
        PolyForm w = basis_form(m, src);
        for (auto it = alphas.rbegin(); it != alphas.rend(); ++it) w = wedge(it->as_form(m), w);
        if (w.is_zero()) continue;
        if (kind == InvariantKind::J0) {
            for (const auto& [dst, c] : w.components()) s.add({{}, src, dst}, c);
        } else {
            for (int j = 0; j < m; ++j) {
                PolyForm wj = wedge(basis_form(m, {j}), w);
                for (const auto& [dst, c] : wj.components()) s.add({{j}, src, dst}, c);
            }
        }
    }
    return s;
}

/// The generator family over all increasing covector basis tuples.
inline CovariantFamily invariant_family(InvariantKind kind, int m, int p, int q) {
    int arity = 0;
    ModuleSpec vs;
    switch (kind) {
        case InvariantKind::I0: arity = p - q; vs = ModuleSpec::multivectors(m, p, q, 0); break;
        case InvariantKind::I1: arity = p - q - 1; vs = ModuleSpec::multivectors(m, p, q, 1); break;
        case InvariantKind::J0: arity = q - p; vs = ModuleSpec::forms(m, p, q, 0); break;
        case InvariantKind::J1: arity = q - p - 1; vs = ModuleSpec::forms(m, p, q, 1); break;
    }
    if (arity < 0) throw std::invalid_argument("invariant_family: negative arity");
    CovariantFamily fam(m, arity, vs);
    const bool is_i = kind == InvariantKind::I0 || kind == InvariantKind::I1;
    for (const auto& tuple : increasing_tuples(m, arity)) {
        std::vector<Covector> alphas;
        for (int c : tuple) alphas.push_back(Covector::basis(m, c));
        fam.set(tuple, is_i ? invariant_I(kind, m, p, q, alphas) : invariant_J(kind, m, p, q, alphas));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Invariance verification
// ---------------------------------------------------------------------------

struct InvarianceReport {
    bool sl_invariant = true;
    Rational trace_scalar;  // eigenvalue of the identity matrix action
    std::string first_failure;
};

/// Action of a constant matrix on the whole family: the value action minus the
/// dual action on every covector slot.
inline CovariantFamily gl_act_family(const std::vector<std::vector<Rational>>& a, const CovariantFamily& fam) {
    CovariantFamily out(fam.m, fam.arity, fam.value_spec);
    const int m = fam.m;
    for (const auto& tuple : increasing_tuples(m, fam.arity)) {
        SymbolTensor acc = gl_act_symbol(a, fam.value(tuple));
        for (std::size_t s = 0; s < tuple.size(); ++s)
            for (int l = 0; l < m; ++l) {
                // dual action on slot s: e^{c_s} -> -sum_l a[c_s][l] e^l
                if (a[tuple[s]][l].is_zero()) continue;
                AxisTuple t2 = tuple;
                t2[s] = l;
                auto sorted = sort_with_sign(std::move(t2));
                if (!sorted) continue;
                Rational c = a[tuple[s]][l];
                if (sorted->second < 0) c = -c;
                acc = acc + c * fam.value(sorted->first);  // minus the (-...) slot action
            }
        if (!acc.is_zero()) out.set(tuple, acc);
    }
    return out;
}

/// Checks sl(m) invariance: every traceless matrix annihilates the family; the
/// identity acts by a scalar, which is reported.
inline InvarianceReport verify_invariance(const CovariantFamily& fam) {
    InvarianceReport rep;
    const int m = fam.m;
    auto zero_matrix = [&] { return std::vector<std::vector<Rational>>(m, std::vector<Rational>(m, Rational(0))); };

    auto check_zero = [&](const std::vector<std::vector<Rational>>& a, const std::string& label) {
        auto acted = gl_act_family(a, fam);
        bool zero = true;
        for (const auto& [t, v] : acted.values) zero &= v.is_zero();
        if (!zero && rep.sl_invariant) {
            rep.sl_invariant = false;
            rep.first_failure = label;
        }
    };

    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            auto a = zero_matrix();
            a[i][j] = 1;
            std::ostringstream os;
            os << "E^" << (i + 1) << "_" << (j + 1);
            check_zero(a, os.str());
        }
    for (int i = 0; i + 1 < m; ++i) {
        auto a = zero_matrix();
        a[i][i] = 1;
        a[i + 1][i + 1] = -1;
        std::ostringstream os;
        os << "E^" << (i + 1) << "_" << (i + 1) << " - E^" << (i + 2) << "_" << (i + 2);
        check_zero(a, os.str());
    }

    // trace direction: must act by a scalar
    auto id = zero_matrix();
    for (int i = 0; i < m; ++i) id[i][i] = 1;
    auto acted = gl_act_family(id, fam);
    Rational scalar(0);
    bool have_scalar = false;
    for (const auto& [tuple, v] : acted.values) {
        SymbolTensor orig = fam.value(tuple);
        if (orig.is_zero()) continue;
        scalar = v.monomials().front().second / orig.monomials().front().second;
        have_scalar = true;
        break;
    }
    rep.trace_scalar = scalar;
    (void)have_scalar;
    for (const auto& tuple : increasing_tuples(m, fam.arity)) {
        SymbolTensor expect = scalar * fam.value(tuple);
        if (!(acted.value(tuple) == expect)) {
            if (rep.sl_invariant) rep.first_failure = "identity action is not scalar";
            rep.sl_invariant = false;
            break;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The chi map
// ---------------------------------------------------------------------------

/// Cochain of gl(m) with values in covector-degree-u families: the domain of
/// the chi map. Values are stored on (gl basis tuple, covector basis tuple).
struct GlCochain {
    int m = 0;
    int t = 0;  // gl degree
    int u = 0;  // covector degree
    ModuleSpec value_spec;
    std::map<std::pair<AxisTuple, AxisTuple>, SymbolTensor> values;

    GlCochain(int m_, int t_, int u_, ModuleSpec vs) : m(m_), t(t_), u(u_), value_spec(vs.as_symbol()) {}

    void set(const AxisTuple& gl_tuple, const AxisTuple& cov_tuple, const SymbolTensor& v) {
        if ((int)gl_tuple.size() != t || (int)cov_tuple.size() != u)
            throw std::invalid_argument("GlCochain: tuple arity");
        if (!v.is_zero()) values.insert_or_assign({gl_tuple, cov_tuple}, v);
    }

    SymbolTensor value(const AxisTuple& g, const AxisTuple& c) const {
        auto it = values.find({g, c});
        return it == values.end() ? SymbolTensor(value_spec) : it->second;
    }
};

/// gamma (x) I for gamma one of the gl-invariant generators: 1 (a = 0) or the
/// trace form (a = 1).
inline GlCochain gamma_tensor_family(int a, const CovariantFamily& fam) {
    if (a != 0 && a != 1) throw std::invalid_argument("gamma_tensor_family: gl degree must be 0 or 1");
    GlCochain g(fam.m, a, fam.arity, fam.value_spec);
    const int m = fam.m;
    if (a == 0) {
        for (const auto& [tuple, v] : fam.values) g.set({}, tuple, v);
    } else {
        for (int d = 0; d < m; ++d) {
            int gl_index = d * m + d;  // diagonal matrix unit, trace 1
            for (const auto& [tuple, v] : fam.values) g.set({gl_index}, tuple, v);
        }
    }
    return g;
}

namespace detail {

inline int shuffle_sign(const std::vector<int>& first, const std::vector<int>& second) {
    std::vector<int> perm = first;
    perm.insert(perm.end(), second.begin(), second.end());
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) sign = -sign;
    return sign;
}

inline std::vector<std::pair<std::vector<int>, std::vector<int>>> shuffles(int total, int first) {
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    for (const auto& s : increasing_tuples(total, first)) {
        std::vector<int> comp;
        std::size_t si = 0;
        for (int i = 0; i < total; ++i) {
            if (si < s.size() && s[si] == i) { ++si; continue; }
            comp.push_back(i);
        }
        out.emplace_back(s, comp);
    }
    return out;
}

/// Multilinear alternating evaluation of the gl half on matrices.
inline Poly gl_det(const GlCochain& g, const AxisTuple& gl_tuple, const std::vector<PolyMatrix>& mats) {
    const int t = g.t;
    if (t == 0) return Poly::constant(g.m, 1);
    std::vector<int> perm(t);
    for (int i = 0; i < t; ++i) perm[i] = i;
    Poly det(g.m);
    do {
        int sign = 1;
        for (int i = 0; i < t; ++i)
            for (int j = i + 1; j < t; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        Poly prod = Poly::constant(g.m, sign);
        for (int i = 0; i < t && !prod.is_zero(); ++i) {
            int a = gl_tuple[perm[i]] / g.m, b = gl_tuple[perm[i]] % g.m;
            prod *= mats[i].at(a, b);
        }
        det += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

inline Poly cov_det(const GlCochain& g, const AxisTuple& cov_tuple, const std::vector<PolyForm>& forms) {
    const int u = g.u;
    if (u == 0) return Poly::constant(g.m, 1);
    std::vector<int> perm(u);
    for (int i = 0; i < u; ++i) perm[i] = i;
    Poly det(g.m);
    do {
        int sign = 1;
        for (int i = 0; i < u; ++i)
            for (int j = i + 1; j < u; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        Poly prod = Poly::constant(g.m, sign);
        for (int i = 0; i < u && !prod.is_zero(); ++i) prod *= forms[i].component({cov_tuple[perm[i]]});
        det += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

}  // namespace detail

/// The chi evaluation: with t gl slots and u covector slots,
///   (X_0..X_{t+u-1}) -> (-1)^t / (t! u! (m+1)^u) sum_nu sign(nu)
///       gamma(DX_{nu_0}..DX_{nu_{t-1}})(dtr(DX_{nu_t})..dtr(DX_{nu_{t+u-1}})).
/// The inner alternating sums collapse the permutation sum to shuffles.
inline SymbolTensor chi(const GlCochain& g, const std::vector<VectorField>& xs) {
    if ((int)xs.size() != g.t + g.u) throw std::invalid_argument("chi: argument arity");
    const int m = g.m;
    std::vector<PolyMatrix> jac;
    std::vector<PolyForm> dtrs;
    jac.reserve(xs.size());
    dtrs.reserve(xs.size());
    for (const auto& x : xs) {
        jac.push_back(jacobian(x));
        dtrs.push_back(dtr(x));
    }

    SymbolTensor acc(g.value_spec);
    for (const auto& [gl_slots, cov_slots] : detail::shuffles(g.t + g.u, g.t)) {
        const int ssign = detail::shuffle_sign(gl_slots, cov_slots);
        std::vector<PolyMatrix> mats;
        for (int i : gl_slots) mats.push_back(jac[i]);
        std::vector<PolyForm> forms;
        for (int i : cov_slots) forms.push_back(dtrs[i]);
        for (const auto& [key, v] : g.values) {
            Poly factor = detail::gl_det(g, key.first, mats) * detail::cov_det(g, key.second, forms);
            if (factor.is_zero()) continue;
            if (ssign < 0) factor = -factor;
            acc = acc + poly_scale(factor, v);
        }
    }
    // normalization (-1)^t / (m+1)^u; the t! u! is absorbed by summing shuffles
    Rational norm(g.t % 2 == 0 ? 1 : -1);
    Rational denom(1);
    for (int i = 0; i < g.u; ++i) denom *= Rational(m + 1);
    return (norm / denom) * acc;
}

/// chi restricted to the embedded basis, assembled as a (t+u)-cochain.
inline Cochain<SymbolTensor> chi_cochain(const GlCochain& g, const SlContext& ctx) {
    Cochain<SymbolTensor> out(g.value_spec, g.t + g.u);
    for (const auto& tuple : increasing_tuples(ctx.dim(), g.t + g.u)) {
        std::vector<VectorField> xs;
        xs.reserve(tuple.size());
        for (int i : tuple) xs.push_back(ctx.fields[i]);
        SymbolTensor v = chi(g, xs);
        if (!v.is_zero()) out.values.emplace(tuple, std::move(v));
    }
    return out;
}

}  // namespace veccoh
