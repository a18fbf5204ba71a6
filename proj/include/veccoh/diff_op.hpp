#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "veccoh/tensor_fields.hpp"

namespace veccoh {

enum class Species { multivector, form, function };

inline std::string species_name(Species s) {
    switch (s) {
        case Species::multivector: return "mv";
        case Species::form: return "form";
        case Species::function: return "fn";
    }
    return "?";
}

enum class Level { op, symbol };

/// Names a coefficient module: k-th order operators (or their degree-k
/// symbols) from degree-p fields to degree-q fields of the given species.
struct ModuleSpec {
    int m = 0;
    Species species = Species::function;
    int p = 0;
    int q = 0;
    int k = 0;
    Level level = Level::op;

    ModuleSpec() = default;
    ModuleSpec(int m_, Species sp, int p_, int q_, int k_, Level lv = Level::op)
        : m(m_), species(sp), p(p_), q(q_), k(k_), level(lv) {
        if (m < 1) throw std::invalid_argument("ModuleSpec: bad dimension");
        if (k < 0) throw std::invalid_argument("ModuleSpec: negative order");
        if (sp == Species::function) {
            if (p != 0 || q != 0) throw std::invalid_argument("ModuleSpec: function species forces p = q = 0");
        } else if (p < 0 || p > m || q < 0 || q > m) {
            throw std::invalid_argument("ModuleSpec: degenerate degrees are rejected");
        }
    }

    static ModuleSpec functions(int m, int k) { return ModuleSpec(m, Species::function, 0, 0, k); }
    static ModuleSpec multivectors(int m, int p, int q, int k) {
        return ModuleSpec(m, Species::multivector, p, q, k);
    }
    static ModuleSpec forms(int m, int p, int q, int k) { return ModuleSpec(m, Species::form, p, q, k); }

    ModuleSpec as_symbol() const { return ModuleSpec(m, species, p, q, k, Level::symbol); }
    ModuleSpec as_operator() const { return ModuleSpec(m, species, p, q, k, Level::op); }
    ModuleSpec with_order(int k2) const { return ModuleSpec(m, species, p, q, k2, level); }

    bool same_shape(const ModuleSpec& o) const {
        return m == o.m && species == o.species && p == o.p && q == o.q && k == o.k && level == o.level;
    }

    std::string slug() const {
        std::ostringstream os;
        os << species_name(species);
        if (species != Species::function) os << "_p" << p << "_q" << q;
        os << "_k" << k << "_m" << m;
        if (level == Level::symbol) os << "_sym";
        return os.str();
    }

    friend bool operator==(const ModuleSpec& a, const ModuleSpec& b) { return a.same_shape(b); }
};

/// Coefficient slot of the normal form: derivative (or symbol) multiset plus
/// the Hom part mapping the source basis tuple to the target basis tuple.
struct OpKey {
    AxisTuple der;  // nondecreasing
    AxisTuple src;  // strictly increasing
    AxisTuple dst;  // strictly increasing

    friend bool operator<(const OpKey& a, const OpKey& b) {
        return std::tie(a.der, a.src, a.dst) < std::tie(b.der, b.src, b.dst);
    }
    friend bool operator==(const OpKey& a, const OpKey& b) {
        return a.der == b.der && a.src == b.src && a.dst == b.dst;
    }
};

/// A single monomial of a coefficient module element: x^beta times an OpKey slot.
struct OpMonomial {
    Exponents beta;
    OpKey key;

    friend bool operator<(const OpMonomial& a, const OpMonomial& b) {
        return std::tie(a.beta, a.key) < std::tie(b.beta, b.key);
    }
    friend bool operator==(const OpMonomial& a, const OpMonomial& b) {
        return a.beta == b.beta && a.key == b.key;
    }
};

namespace detail {

template <class Self>
struct CoefficientTable {
    ModuleSpec spec;
    std::map<OpKey, Poly> coeffs;

    explicit CoefficientTable(ModuleSpec s) : spec(std::move(s)) {}

    void add(const OpKey& key, const Poly& c) {
        if (c.is_zero()) return;
        auto it = coeffs.find(key);
        if (it == coeffs.end()) {
            coeffs.emplace(key, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) coeffs.erase(it);
        }
    }

    Poly at(const OpKey& key) const {
        auto it = coeffs.find(key);
        return it == coeffs.end() ? Poly(spec.m) : it->second;
    }

    bool is_zero() const { return coeffs.empty(); }

    friend Self operator+(Self a, const Self& b) {
        a.check_shape(b);
        for (const auto& [k, c] : b.coeffs) a.add(k, c);
        return a;
    }
    friend Self operator-(Self a, const Self& b) {
        a.check_shape(b);
        for (const auto& [k, c] : b.coeffs) a.add(k, -c);
        return a;
    }
    friend Self operator*(const Rational& r, const Self& x) {
        Self out(x.spec);
        for (const auto& [k, c] : x.coeffs) out.add(k, r * c);
        return out;
    }
    friend bool operator==(const Self& a, const Self& b) {
        return a.spec.same_shape(b.spec) && a.coeffs == b.coeffs;
    }

    void check_shape(const CoefficientTable& o) const {
        if (!spec.same_shape(o.spec)) throw std::invalid_argument("coefficient module shape mismatch");
    }

    std::vector<std::pair<OpMonomial, Rational>> monomials() const {
        std::vector<std::pair<OpMonomial, Rational>> out;
        for (const auto& [k, poly] : coeffs)
            for (const auto& [e, c] : poly.terms()) out.push_back({OpMonomial{e, k}, c});
        return out;
    }
};

}  // namespace detail

/// Linear differential operator in normal form: sum over r <= k of
/// A^{i1..ir} o d_{i1..ir}, the Hom-valued coefficients stored per basis pair.
struct DiffOp : detail::CoefficientTable<DiffOp> {
    explicit DiffOp(ModuleSpec s) : CoefficientTable(std::move(s)) {
        if (spec.level != Level::op) throw std::invalid_argument("DiffOp: operator-level spec required");
    }

    void add(const OpKey& key, const Poly& c) {
        if ((int)key.der.size() > spec.k) throw std::invalid_argument("DiffOp: derivative order beyond bound");
        CoefficientTable::add(key, c);
    }

    int order() const {
        int r = 0;
        for (const auto& [k, c] : coeffs) r = std::max<int>(r, (int)k.der.size());
        return r;
    }

    static DiffOp identity(const ModuleSpec& s) {
        DiffOp d(s);
        const int deg = s.species == Species::function ? 0 : s.p;
        if (s.species != Species::function && s.p != s.q)
            throw std::invalid_argument("identity operator needs p = q");
        for (const auto& t : increasing_tuples(s.m, deg)) d.add({{}, t, t}, Poly::constant(s.m, 1));
        return d;
    }
};

/// Principal symbol: homogeneous degree-k polynomial in the symbol covariable
/// valued in Hom, stored on the same key layout with exact eta-degree k.
struct SymbolTensor : detail::CoefficientTable<SymbolTensor> {
    explicit SymbolTensor(ModuleSpec s) : CoefficientTable(std::move(s)) {
        if (spec.level != Level::symbol) throw std::invalid_argument("SymbolTensor: symbol-level spec required");
    }

    void add(const OpKey& key, const Poly& c) {
        if ((int)key.der.size() != spec.k)
            throw std::invalid_argument("SymbolTensor: eta-degree must equal k");
        CoefficientTable::add(key, c);
    }
};

// ---------------------------------------------------------------------------
// Application to fields
// ---------------------------------------------------------------------------

inline Poly apply(const DiffOp& d, const Poly& f) {
    if (d.spec.species != Species::function) throw std::invalid_argument("apply: operator is not function-valued");
    if (f.num_vars() != d.spec.m) throw std::invalid_argument("apply: dimension mismatch");
    Poly out(d.spec.m);
    for (const auto& [key, a] : d.coeffs) out += a * f.partial_many(key.der);
    return out;
}

inline PolyMultiVector apply(const DiffOp& d, const PolyMultiVector& t) {
    if (d.spec.species != Species::multivector || t.degree() != d.spec.p || t.dimension() != d.spec.m)
        throw std::invalid_argument("apply: source mismatch");
    PolyMultiVector out(d.spec.m, d.spec.q);
    for (const auto& [key, a] : d.coeffs) {
        Poly part = t.component(key.src).partial_many(key.der);
        if (!part.is_zero()) out.add_component(key.dst, a * part);
    }
    return out;
}

inline PolyForm apply(const DiffOp& d, const PolyForm& w) {
    if (d.spec.species != Species::form || w.degree() != d.spec.p || w.dimension() != d.spec.m)
        throw std::invalid_argument("apply: source mismatch");
    PolyForm out(d.spec.m, d.spec.q);
    for (const auto& [key, a] : d.coeffs) {
        Poly part = w.component(key.src).partial_many(key.der);
        if (!part.is_zero()) out.add_component(key.dst, a * part);
    }
    return out;
}

// ---------------------------------------------------------------------------
// The Vect action L_X A = L_X o A - A o L_X, renormalized to the Sum A d form
// ---------------------------------------------------------------------------

namespace detail {

inline long binomial(int n, int r) {
    if (r < 0 || r > n) return 0;
    long out = 1;
    for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

struct LeibnizSplit {
    AxisTuple taken;      // nu, the part hitting the inner factor
    AxisTuple remaining;  // der - nu
    long coeff;           // product of per-axis binomials
};

inline std::vector<LeibnizSplit> leibniz_splits(const AxisTuple& der, int m) {
    std::vector<int> count(m, 0);
    for (int a : der) ++count[a];
    std::vector<LeibnizSplit> out;
    std::vector<int> nu(m, 0);
    while (true) {
        LeibnizSplit s;
        s.coeff = 1;
        for (int i = 0; i < m; ++i) {
            s.coeff *= binomial(count[i], nu[i]);
            for (int c = 0; c < nu[i]; ++c) s.taken.push_back(i);
            for (int c = 0; c < count[i] - nu[i]; ++c) s.remaining.push_back(i);
        }
        out.push_back(std::move(s));
        int i = m - 1;
        while (i >= 0 && nu[i] == count[i]) { nu[i] = 0; --i; }
        if (i < 0) break;
        ++nu[i];
    }
    return out;
}

/// Forward action table of rho(A) on all degree-deg basis tuples:
/// table[input] = list of (output, coefficient).
inline std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> gl_action_table(const PolyMatrix& a,
                                                                                    int deg, bool dual) {
    std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> table;
    for (const auto& t : increasing_tuples(a.dimension(), deg)) {
        auto terms = gl_tuple_action(a, t, dual);
        // merge duplicate outputs
        std::map<AxisTuple, Poly> merged;
        for (auto& [out, c] : terms) {
            auto it = merged.find(out);
            if (it == merged.end()) merged.emplace(out, c);
            else it->second += c;
        }
        auto& row = table[t];
        for (auto& [out, c] : merged)
            if (!c.is_zero()) row.emplace_back(out, c);
    }
    return table;
}

/// Reverse index of a forward table: rev[output] = list of (input, coefficient).
inline std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> reverse_table(
    const std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>>& fwd) {
    std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> rev;
    for (const auto& [in, terms] : fwd)
        for (const auto& [out, c] : terms) rev[out].emplace_back(in, c);
    return rev;
}

}  // namespace detail

/// L_X D = L_X o D - D o L_X in normal form. The two order-(k+1) layers cancel
/// exactly; the result respects the order bound k.
inline DiffOp lie_derivative_op(const VectorField& x, const DiffOp& d) {
    const ModuleSpec& sp = d.spec;
    if (x.dimension() != sp.m) throw std::invalid_argument("lie_derivative_op: dimension mismatch");
    const int m = sp.m;
    const bool with_rho = sp.species != Species::function;
    const bool dual = sp.species == Species::form;
    const PolyMatrix dx = jacobian(x);

    std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> fwd_dst, rev_src;
    if (with_rho) {
        fwd_dst = detail::gl_action_table(dx, sp.q, dual);
        rev_src = detail::reverse_table(detail::gl_action_table(dx, sp.p, dual));
    }

    // Collect into a plain table first: intermediate terms may exceed order k
    // before the cancellation is merged in.
    std::map<OpKey, Poly> acc;
    auto put = [&](OpKey key, Poly c) {
        if (c.is_zero()) return;
        auto it = acc.find(key);
        if (it == acc.end()) acc.emplace(std::move(key), std::move(c));
        else {
            it->second += c;
            if (it->second.is_zero()) acc.erase(it);
        }
    };

    for (const auto& [key, a] : d.coeffs) {
        // X.(A) d_der
        put(key, x.apply(a));
        // X^j A d_{der + j}  (top layer of L o D)
        for (int j = 0; j < m; ++j) {
            if (x.component(j).is_zero()) continue;
            auto sortedder = key.der;
            sortedder.insert(std::upper_bound(sortedder.begin(), sortedder.end(), j), j);
            put({sortedder, key.src, key.dst}, x.component(j) * a);
        }
        // -rho_W(DX) o A on the target slot
        if (with_rho) {
            auto it = fwd_dst.find(key.dst);
            if (it != fwd_dst.end())
                for (const auto& [j2, c] : it->second) put({key.der, key.src, j2}, -(c * a));
        }
        // -A d_der (X^j d_j .) and +A d_der (rho_V(DX) .), expanded by Leibniz
        for (const auto& split : detail::leibniz_splits(key.der, m)) {
            const Rational bin((long)split.coeff);
            for (int j = 0; j < m; ++j) {
                Poly xj = x.component(j).partial_many(split.taken);
                if (xj.is_zero()) continue;
                auto der2 = split.remaining;
                der2.insert(std::upper_bound(der2.begin(), der2.end(), j), j);
                put({der2, key.src, key.dst}, -(bin * (a * xj)));
            }
            if (with_rho) {
                auto it = rev_src.find(key.src);
                if (it != rev_src.end())
                    for (const auto& [i2, c] : it->second) {
                        Poly dc = c.partial_many(split.taken);
                        if (!dc.is_zero()) put({split.remaining, i2, key.dst}, bin * (a * dc));
                    }
            }
        }
    }

    DiffOp out(sp);
    for (auto& [key, c] : acc) out.add(key, c);  // throws if an order-(k+1) term survived
    return out;
}

/// Top coefficient layer r = k as a symbol.
inline SymbolTensor principal_symbol(const DiffOp& d) {
    SymbolTensor s(d.spec.as_symbol());
    for (const auto& [key, c] : d.coeffs)
        if ((int)key.der.size() == d.spec.k) s.add(key, c);
    return s;
}

/// Canonical section of the symbol map: same coefficient tensors, derivative
/// indices in place of the symbol indices, no lower-order terms.
inline DiffOp lift_symbol(const SymbolTensor& s) {
    DiffOp d(s.spec.as_operator());
    for (const auto& [key, c] : s.coeffs) d.add(key, c);
    return d;
}

/// The Vect action induced on principal symbols; satisfies
/// principal_symbol(L_X D) = L_X principal_symbol(D) for exact-order-k D.
inline SymbolTensor symbol_lie_derivative(const VectorField& x, const SymbolTensor& s) {
    const ModuleSpec& sp = s.spec;
    if (x.dimension() != sp.m) throw std::invalid_argument("symbol_lie_derivative: dimension mismatch");
    const int m = sp.m;
    const bool with_rho = sp.species != Species::function;
    const bool dual = sp.species == Species::form;
    const PolyMatrix dx = jacobian(x);

    std::map<AxisTuple, std::vector<std::pair<AxisTuple, Poly>>> fwd_dst, rev_src;
    if (with_rho) {
        fwd_dst = detail::gl_action_table(dx, sp.q, dual);
        rev_src = detail::reverse_table(detail::gl_action_table(dx, sp.p, dual));
    }

    SymbolTensor out(sp);
    for (const auto& [key, a] : s.coeffs) {
        out.add(key, x.apply(a));
        // -rho on the symmetric eta slots: eta_i picks up coefficient (DX)^j_i on eta_j
        for (std::size_t slot = 0; slot < key.der.size(); ++slot)
            for (int j = 0; j < m; ++j) {
                const Poly& entry = dx.at(j, key.der[slot]);
                if (entry.is_zero()) continue;
                AxisTuple eta = key.der;
                eta[slot] = j;
                std::sort(eta.begin(), eta.end());
                out.add({eta, key.src, key.dst}, -(entry * a));
            }
        if (with_rho) {
            auto itd = fwd_dst.find(key.dst);
            if (itd != fwd_dst.end())
                for (const auto& [j2, c] : itd->second) out.add({key.der, key.src, j2}, -(c * a));
            auto its = rev_src.find(key.src);
            if (its != rev_src.end())
                for (const auto& [i2, c] : its->second) out.add({key.der, i2, key.dst}, c * a);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Monomial bookkeeping for the weight machinery
// ---------------------------------------------------------------------------

inline DiffOp monomial_op(const ModuleSpec& sp, const OpMonomial& mon, const Rational& c) {
    DiffOp d(sp.as_operator());
    d.add(mon.key, Poly::monomial(sp.m, mon.beta, c));
    return d;
}

inline SymbolTensor monomial_symbol(const ModuleSpec& sp, const OpMonomial& mon, const Rational& c) {
    SymbolTensor s(sp.as_symbol());
    s.add(mon.key, Poly::monomial(sp.m, mon.beta, c));
    return s;
}

/// Eigenvalue of the Euler-field action on a monomial, in closed form.
inline int monomial_weight(const ModuleSpec& sp, const OpMonomial& mon) {
    int shift = 0;
    if (sp.species == Species::multivector) shift = sp.p - sp.q;
    if (sp.species == Species::form) shift = sp.q - sp.p;
    return total_degree(mon.beta) - (int)mon.key.der.size() + shift;
}

/// Eigenvalues under the m commuting diagonal fields -x^i d_i (the embedded
/// diagonal matrix units); refines monomial_weight.
inline std::vector<int> monomial_multiweight(const ModuleSpec& sp, const OpMonomial& mon) {
    std::vector<int> w(sp.m, 0);
    for (int i = 0; i < sp.m; ++i) w[i] -= mon.beta[i];
    for (int a : mon.key.der) ++w[a];
    const int dualsign = sp.species == Species::form ? -1 : 1;
    for (int a : mon.key.dst) w[a] += dualsign;
    for (int a : mon.key.src) w[a] -= dualsign;
    return w;
}

/// All monomials of the module with the given Euler weight; complete by
/// construction (the x-degree is pinned per derivative layer).
inline std::vector<OpMonomial> enumerate_monomials(const ModuleSpec& sp, int weight) {
    int shift = 0;
    if (sp.species == Species::multivector) shift = sp.p - sp.q;
    if (sp.species == Species::form) shift = sp.q - sp.p;
    const int src_deg = sp.species == Species::function ? 0 : sp.p;
    const int dst_deg = sp.species == Species::function ? 0 : sp.q;

    std::vector<OpMonomial> out;
    const int rlo = sp.level == Level::symbol ? sp.k : 0;
    for (int r = rlo; r <= sp.k; ++r) {
        const int beta_deg = weight + r - shift;
        if (beta_deg < 0) continue;
        std::vector<Exponents> betas;
        Exponents e(sp.m, 0);
        // enumerate all exponent vectors of total degree beta_deg, lex order
        std::function<void(int, int)> rec = [&](int pos, int rest) {
            if (pos == sp.m - 1) {
                e[pos] = rest;
                betas.push_back(e);
                return;
            }
            for (int v = 0; v <= rest; ++v) {
                e[pos] = v;
                rec(pos + 1, rest - v);
            }
        };
        rec(0, beta_deg);
        for (const auto& der : nondecreasing_tuples(sp.m, r))
            for (const auto& src : increasing_tuples(sp.m, src_deg))
                for (const auto& dst : increasing_tuples(sp.m, dst_deg))
                    for (const auto& beta : betas) out.push_back({beta, {der, src, dst}});
    }
    return out;
}

}  // namespace veccoh
