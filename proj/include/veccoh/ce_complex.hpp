#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "veccoh/diff_op.hpp"
#include "veccoh/sl_algebra.hpp"
#include "veccoh/sparse_matrix.hpp"

namespace veccoh {

template <class M>
struct ModuleOps;

template <>
struct ModuleOps<DiffOp> {
    static DiffOp lie(const VectorField& x, const DiffOp& v) { return lie_derivative_op(x, v); }
    static DiffOp make(const ModuleSpec& sp, const OpMonomial& mon, const Rational& c) {
        return monomial_op(sp, mon, c);
    }
    static DiffOp zero(const ModuleSpec& sp) { return DiffOp(sp.as_operator()); }
    static ModuleSpec normalize(const ModuleSpec& sp) { return sp.as_operator(); }
};

template <>
struct ModuleOps<SymbolTensor> {
    static SymbolTensor lie(const VectorField& x, const SymbolTensor& v) {
        return symbol_lie_derivative(x, v);
    }
    static SymbolTensor make(const ModuleSpec& sp, const OpMonomial& mon, const Rational& c) {
        return monomial_symbol(sp, mon, c);
    }
    static SymbolTensor zero(const ModuleSpec& sp) { return SymbolTensor(sp.as_symbol()); }
    static ModuleSpec normalize(const ModuleSpec& sp) { return sp.as_symbol(); }
};

/// Alternating multilinear map from sl-basis tuples to a coefficient module,
/// stored on strictly increasing index tuples.
template <class M>
struct Cochain {
    ModuleSpec spec;
    int degree = 0;
    std::map<std::vector<int>, M> values;

    Cochain(ModuleSpec sp, int u) : spec(ModuleOps<M>::normalize(sp)), degree(u) {
        if (u < 0) throw std::invalid_argument("Cochain: negative degree");
    }

    void add_value(const std::vector<int>& tuple, const M& v) {
        if ((int)tuple.size() != degree) throw std::invalid_argument("Cochain: tuple arity");
        for (std::size_t i = 1; i < tuple.size(); ++i)
            if (tuple[i] <= tuple[i - 1]) throw std::invalid_argument("Cochain: tuple not increasing");
        if (v.is_zero()) return;
        auto it = values.find(tuple);
        if (it == values.end()) {
            values.emplace(tuple, v);
        } else {
            it->second = it->second + v;
            if (it->second.is_zero()) values.erase(it);
        }
    }

    M value(const std::vector<int>& tuple) const {
        auto it = values.find(tuple);
        return it == values.end() ? ModuleOps<M>::zero(spec) : it->second;
    }

    /// Evaluates with one extra leading index, sorting it into the increasing
    /// rest and applying the alternating sign; zero on repeats.
    M value_with_first(int t, const std::vector<int>& rest) const {
        int pos = 0;
        for (int r : rest) {
            if (r == t) return ModuleOps<M>::zero(spec);
            if (r < t) ++pos;
        }
        std::vector<int> tuple = rest;
        tuple.insert(tuple.begin() + pos, t);
        M v = value(tuple);
        if (pos % 2 == 1) return Rational(-1) * v;
        return v;
    }

    bool is_zero() const { return values.empty(); }

    friend Cochain operator+(Cochain a, const Cochain& b) {
        if (a.degree != b.degree || !a.spec.same_shape(b.spec))
            throw std::invalid_argument("Cochain: shape mismatch");
        for (const auto& [t, v] : b.values) a.add_value(t, v);
        return a;
    }
    friend Cochain operator-(Cochain a, const Cochain& b) {
        if (a.degree != b.degree || !a.spec.same_shape(b.spec))
            throw std::invalid_argument("Cochain: shape mismatch");
        for (const auto& [t, v] : b.values) a.add_value(t, Rational(-1) * v);
        return a;
    }
    friend Cochain operator*(const Rational& c, const Cochain& x) {
        Cochain out(x.spec, x.degree);
        for (const auto& [t, v] : x.values) out.add_value(t, c * v);
        return out;
    }
    friend bool operator==(const Cochain& a, const Cochain& b) {
        return a.degree == b.degree && a.spec.same_shape(b.spec) && a.values == b.values;
    }
};

/// The coboundary: (dc)(X_0..X_u) = sum_i (-1)^i L_{X_i} c(..X_i-hat..)
/// + sum_{i<j} (-1)^{i+j} c([X_i, X_j], ..X_i-hat..X_j-hat..), the brackets
/// re-expanded in basis coordinates.
template <class M>
Cochain<M> ce_differential(const Cochain<M>& c, const SlContext& ctx) {
    Cochain<M> out(c.spec, c.degree + 1);
    const int n = ctx.dim();
    for (const auto& sigma : increasing_tuples(n, c.degree + 1)) {
        M acc = ModuleOps<M>::zero(c.spec);
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            std::vector<int> rest;
            rest.reserve(sigma.size() - 1);
            for (std::size_t s = 0; s < sigma.size(); ++s)
                if (s != i) rest.push_back(sigma[s]);
            M cv = c.value(rest);
            if (cv.is_zero()) continue;
            M lv = ModuleOps<M>::lie(ctx.fields[sigma[i]], cv);
            acc = (i % 2 == 0) ? acc + lv : acc - lv;
        }
        for (std::size_t i = 0; i < sigma.size(); ++i)
            for (std::size_t j = i + 1; j < sigma.size(); ++j) {
                const auto& coords = ctx.bracket_coords[sigma[i]][sigma[j]];
                if (coords.empty()) continue;
                std::vector<int> rest;
                rest.reserve(sigma.size() - 2);
                for (std::size_t s = 0; s < sigma.size(); ++s)
                    if (s != i && s != j) rest.push_back(sigma[s]);
                for (const auto& [t, coe] : coords) {
                    M cv = c.value_with_first(t, rest);
                    if (cv.is_zero()) continue;
                    Rational sign = ((i + j) % 2 == 0) ? coe : -coe;
                    acc = acc + sign * cv;
                }
            }
        if (!acc.is_zero()) out.values.emplace(sigma, std::move(acc));
    }
    return out;
}

/// Exact eigenvalue of the Euler-field action on a single module monomial,
/// computed by applying the module's Lie derivative.
template <class M>
int module_weight(const M& v) {
    auto mons = v.monomials();
    if (mons.size() != 1) throw std::invalid_argument("module_weight: not a monomial");
    M lv = ModuleOps<M>::lie(VectorField::euler(v.spec.m), v);
    auto lmons = lv.monomials();
    if (lmons.empty()) return 0;
    if (lmons.size() != 1 || !(lmons[0].first == mons[0].first))
        throw std::logic_error("module_weight: Euler action is not diagonal on this monomial");
    Rational lambda = lmons[0].second / mons[0].second;
    if (!lambda.is_integer()) throw std::logic_error("module_weight: non-integer eigenvalue");
    return (int)lambda.numerator().get_si();
}

// ---------------------------------------------------------------------------
// Weight blocks: the finite bases the cohomology computation runs on
// ---------------------------------------------------------------------------

struct BlockPair {
    std::vector<int> tuple;  // increasing sl-basis index tuple
    OpMonomial mon;

    friend bool operator<(const BlockPair& a, const BlockPair& b) {
        return std::tie(a.tuple, a.mon) < std::tie(b.tuple, b.mon);
    }
    friend bool operator==(const BlockPair& a, const BlockPair& b) {
        return a.tuple == b.tuple && a.mon == b.mon;
    }
};

struct WeightBlock {
    ModuleSpec spec;
    int u = 0;
    int weight = 0;
    std::vector<BlockPair> pairs;
    std::map<BlockPair, std::size_t> index;

    std::size_t size() const { return pairs.size(); }
    void build_index() {
        index.clear();
        for (std::size_t i = 0; i < pairs.size(); ++i) index.emplace(pairs[i], i);
    }
};

inline int tuple_weight(const SlContext& ctx, const std::vector<int>& tuple) {
    int w = 0;
    for (int t : tuple) w += ctx.weights[t];
    return w;
}

/// Every (u-tuple, module monomial) with module weight = tuple weight + w.
/// Complete: tuple weights lie in [-u, u] and the per-layer x-degree is pinned.
inline WeightBlock weight_block(const ModuleSpec& spec, int u, int w, const SlContext& ctx,
                                bool reversed = false) {
    if (u < 0) throw std::invalid_argument("weight_block: negative degree");
    WeightBlock block;
    block.spec = spec;
    block.u = u;
    block.weight = w;
    for (const auto& tuple : increasing_tuples(ctx.dim(), u)) {
        const int target = w + tuple_weight(ctx, tuple);
        for (auto& mon : enumerate_monomials(spec, target)) block.pairs.push_back({tuple, std::move(mon)});
    }
    if (reversed) std::reverse(block.pairs.begin(), block.pairs.end());
    block.build_index();
    return block;
}

inline WeightBlock weight_zero_basis(const ModuleSpec& spec, int u, const SlContext& ctx,
                                     bool reversed = false) {
    return weight_block(spec, u, 0, ctx, reversed);
}

/// Multiweight of e_t under the m embedded diagonal fields; refines the Euler
/// weight (which equals minus the coordinate sum).
inline std::vector<int> basis_multiweight(const SlContext& ctx, int t) {
    const int m = ctx.m;
    std::vector<int> w(m, 0);
    if (t < m) {
        w[t] = 1;  // translation e_t
    } else if (t < m + m * m) {
        int a = (t - m) / m, b = (t - m) % m;
        ++w[a];
        --w[b];  // matrix unit E^a_b
    } else {
        w[t - m - m * m] = -1;  // covector
    }
    return w;
}

inline std::vector<int> pair_multiweight(const ModuleSpec& spec, const SlContext& ctx, const BlockPair& pr) {
    std::vector<int> w = monomial_multiweight(spec, pr.mon);
    for (int t : pr.tuple) {
        auto bw = basis_multiweight(ctx, t);
        for (int i = 0; i < spec.m; ++i) w[i] -= bw[i];
    }
    return w;
}

namespace detail {

template <class M>
void emit_differential_column(const ModuleSpec& spec, const SlContext& ctx, const BlockPair& pr,
                              const std::function<void(const BlockPair&, const Rational&)>& emit) {
    const int n = ctx.dim();
    M v = ModuleOps<M>::make(spec, pr.mon, Rational(1));
    // first sum: insert an extra basis index b and act on the value
    for (int b = 0; b < n; ++b) {
        bool member = false;
        std::size_t pos = 0;
        for (int t : pr.tuple) {
            if (t == b) { member = true; break; }
            if (t < b) ++pos;
        }
        if (member) continue;
        std::vector<int> sigma = pr.tuple;
        sigma.insert(sigma.begin() + pos, b);
        M lv = ModuleOps<M>::lie(ctx.fields[b], v);
        const int sign = pos % 2 == 0 ? 1 : -1;
        for (const auto& [mon2, c2] : lv.monomials()) emit({sigma, mon2}, Rational(sign) * c2);
    }
    // second sum: replace tuple member t by a bracket pair (a, b) hitting it
    for (std::size_t r = 0; r < pr.tuple.size(); ++r) {
        const int t = pr.tuple[r];
        std::vector<int> rest;
        rest.reserve(pr.tuple.size() - 1);
        for (std::size_t s = 0; s < pr.tuple.size(); ++s)
            if (s != r) rest.push_back(pr.tuple[s]);
        for (const auto& [a, b, coe] : ctx.bracket_hits[t]) {
            bool clash = false;
            for (int x : rest)
                if (x == a || x == b) { clash = true; break; }
            if (clash) continue;
            std::vector<int> sigma = rest;
            sigma.insert(std::upper_bound(sigma.begin(), sigma.end(), a), a);
            sigma.insert(std::upper_bound(sigma.begin(), sigma.end(), b), b);
            std::size_t i = 0, j = 0;
            for (std::size_t s = 0; s < sigma.size(); ++s) {
                if (sigma[s] == a) i = s;
                if (sigma[s] == b) j = s;
            }
            const int sign = ((i + j + r) % 2 == 0) ? 1 : -1;
            emit({sigma, pr.mon}, Rational(sign) * coe);
        }
    }
}

}  // namespace detail

/// Matrix of the coboundary from one weight block to the next degree; entries
/// land inside the target block by weight preservation (checked).
template <class M>
SparseMatrix differential_matrix(const WeightBlock& dom, const WeightBlock& cod, const SlContext& ctx) {
    SparseMatrix::EntryMap entries;
    for (std::size_t col = 0; col < dom.pairs.size(); ++col) {
        detail::emit_differential_column<M>(dom.spec, ctx, dom.pairs[col],
                                            [&](const BlockPair& target, const Rational& c) {
                                                if (c.is_zero()) return;
                                                auto it = cod.index.find(target);
                                                if (it == cod.index.end())
                                                    throw std::logic_error(
                                                        "differential_matrix: image left the weight block");
                                                auto key = std::make_pair(it->second, col);
                                                auto e = entries.find(key);
                                                if (e == entries.end()) entries.emplace(key, c);
                                                else {
                                                    e->second += c;
                                                    if (e->second.is_zero()) entries.erase(e);
                                                }
                                            });
    }
    return SparseMatrix(cod.size(), dom.size(), std::move(entries));
}

/// The weight-zero coboundary matrix W0(u) -> W0(u+1) in the enumerated bases.
template <class M>
SparseMatrix differential_matrix(const ModuleSpec& spec, int u, const SlContext& ctx,
                                 bool reversed = false) {
    auto dom = weight_zero_basis(spec, u, ctx, reversed);
    auto cod = weight_zero_basis(spec, u + 1, ctx, reversed);
    return differential_matrix<M>(dom, cod, ctx);
}

namespace detail {

/// Joint eigenvalue classes of the diagonal torus; the coboundary preserves
/// them, so ranks may be summed class by class.
struct ClassifiedBlock {
    std::map<std::vector<int>, WeightBlock> classes;
};

inline ClassifiedBlock classify(const WeightBlock& block, const SlContext& ctx) {
    ClassifiedBlock out;
    for (const auto& pr : block.pairs) {
        auto cls = pair_multiweight(block.spec, ctx, pr);
        auto it = out.classes.find(cls);
        if (it == out.classes.end()) {
            WeightBlock wb;
            wb.spec = block.spec;
            wb.u = block.u;
            wb.weight = block.weight;
            it = out.classes.emplace(cls, std::move(wb)).first;
        }
        it->second.pairs.push_back(pr);
    }
    for (auto& [cls, wb] : out.classes) wb.build_index();
    return out;
}

template <class M>
std::size_t classified_rank(const ClassifiedBlock& dom, const ClassifiedBlock& cod, const SlContext& ctx) {
    std::size_t rank = 0;
    for (const auto& [cls, sub] : dom.classes) {
        auto it = cod.classes.find(cls);
        if (it == cod.classes.end()) {
            // no targets in this class: the map must vanish on it
            WeightBlock wb;
            wb.spec = sub.spec;
            wb.u = sub.u + 1;
            wb.weight = sub.weight;
            differential_matrix<M>(sub, wb, ctx);  // throws unless truly zero
            continue;
        }
        rank += differential_matrix<M>(sub, it->second, ctx).rank();
    }
    return rank;
}

}  // namespace detail

/// dim H^u on the weight-zero subcomplex: nullity of the degree-u coboundary
/// minus the rank of the degree-(u-1) one. Torus classes split both matrices
/// block diagonally, which only reorganizes the same computation.
template <class M>
std::size_t cohomology_dim(const ModuleSpec& spec, int u, const SlContext& ctx) {
    if (u < 0) throw std::invalid_argument("cohomology_dim: negative degree");
    auto b_cur = weight_zero_basis(spec, u, ctx);
    auto b_next = weight_zero_basis(spec, u + 1, ctx);
    auto cls_cur = detail::classify(b_cur, ctx);
    auto cls_next = detail::classify(b_next, ctx);
    std::size_t rank_cur = detail::classified_rank<M>(cls_cur, cls_next, ctx);
    std::size_t rank_prev = 0;
    if (u > 0) {
        auto b_prev = weight_zero_basis(spec, u - 1, ctx);
        auto cls_prev = detail::classify(b_prev, ctx);
        rank_prev = detail::classified_rank<M>(cls_prev, cls_cur, ctx);
    }
    return b_cur.size() - rank_cur - rank_prev;
}

// ---------------------------------------------------------------------------
// Coboundary solving
// ---------------------------------------------------------------------------

namespace detail {

template <class M>
std::map<int, std::map<BlockPair, Rational>> split_by_weight(const Cochain<M>& c, const SlContext& ctx) {
    std::map<int, std::map<BlockPair, Rational>> out;
    for (const auto& [tuple, v] : c.values) {
        const int tw = tuple_weight(ctx, tuple);
        for (const auto& [mon, coeff] : v.monomials()) {
            const int w = monomial_weight(c.spec, mon) - tw;
            out[w][BlockPair{tuple, mon}] += coeff;
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        auto& entries = it->second;
        for (auto e = entries.begin(); e != entries.end();)
            e = e->second.is_zero() ? entries.erase(e) : std::next(e);
        it = entries.empty() ? out.erase(it) : std::next(it);
    }
    return out;
}

}  // namespace detail

/// Witness b with db = c, searched weight component by weight component
/// (a witness, when one exists, splits the same way). Requires dc = 0.
template <class M>
std::optional<Cochain<M>> is_coboundary(const Cochain<M>& c, const SlContext& ctx) {
    if (c.degree < 1) throw std::invalid_argument("is_coboundary: needs degree >= 1");
    if (!ce_differential(c, ctx).is_zero()) throw std::invalid_argument("is_coboundary: input is not a cocycle");
    Cochain<M> witness(c.spec, c.degree - 1);
    for (const auto& [w, rhs_entries] : detail::split_by_weight(c, ctx)) {
        auto dom = weight_block(c.spec, c.degree - 1, w, ctx);
        auto cod = weight_block(c.spec, c.degree, w, ctx);
        auto mat = differential_matrix<M>(dom, cod, ctx);
        std::vector<Rational> rhs(cod.size(), Rational(0));
        for (const auto& [pr, coeff] : rhs_entries) {
            auto it = cod.index.find(pr);
            if (it == cod.index.end()) throw std::logic_error("is_coboundary: cocycle outside weight block");
            rhs[it->second] = coeff;
        }
        auto x = mat.solve(rhs);
        if (!x) return std::nullopt;
        for (std::size_t i = 0; i < dom.pairs.size(); ++i)
            if (!(*x)[i].is_zero())
                witness.add_value(dom.pairs[i].tuple,
                                  ModuleOps<M>::make(c.spec, dom.pairs[i].mon, (*x)[i]));
    }
    return witness;
}

template <class M>
struct ClassCoordinates {
    std::vector<Rational> lambda;
    Cochain<M> witness;
};

/// Solves c = sum_i lambda_i g_i + db. With `constant_witness_only`, b ranges
/// over x-degree-zero (translation invariant) monomials only.
template <class M>
std::optional<ClassCoordinates<M>> class_coordinates(const Cochain<M>& c, const std::vector<Cochain<M>>& gens,
                                                     const SlContext& ctx, bool constant_witness_only = false) {
    if (!ce_differential(c, ctx).is_zero())
        throw std::invalid_argument("class_coordinates: input is not a cocycle");
    for (const auto& g : gens) {
        if (g.degree != c.degree || !g.spec.same_shape(c.spec))
            throw std::invalid_argument("class_coordinates: generator shape mismatch");
        if (!ce_differential(g, ctx).is_zero())
            throw std::invalid_argument("class_coordinates: generator is not a cocycle");
    }

    std::set<int> weights;
    auto c_split = detail::split_by_weight(c, ctx);
    for (const auto& [w, entries] : c_split) weights.insert(w);
    std::vector<std::map<int, std::map<BlockPair, Rational>>> gen_splits;
    for (const auto& g : gens) {
        gen_splits.push_back(detail::split_by_weight(g, ctx));
        for (const auto& [w, entries] : gen_splits.back()) weights.insert(w);
    }

    // rows: all (w, target pair) over the involved weights; columns: gens then
    // witness monomials of each weight.
    std::vector<std::pair<int, std::size_t>> dom_offsets;  // (weight, column offset)
    std::map<int, WeightBlock> doms, cods;
    std::size_t nrows = 0, ncols = gens.size();
    std::map<int, std::size_t> row_offsets;
    for (int w : weights) {
        cods.emplace(w, weight_block(c.spec, c.degree, w, ctx));
        row_offsets[w] = nrows;
        nrows += cods.at(w).size();
        auto dom = weight_block(c.spec, c.degree - 1, w, ctx);
        if (constant_witness_only) {
            WeightBlock filtered;
            filtered.spec = dom.spec;
            filtered.u = dom.u;
            filtered.weight = dom.weight;
            for (const auto& pr : dom.pairs)
                if (total_degree(pr.mon.beta) == 0) filtered.pairs.push_back(pr);
            filtered.build_index();
            dom = std::move(filtered);
        }
        dom_offsets.emplace_back(w, ncols);
        ncols += dom.size();
        doms.emplace(w, std::move(dom));
    }

    SparseMatrix::EntryMap entries;
    auto put = [&](std::size_t r, std::size_t col, const Rational& v) {
        if (v.is_zero()) return;
        auto key = std::make_pair(r, col);
        auto it = entries.find(key);
        if (it == entries.end()) entries.emplace(key, v);
        else {
            it->second += v;
            if (it->second.is_zero()) entries.erase(it);
        }
    };

    for (std::size_t gi = 0; gi < gens.size(); ++gi)
        for (const auto& [w, gentries] : gen_splits[gi]) {
            const auto& cod = cods.at(w);
            for (const auto& [pr, coeff] : gentries) {
                auto it = cod.index.find(pr);
                if (it == cod.index.end()) throw std::logic_error("class_coordinates: generator outside block");
                put(row_offsets.at(w) + it->second, gi, coeff);
            }
        }
    for (const auto& [w, offset] : dom_offsets) {
        const auto& dom = doms.at(w);
        const auto& cod = cods.at(w);
        for (std::size_t col = 0; col < dom.pairs.size(); ++col)
            detail::emit_differential_column<M>(c.spec, ctx, dom.pairs[col],
                                                [&](const BlockPair& target, const Rational& v) {
                                                    auto it = cod.index.find(target);
                                                    if (it == cod.index.end())
                                                        throw std::logic_error(
                                                            "class_coordinates: image left the block");
                                                    put(row_offsets.at(w) + it->second, offset + col, v);
                                                });
    }

    std::vector<Rational> rhs(nrows, Rational(0));
    for (const auto& [w, centries] : c_split)
        for (const auto& [pr, coeff] : centries) {
            auto it = cods.at(w).index.find(pr);
            if (it == cods.at(w).index.end()) throw std::logic_error("class_coordinates: input outside block");
            rhs[row_offsets.at(w) + it->second] = coeff;
        }

    SparseMatrix sys(nrows, ncols, std::move(entries));
    auto x = sys.solve(rhs);
    if (!x) return std::nullopt;

    ClassCoordinates<M> out{std::vector<Rational>(x->begin(), x->begin() + gens.size()),
                            Cochain<M>(c.spec, c.degree - 1)};
    for (const auto& [w, offset] : dom_offsets) {
        const auto& dom = doms.at(w);
        for (std::size_t i = 0; i < dom.pairs.size(); ++i) {
            const Rational& v = (*x)[offset + i];
            if (!v.is_zero())
                out.witness.add_value(dom.pairs[i].tuple, ModuleOps<M>::make(c.spec, dom.pairs[i].mon, v));
        }
    }
    return out;
}

}  // namespace veccoh
