#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "veccoh/vector_field.hpp"

namespace veccoh {

/// Strictly increasing tuple of 0-based axis indices; the basis labels of
/// wedge products.
using AxisTuple = std::vector<int>;

/// Sorts a tuple of distinct entries, returning the permutation sign, or
/// nullopt when an index repeats (wedge collapses to zero).
inline std::optional<std::pair<AxisTuple, int>> sort_with_sign(AxisTuple t) {
    int sign = 1;
    for (std::size_t i = 1; i < t.size(); ++i)
        for (std::size_t j = i; j > 0 && t[j] <= t[j - 1]; --j) {
            if (t[j] == t[j - 1]) return std::nullopt;
            std::swap(t[j], t[j - 1]);
            sign = -sign;
        }
    return std::make_pair(std::move(t), sign);
}

/// Sign of merging two disjoint increasing tuples into one increasing tuple
/// (the shuffle sign of a^b), nullopt if they intersect.
inline std::optional<std::pair<AxisTuple, int>> merge_with_sign(const AxisTuple& a, const AxisTuple& b) {
    AxisTuple t = a;
    t.insert(t.end(), b.begin(), b.end());
    return sort_with_sign(std::move(t));
}

inline std::vector<AxisTuple> increasing_tuples(int n, int p) {
    std::vector<AxisTuple> out;
    if (p < 0 || p > n) return out;
    AxisTuple t(p);
    for (int i = 0; i < p; ++i) t[i] = i;
    while (true) {
        out.push_back(t);
        int i = p - 1;
        while (i >= 0 && t[i] == n - p + i) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < p; ++j) t[j] = t[j - 1] + 1;
    }
    if (p == 0) out.assign(1, AxisTuple{});
    return out;
}

/// Nondecreasing tuples (multisets) of given length over n axes; the symmetric
/// derivative and symbol indices.
inline std::vector<AxisTuple> nondecreasing_tuples(int n, int r) {
    std::vector<AxisTuple> out;
    AxisTuple t(r, 0);
    if (r == 0) { out.push_back(t); return out; }
    while (true) {
        out.push_back(t);
        int i = r - 1;
        while (i >= 0 && t[i] == n - 1) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < r; ++j) t[j] = t[i];
    }
    return out;
}

namespace detail {

/// Shared storage of skewsymmetric component maps: increasing tuple -> Poly.
struct SkewComponents {
    int m;
    int degree;
    std::map<AxisTuple, Poly> comps;

    SkewComponents(int m_, int degree_) : m(m_), degree(degree_) {
        if (degree < 0 || degree > m) throw std::invalid_argument("skew field: degree out of range");
    }

    void add(const AxisTuple& t, const Poly& p) {
        if ((int)t.size() != degree) throw std::invalid_argument("skew field: tuple length");
        if (p.is_zero()) return;
        auto it = comps.find(t);
        if (it == comps.end()) {
            comps.emplace(t, p);
        } else {
            it->second += p;
            if (it->second.is_zero()) comps.erase(it);
        }
    }

    Poly at(const AxisTuple& t) const {
        auto it = comps.find(t);
        return it == comps.end() ? Poly(m) : it->second;
    }

    bool is_zero() const { return comps.empty(); }

    friend bool operator==(const SkewComponents& a, const SkewComponents& b) {
        return a.m == b.m && a.degree == b.degree && a.comps == b.comps;
    }
};

inline std::string skew_str(const SkewComponents& s, const std::string& basis_prefix) {
    if (s.comps.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [t, p] : s.comps) {
        if (!first) os << " + ";
        first = false;
        os << '(' << p.str() << ')';
        if (!t.empty()) {
            os << " * ";
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (i) os << '^';
                os << basis_prefix << (t[i] + 1);
            }
        }
    }
    return os.str();
}

}  // namespace detail

/// Skewsymmetric contravariant tensor field of degree p with polynomial
/// coefficients: sum of P * d_{i1}^...^d_{ip}.
class PolyMultiVector {
public:
    PolyMultiVector(int m, int p) : s_(m, p) {}

    int dimension() const { return s_.m; }
    int degree() const { return s_.degree; }
    const std::map<AxisTuple, Poly>& components() const { return s_.comps; }
    Poly component(const AxisTuple& t) const { return s_.at(t); }
    void add_component(const AxisTuple& t, const Poly& p) { s_.add(t, p); }
    bool is_zero() const { return s_.is_zero(); }

    friend PolyMultiVector operator+(PolyMultiVector a, const PolyMultiVector& b) {
        a.check_(b);
        for (const auto& [t, p] : b.s_.comps) a.s_.add(t, p);
        return a;
    }
    friend PolyMultiVector operator-(PolyMultiVector a, const PolyMultiVector& b) {
        a.check_(b);
        for (const auto& [t, p] : b.s_.comps) a.s_.add(t, -p);
        return a;
    }
    friend PolyMultiVector operator*(const Rational& c, const PolyMultiVector& v) {
        PolyMultiVector r(v.dimension(), v.degree());
        for (const auto& [t, p] : v.s_.comps) r.s_.add(t, c * p);
        return r;
    }
    friend bool operator==(const PolyMultiVector& a, const PolyMultiVector& b) { return a.s_ == b.s_; }

    std::string str() const { return detail::skew_str(s_, "d"); }

private:
    void check_(const PolyMultiVector& o) const {
        if (s_.m != o.s_.m || s_.degree != o.s_.degree)
            throw std::invalid_argument("PolyMultiVector: shape mismatch");
    }
    detail::SkewComponents s_;
};

/// Differential form of degree p with polynomial coefficients:
/// sum of P * dx_{i1}^...^dx_{ip}.
class PolyForm {
public:
    PolyForm(int m, int p) : s_(m, p) {}

    int dimension() const { return s_.m; }
    int degree() const { return s_.degree; }
    const std::map<AxisTuple, Poly>& components() const { return s_.comps; }
    Poly component(const AxisTuple& t) const { return s_.at(t); }
    void add_component(const AxisTuple& t, const Poly& p) { s_.add(t, p); }
    bool is_zero() const { return s_.is_zero(); }

    friend PolyForm operator+(PolyForm a, const PolyForm& b) {
        a.check_(b);
        for (const auto& [t, p] : b.s_.comps) a.s_.add(t, p);
        return a;
    }
    friend PolyForm operator-(PolyForm a, const PolyForm& b) {
        a.check_(b);
        for (const auto& [t, p] : b.s_.comps) a.s_.add(t, -p);
        return a;
    }
    friend PolyForm operator*(const Rational& c, const PolyForm& f) {
        PolyForm r(f.dimension(), f.degree());
        for (const auto& [t, p] : f.s_.comps) r.s_.add(t, c * p);
        return r;
    }
    friend bool operator==(const PolyForm& a, const PolyForm& b) { return a.s_ == b.s_; }

    std::string str() const { return detail::skew_str(s_, "dx"); }

private:
    void check_(const PolyForm& o) const {
        if (s_.m != o.s_.m || s_.degree != o.s_.degree)
            throw std::invalid_argument("PolyForm: shape mismatch");
    }
    detail::SkewComponents s_;
};

/// Constant covector (element of R^m*).
struct Covector {
    std::vector<Rational> comps;

    explicit Covector(int m) : comps(m, Rational(0)) {}
    explicit Covector(std::vector<Rational> c) : comps(std::move(c)) {}

    static Covector basis(int m, int i) {
        Covector a(m);
        a.comps.at(i) = 1;
        return a;
    }

    int dimension() const { return (int)comps.size(); }

    /// alpha(X^i components) as a polynomial: alpha_i X^i.
    Poly pair(const VectorField& x) const {
        Poly r(x.dimension());
        for (int i = 0; i < x.dimension(); ++i) r += comps[i] * x.component(i);
        return r;
    }

    PolyForm as_form(int m) const {
        PolyForm f(m, 1);
        for (int i = 0; i < m; ++i) f.add_component({i}, Poly::constant(m, comps[i]));
        return f;
    }
};

/// Action of a matrix-valued polynomial A on a basis wedge tuple, extended as
/// a derivation over the slots. Primal: slotwise e_i -> A e_i, so e_{i} picks
/// up coefficient A^j_i on e_j. Dual (forms): slotwise e^i -> -e^i o A, so e^i
/// picks up coefficient -A^i_j on e^j. Returns (tuple, coefficient) terms.
inline std::vector<std::pair<AxisTuple, Poly>> gl_tuple_action(const PolyMatrix& a, const AxisTuple& tuple,
                                                               bool dual) {
    const int m = a.dimension();
    std::vector<std::pair<AxisTuple, Poly>> out;
    for (std::size_t s = 0; s < tuple.size(); ++s) {
        for (int j = 0; j < m; ++j) {
            const Poly& entry = dual ? a.at(tuple[s], j) : a.at(j, tuple[s]);
            if (entry.is_zero()) continue;
            AxisTuple t = tuple;
            t[s] = j;
            auto sorted = sort_with_sign(std::move(t));
            if (!sorted) continue;
            Poly coeff = dual ? -entry : entry;
            if (sorted->second < 0) coeff = -coeff;
            out.emplace_back(std::move(sorted->first), std::move(coeff));
        }
    }
    return out;
}

/// L_X T = X.T - rho(DX) T with rho the canonical gl(m) action on Lambda^p R^m;
/// for p = 1 this is the bracket [X, T].
inline PolyMultiVector lie_derivative(const VectorField& x, const PolyMultiVector& t) {
    if (x.dimension() != t.dimension()) throw std::invalid_argument("lie_derivative: dimension mismatch");
    PolyMultiVector r(t.dimension(), t.degree());
    const PolyMatrix dx = jacobian(x);
    for (const auto& [tup, p] : t.components()) {
        r.add_component(tup, x.apply(p));
        for (const auto& [tup2, c] : gl_tuple_action(dx, tup, /*dual=*/false))
            r.add_component(tup2, -(c * p));
    }
    return r;
}

/// L_X w = X.w - rho*(DX) w with rho* the dual action on Lambda^p R^m*.
inline PolyForm lie_derivative(const VectorField& x, const PolyForm& w) {
    if (x.dimension() != w.dimension()) throw std::invalid_argument("lie_derivative: dimension mismatch");
    PolyForm r(w.dimension(), w.degree());
    const PolyMatrix dx = jacobian(x);
    for (const auto& [tup, p] : w.components()) {
        r.add_component(tup, x.apply(p));
        for (const auto& [tup2, c] : gl_tuple_action(dx, tup, /*dual=*/true))
            r.add_component(tup2, -(c * p));
    }
    return r;
}

inline Poly lie_derivative(const VectorField& x, const Poly& f) { return x.apply(f); }

/// Interior product by a degree-1 form with polynomial coefficients:
/// i_a(d_{i1}^...^d_{ip}) = sum_s (-1)^{s-1} a_{i_s} d_{i1}^...(omit s)...^d_{ip}.
inline PolyMultiVector interior_product(const PolyForm& alpha, const PolyMultiVector& t) {
    if (alpha.degree() != 1) throw std::invalid_argument("interior_product: contraction needs a 1-form");
    if (t.degree() < 1) throw std::invalid_argument("interior_product: degree must be positive");
    PolyMultiVector r(t.dimension(), t.degree() - 1);
    for (const auto& [tup, p] : t.components()) {
        for (std::size_t s = 0; s < tup.size(); ++s) {
            Poly a = alpha.component({tup[s]});
            if (a.is_zero()) continue;
            AxisTuple rest;
            rest.reserve(tup.size() - 1);
            for (std::size_t i = 0; i < tup.size(); ++i)
                if (i != s) rest.push_back(tup[i]);
            Poly c = a * p;
            if (s % 2 == 1) c = -c;
            r.add_component(rest, c);
        }
    }
    return r;
}

inline PolyMultiVector interior_product(const Covector& alpha, const PolyMultiVector& t) {
    return interior_product(alpha.as_form(t.dimension()), t);
}

/// Exterior derivative dw = sum_j dx^j ^ d_j w.
inline PolyForm exterior_derivative(const PolyForm& w) {
    const int m = w.dimension();
    if (w.degree() >= m) return PolyForm(m, std::min(w.degree() + 1, m));
    PolyForm r(m, w.degree() + 1);
    for (const auto& [tup, p] : w.components()) {
        for (int j = 0; j < m; ++j) {
            Poly dp = p.partial(j);
            if (dp.is_zero()) continue;
            auto merged = merge_with_sign({j}, tup);
            if (!merged) continue;
            if (merged->second < 0) dp = -dp;
            r.add_component(merged->first, dp);
        }
    }
    return r;
}

/// d f as a degree-1 form.
inline PolyForm exterior_derivative(const Poly& f) {
    const int m = f.num_vars();
    PolyForm r(m, 1);
    for (int j = 0; j < m; ++j) r.add_component({j}, f.partial(j));
    return r;
}

/// d tr(DX), the differential of the divergence of X.
inline PolyForm dtr(const VectorField& x) { return exterior_derivative(trace_div(x)); }

inline PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    if (a.dimension() != b.dimension()) throw std::invalid_argument("wedge: dimension mismatch");
    if (a.degree() + b.degree() > a.dimension()) throw std::invalid_argument("wedge: degree overflow");
    PolyForm r(a.dimension(), a.degree() + b.degree());
    for (const auto& [ta, pa] : a.components())
        for (const auto& [tb, pb] : b.components()) {
            auto merged = merge_with_sign(ta, tb);
            if (!merged) continue;
            Poly c = pa * pb;
            if (merged->second < 0) c = -c;
            r.add_component(merged->first, c);
        }
    return r;
}

inline PolyForm basis_form(int m, const AxisTuple& t) {
    PolyForm f(m, (int)t.size());
    f.add_component(t, Poly::constant(m, 1));
    return f;
}

inline PolyMultiVector basis_multivector(int m, const AxisTuple& t) {
    PolyMultiVector v(m, (int)t.size());
    v.add_component(t, Poly::constant(m, 1));
    return v;
}

/// Parses "(P) * d1^d2 + ..." for multivectors (prefix "d") or forms ("dx").
namespace detail {
inline SkewComponents parse_skew(const std::string& text, int m, int degree, const std::string& prefix) {
    SkewComponents s(m, degree);
    PolyLexer lx{text};
    if (lx.eof()) throw std::invalid_argument("parse: empty field");
    if (lx.peek() == '0' && text.find(prefix) == std::string::npos) return s;
    bool first = true;
    while (!lx.eof()) {
        if (!first && !lx.consume('+')) throw std::invalid_argument("parse: expected '+'");
        first = false;
        Poly p(m);
        if (lx.consume('(')) {
            std::size_t depth = 1, start = lx.pos;
            while (lx.pos < lx.s.size() && depth > 0) {
                if (lx.s[lx.pos] == '(') ++depth;
                if (lx.s[lx.pos] == ')') --depth;
                ++lx.pos;
            }
            if (depth != 0) throw std::invalid_argument("parse: unbalanced parens");
            p = Poly::parse(lx.s.substr(start, lx.pos - 1 - start), m);
            lx.consume('*');
        } else if (lx.starts_with(prefix)) {
            p = Poly::constant(m, 1);
        } else {
            p = parse_poly_term(lx, m);
            lx.consume('*');
        }
        AxisTuple t;
        while (lx.starts_with(prefix)) {
            int idx = lx.index_after(prefix);
            if (idx < 1 || idx > m) throw std::invalid_argument("parse: basis index out of range");
            t.push_back(idx - 1);
            if (!lx.consume('^')) break;
        }
        auto sorted = sort_with_sign(std::move(t));
        if (!sorted) continue;
        if (sorted->second < 0) p = -p;
        s.add(sorted->first, p);
    }
    return s;
}
}  // namespace detail

inline PolyForm parse_form(const std::string& text, int m, int degree) {
    auto s = detail::parse_skew(text, m, degree, "dx");
    PolyForm f(m, degree);
    for (const auto& [t, p] : s.comps) f.add_component(t, p);
    return f;
}

inline PolyMultiVector parse_multivector(const std::string& text, int m, int degree) {
    auto s = detail::parse_skew(text, m, degree, "d");
    PolyMultiVector v(m, degree);
    for (const auto& [t, p] : s.comps) v.add_component(t, p);
    return v;
}

}  // namespace veccoh
