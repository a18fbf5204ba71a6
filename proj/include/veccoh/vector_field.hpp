#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "veccoh/poly.hpp"

namespace veccoh {

class PolyMatrix;

/// Polynomial vector field X = X^i d_i on R^m.
class VectorField {
public:
    explicit VectorField(int m) : m_(m), comps_(m, Poly(m)) {}
    explicit VectorField(std::vector<Poly> comps) : m_((int)comps.size()), comps_(std::move(comps)) {
        for (const auto& p : comps_)
            if (p.num_vars() != m_) throw std::invalid_argument("VectorField: component variable count");
    }

    /// The coordinate field d_i.
    static VectorField coordinate(int m, int i) {
        VectorField x(m);
        x.comps_.at(i) = Poly::constant(m, 1);
        return x;
    }

    /// The Euler field x^i d_i, the grading element of the projective embedding.
    static VectorField euler(int m) {
        VectorField x(m);
        for (int i = 0; i < m; ++i) x.comps_[i] = Poly::variable(m, i);
        return x;
    }

    int dimension() const { return m_; }
    const Poly& component(int i) const { return comps_.at(i); }
    void set_component(int i, Poly p) {
        if (p.num_vars() != m_) throw std::invalid_argument("VectorField: component variable count");
        comps_.at(i) = std::move(p);
    }
    bool is_zero() const {
        for (const auto& p : comps_) if (!p.is_zero()) return false;
        return true;
    }

    /// Directional derivative X.f.
    Poly apply(const Poly& f) const {
        Poly r(m_);
        for (int i = 0; i < m_; ++i)
            if (!comps_[i].is_zero()) r += comps_[i] * f.partial(i);
        return r;
    }

    friend VectorField operator+(const VectorField& a, const VectorField& b) {
        a.check_(b);
        VectorField r(a.m_);
        for (int i = 0; i < a.m_; ++i) r.comps_[i] = a.comps_[i] + b.comps_[i];
        return r;
    }
    friend VectorField operator-(const VectorField& a, const VectorField& b) {
        a.check_(b);
        VectorField r(a.m_);
        for (int i = 0; i < a.m_; ++i) r.comps_[i] = a.comps_[i] - b.comps_[i];
        return r;
    }
    friend VectorField operator*(const Rational& c, const VectorField& x) {
        VectorField r(x.m_);
        for (int i = 0; i < x.m_; ++i) r.comps_[i] = c * x.comps_[i];
        return r;
    }
    friend bool operator==(const VectorField& a, const VectorField& b) {
        return a.m_ == b.m_ && a.comps_ == b.comps_;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (int i = 0; i < m_; ++i) {
            if (comps_[i].is_zero()) continue;
            if (!first) os << " + ";
            first = false;
            os << '(' << comps_[i].str() << ") d" << (i + 1);
        }
        return first ? "0" : os.str();
    }

    /// Parses "(P1) d1 + ... + (Pm) dm"; components may also be bare monomials.
    static VectorField parse(const std::string& text, int m);

private:
    void check_(const VectorField& o) const {
        if (m_ != o.m_) throw std::invalid_argument("VectorField: dimension mismatch");
    }

    int m_;
    std::vector<Poly> comps_;
};

/// Square m x m matrix of polynomials; carries Jacobians DX.
class PolyMatrix {
public:
    explicit PolyMatrix(int m) : m_(m), entries_(m, std::vector<Poly>(m, Poly(m))) {}

    static PolyMatrix from_rational(int m, const std::vector<std::vector<Rational>>& a) {
        PolyMatrix r(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) r.entries_[i][j] = Poly::constant(m, a[i][j]);
        return r;
    }

    int dimension() const { return m_; }
    const Poly& at(int i, int j) const { return entries_.at(i).at(j); }
    void set(int i, int j, Poly p) { entries_.at(i).at(j) = std::move(p); }

    Poly trace() const {
        Poly t(m_);
        for (int i = 0; i < m_; ++i) t += entries_[i][i];
        return t;
    }

    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
        return a.m_ == b.m_ && a.entries_ == b.entries_;
    }

private:
    int m_;
    std::vector<std::vector<Poly>> entries_;
};

/// Jacobian matrix DX with (DX)^i_j = d_j X^i.
inline PolyMatrix jacobian(const VectorField& x) {
    const int m = x.dimension();
    PolyMatrix j(m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) j.set(i, k, x.component(i).partial(k));
    return j;
}

/// tr DX, the divergence of X.
inline Poly trace_div(const VectorField& x) {
    Poly t(x.dimension());
    for (int i = 0; i < x.dimension(); ++i) t += x.component(i).partial(i);
    return t;
}

/// Commutator [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i.
inline VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    if (x.dimension() != y.dimension()) throw std::invalid_argument("lie_bracket: dimension mismatch");
    const int m = x.dimension();
    VectorField r(m);
    for (int i = 0; i < m; ++i) r.set_component(i, x.apply(y.component(i)) - y.apply(x.component(i)));
    return r;
}

inline VectorField VectorField::parse(const std::string& text, int m) {
    VectorField r(m);
    detail::PolyLexer lx{text};
    if (lx.eof()) throw std::invalid_argument("parse: empty vector field");
    if (text.find('d') == std::string::npos && lx.peek() == '0') return r;
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
        } else if (lx.starts_with("d")) {
            p = Poly::constant(m, 1);
        } else {
            p = detail::parse_poly_term(lx, m);
        }
        int idx = lx.index_after("d");
        if (idx < 1 || idx > m) throw std::invalid_argument("parse: field index out of range");
        r.set_component(idx - 1, r.component(idx - 1) + p);
    }
    return r;
}

}  // namespace veccoh
