#pragma once

#include <cctype>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "veccoh/rational.hpp"

namespace veccoh {

/// Exponent multi-index of a monomial, one entry per variable.
using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

/// Multivariate polynomial over Q in m variables x1..xm. Terms map exponent
/// multi-indices to nonzero coefficients.
class Poly {
public:
    using TermMap = std::map<Exponents, Rational>;

    explicit Poly(int num_vars) : m_(num_vars) {
        if (num_vars < 1) throw std::invalid_argument("Poly: need at least one variable");
    }

    static Poly constant(int m, Rational c) {
        Poly p(m);
        p.add_term(Exponents(m, 0), std::move(c));
        return p;
    }

    static Poly variable(int m, int i) {
        Poly p(m);
        Exponents e(m, 0);
        e.at(i) = 1;
        p.add_term(e, 1);
        return p;
    }

    static Poly monomial(int m, Exponents e, Rational c) {
        Poly p(m);
        p.add_term(std::move(e), std::move(c));
        return p;
    }

    int num_vars() const { return m_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coeff(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const { return coeff(Exponents(m_, 0)); }

    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
        return d;  // -1 for the zero polynomial
    }

    void add_term(Exponents e, Rational c) {
        if ((int)e.size() != m_) throw std::invalid_argument("Poly: multi-index length mismatch");
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(std::move(e), std::move(c));
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        check_vars_(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_vars_(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const {
        Poly r(m_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_vars_(b);
        Poly r(a.m_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(a.m_);
                for (int i = 0; i < a.m_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(std::move(e), ca * cb);
            }
        return r;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend Poly operator*(const Rational& c, const Poly& p) {
        Poly r(p.m_);
        if (c.is_zero()) return r;
        for (const auto& [e, pc] : p.terms_) r.terms_.emplace(e, c * pc);
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.m_ == b.m_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Formal partial derivative along variable i (0-based axis).
    Poly partial(int i) const {
        if (i < 0 || i >= m_) throw std::out_of_range("partial: axis out of range");
        Poly r(m_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponents d = e;
            --d[i];
            r.add_term(std::move(d), Rational(e[i]) * c);
        }
        return r;
    }

    /// Iterated partials along a (multiset) list of axes.
    Poly partial_many(const std::vector<int>& axes) const {
        Poly r = *this;
        for (int a : axes) {
            if (r.is_zero()) break;
            r = r.partial(a);
        }
        return r;
    }

    Rational eval_at_zero() const { return constant_term(); }

    /// Monomials as "c * x1^a1 x2^a2", '+'-joined; "0" for the zero polynomial.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << c.str();
            bool any = false;
            std::ostringstream fs;
            for (int i = 0; i < m_; ++i) {
                if (e[i] == 0) continue;
                if (any) fs << ' ';
                any = true;
                fs << 'x' << (i + 1);
                if (e[i] != 1) fs << '^' << e[i];
            }
            if (any) os << " * " << fs.str();
        }
        return os.str();
    }

    /// Parses the syntax produced by str(); also accepts bare monomials like "x1^2 x2".
    static Poly parse(const std::string& text, int m);

private:
    void check_vars_(const Poly& o) const {
        if (m_ != o.m_) throw std::invalid_argument("Poly: mixed variable counts");
    }

    int m_;
    TermMap terms_;
};

namespace detail {

struct PolyLexer {
    std::string s;
    std::size_t pos = 0;

    void skip_ws() { while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos; }
    bool eof() { skip_ws(); return pos >= s.size(); }
    char peek() { skip_ws(); return pos < s.size() ? s[pos] : '\0'; }
    bool consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    std::string number() {
        skip_ws();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        while (pos < s.size() && (std::isdigit((unsigned char)s[pos]) || s[pos] == '/')) ++pos;
        if (pos == start) throw std::invalid_argument("parse: expected number");
        return s.substr(start, pos - start);
    }
    int index_after(const std::string& prefix) {
        skip_ws();
        if (s.compare(pos, prefix.size(), prefix) != 0)
            throw std::invalid_argument("parse: expected '" + prefix + "'");
        pos += prefix.size();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (pos == start) throw std::invalid_argument("parse: expected index");
        return std::stoi(s.substr(start, pos - start));
    }
    bool starts_with(const std::string& p) {
        skip_ws();
        return s.compare(pos, p.size(), p) == 0;
    }
};

inline Poly parse_poly_term(PolyLexer& lx, int m) {
    Rational coeff(1);
    bool saw_coeff = false;
    if (lx.peek() == '-' || lx.peek() == '+' || std::isdigit((unsigned char)lx.peek())) {
        coeff = Rational::parse(lx.number());
        saw_coeff = true;
    }
    Exponents e(m, 0);
    bool saw_var = false;
    if (!saw_coeff || lx.consume('*') || lx.starts_with("x")) {
        while (lx.starts_with("x")) {
            int idx = lx.index_after("x");
            if (idx < 1 || idx > m) throw std::invalid_argument("parse: variable index out of range");
            int exp = 1;
            if (lx.consume('^')) exp = std::stoi(lx.number());
            e[idx - 1] += exp;
            saw_var = true;
        }
    }
    if (!saw_coeff && !saw_var) throw std::invalid_argument("parse: empty term");
    return Poly::monomial(m, e, coeff);
}

}  // namespace detail

inline Poly Poly::parse(const std::string& text, int m) {
    detail::PolyLexer lx{text};
    Poly r(m);
    if (lx.eof()) throw std::invalid_argument("parse: empty polynomial");
    r += detail::parse_poly_term(lx, m);
    while (!lx.eof()) {
        if (!lx.consume('+')) throw std::invalid_argument("parse: expected '+'");
        r += detail::parse_poly_term(lx, m);
    }
    return r;
}

}  // namespace veccoh
