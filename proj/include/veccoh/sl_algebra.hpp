#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "veccoh/vector_field.hpp"

namespace veccoh {

/// Element of sl(m+1, R) in the graded decomposition R^m + gl(m, R) + R^m*:
/// h is the degree -1 part (translations), a the degree 0 part, alpha the
/// degree +1 part.
struct SlElement {
    std::vector<Rational> h;
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> alpha;

    explicit SlElement(int m)
        : h(m, Rational(0)), a(m, std::vector<Rational>(m, Rational(0))), alpha(m, Rational(0)) {}

    int dimension() const { return (int)h.size(); }

    bool is_zero() const {
        for (const auto& v : h) if (!v.is_zero()) return false;
        for (const auto& row : a) for (const auto& v : row) if (!v.is_zero()) return false;
        for (const auto& v : alpha) if (!v.is_zero()) return false;
        return true;
    }

    friend SlElement operator+(SlElement x, const SlElement& y) {
        const int m = x.dimension();
        for (int i = 0; i < m; ++i) {
            x.h[i] += y.h[i];
            x.alpha[i] += y.alpha[i];
            for (int j = 0; j < m; ++j) x.a[i][j] += y.a[i][j];
        }
        return x;
    }
    friend SlElement operator-(SlElement x, const SlElement& y) {
        const int m = x.dimension();
        for (int i = 0; i < m; ++i) {
            x.h[i] -= y.h[i];
            x.alpha[i] -= y.alpha[i];
            for (int j = 0; j < m; ++j) x.a[i][j] -= y.a[i][j];
        }
        return x;
    }
    friend bool operator==(const SlElement& x, const SlElement& y) {
        return x.h == y.h && x.a == y.a && x.alpha == y.alpha;
    }
};

/// Fixed basis order, stable across releases (reports reference these indices):
///   0 .. m-1          translations e_1 .. e_m          (weight -1)
///   m .. m+m^2-1      matrix units E^1_1, E^1_2, ..., E^m_m, row-major (weight 0)
///   m+m^2 .. m^2+2m-1 covectors e^1 .. e^m             (weight +1)
inline std::vector<SlElement> sl_basis(int m) {
    if (m < 2) throw std::invalid_argument("sl_basis: dimension must be at least 2");
    std::vector<SlElement> out;
    out.reserve(m * m + 2 * m);
    for (int i = 0; i < m; ++i) {
        SlElement e(m);
        e.h[i] = 1;
        out.push_back(e);
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            SlElement e(m);
            e.a[i][j] = 1;
            out.push_back(e);
        }
    for (int i = 0; i < m; ++i) {
        SlElement e(m);
        e.alpha[i] = 1;
        out.push_back(e);
    }
    return out;
}

inline int sl_dim(int m) { return m * m + 2 * m; }

/// Grading degree of a basis member: -1 translations, 0 gl(m), +1 covectors.
inline int sl_basis_weight(int m, int idx) {
    if (idx < 0 || idx >= sl_dim(m)) throw std::out_of_range("sl_basis_weight: index");
    if (idx < m) return -1;
    if (idx < m + m * m) return 0;
    return 1;
}

/// Weight of a pure basis member; throws on mixed elements.
inline int sl_weight(const SlElement& e) {
    const int m = e.dimension();
    bool has_h = false, has_a = false, has_al = false;
    for (const auto& v : e.h) has_h |= !v.is_zero();
    for (const auto& row : e.a) for (const auto& v : row) has_a |= !v.is_zero();
    for (const auto& v : e.alpha) has_al |= !v.is_zero();
    if (has_h + has_a + has_al != 1) throw std::invalid_argument("sl_weight: mixed element");
    if (has_h) return -1;
    if (has_a) return 0;
    (void)m;
    return 1;
}

/// The projective realization inside Vect(R^m):
/// h* = -h^i d_i, A* = -A^i_j x^j d_i, alpha* = alpha(x) x^i d_i.
inline VectorField sl_embed(const SlElement& e) {
    const int m = e.dimension();
    VectorField x(m);
    Poly alpha_x(m);
    for (int j = 0; j < m; ++j) alpha_x += e.alpha[j] * Poly::variable(m, j);
    for (int i = 0; i < m; ++i) {
        Poly comp(m);
        comp += (-e.h[i]) * Poly::constant(m, 1);
        for (int j = 0; j < m; ++j) comp += (-e.a[i][j]) * Poly::variable(m, j);
        comp += alpha_x * Poly::variable(m, i);
        x.set_component(i, comp);
    }
    return x;
}

/// Graded bracket: [A,A'] is the matrix commutator, [A,h] = Ah, [A,alpha] =
/// -alpha o A, [h,h'] = [alpha,alpha'] = 0 and [h,alpha] = alpha(h) Id + h (x) alpha.
inline SlElement sl_bracket(const SlElement& x, const SlElement& y) {
    const int m = x.dimension();
    if (y.dimension() != m) throw std::invalid_argument("sl_bracket: dimension mismatch");
    SlElement r(m);
    // degree -1 part: [A, h]
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) r.h[i] += x.a[i][j] * y.h[j] - y.a[i][j] * x.h[j];
    // degree 0 part: [A, A'] + [h, alpha]
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) r.a[i][j] += x.a[i][k] * y.a[k][j] - y.a[i][k] * x.a[k][j];
            r.a[i][j] += x.h[i] * y.alpha[j] - y.h[i] * x.alpha[j];
        }
    Rational xy(0), yx(0);
    for (int i = 0; i < m; ++i) {
        xy += y.alpha[i] * x.h[i];
        yx += x.alpha[i] * y.h[i];
    }
    for (int i = 0; i < m; ++i) r.a[i][i] += xy - yx;
    // degree +1 part: [A, alpha] = -alpha o A
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) r.alpha[j] += y.alpha[i] * (-x.a[i][j]) + x.alpha[i] * y.a[i][j];
    return r;
}

/// Coordinates of e in the sl_basis order.
inline std::vector<std::pair<int, Rational>> sl_coordinates(const SlElement& e) {
    const int m = e.dimension();
    std::vector<std::pair<int, Rational>> out;
    for (int i = 0; i < m; ++i)
        if (!e.h[i].is_zero()) out.emplace_back(i, e.h[i]);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (!e.a[i][j].is_zero()) out.emplace_back(m + i * m + j, e.a[i][j]);
    for (int i = 0; i < m; ++i)
        if (!e.alpha[i].is_zero()) out.emplace_back(m + m * m + i, e.alpha[i]);
    return out;
}

struct EmbeddingReport {
    bool pass = true;
    int checked_pairs = 0;
    std::string first_failure;
};

/// Exhaustive check that the realization is a Lie algebra homomorphism:
/// [e_i*, e_j*] = ([e_i, e_j])* over all unordered basis pairs.
inline EmbeddingReport verify_embedding(int m) {
    EmbeddingReport rep;
    const auto basis = sl_basis(m);
    std::vector<VectorField> fields;
    fields.reserve(basis.size());
    for (const auto& e : basis) fields.push_back(sl_embed(e));
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j) {
            ++rep.checked_pairs;
            VectorField lhs = lie_bracket(fields[i], fields[j]);
            VectorField rhs = sl_embed(sl_bracket(basis[i], basis[j]));
            if (!(lhs == rhs)) {
                if (rep.pass) {
                    std::ostringstream os;
                    os << "pair (" << i << ", " << j << "): [e_i*, e_j*] = " << lhs.str()
                       << " but ([e_i, e_j])* = " << rhs.str();
                    rep.first_failure = os.str();
                }
                rep.pass = false;
            }
        }
    return rep;
}

/// Exhaustive Jacobi identity check for the abstract bracket on basis triples.
inline std::optional<std::string> verify_jacobi(int m) {
    const auto basis = sl_basis(m);
    const int n = (int)basis.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                SlElement s = sl_bracket(sl_bracket(basis[i], basis[j]), basis[k]) +
                              sl_bracket(sl_bracket(basis[j], basis[k]), basis[i]) +
                              sl_bracket(sl_bracket(basis[k], basis[i]), basis[j]);
                if (!s.is_zero()) {
                    std::ostringstream os;
                    os << "jacobi fails on triple (" << i << ", " << j << ", " << k << ")";
                    return os.str();
                }
            }
    return std::nullopt;
}

/// Precomputed context for Chevalley-Eilenberg computations over the embedded
/// basis: fields, weights and structure constants in basis coordinates.
struct SlContext {
    int m;
    std::vector<SlElement> basis;
    std::vector<VectorField> fields;
    std::vector<int> weights;
    // bracket_coords[i][j]: coordinates of [e_i, e_j]; filled for i < j.
    std::vector<std::vector<std::vector<std::pair<int, Rational>>>> bracket_coords;
    // For each basis index t, the pairs (a, b, c) with a < b and
    // <[e_a, e_b], e_t-coordinate> = c nonzero.
    std::vector<std::vector<std::tuple<int, int, Rational>>> bracket_hits;

    explicit SlContext(int m_) : m(m_), basis(sl_basis(m_)) {
        const int n = (int)basis.size();
        fields.reserve(n);
        weights.reserve(n);
        for (int i = 0; i < n; ++i) {
            fields.push_back(sl_embed(basis[i]));
            weights.push_back(sl_basis_weight(m, i));
        }
        bracket_coords.assign(n, std::vector<std::vector<std::pair<int, Rational>>>(n));
        bracket_hits.assign(n, {});
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                bracket_coords[i][j] = sl_coordinates(sl_bracket(basis[i], basis[j]));
                for (const auto& [t, c] : bracket_coords[i][j]) bracket_hits[t].emplace_back(i, j, c);
            }
    }

    int dim() const { return (int)basis.size(); }
};

}  // namespace veccoh
