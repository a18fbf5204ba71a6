#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "veccoh/rational.hpp"

namespace veccoh {

/// Immutable sparse matrix over Q. Entries are stored nonzero only;
/// elimination always works on an internal copy.
class SparseMatrix {
public:
    using EntryMap = std::map<std::pair<std::size_t, std::size_t>, Rational>;

    SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    SparseMatrix(std::size_t rows, std::size_t cols, EntryMap entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        for (auto it = entries_.begin(); it != entries_.end();) {
            check_bounds_(it->first.first, it->first.second);
            it = it->second.is_zero() ? entries_.erase(it) : std::next(it);
        }
    }

    static SparseMatrix from_rows(const std::vector<std::vector<Rational>>& rows) {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        EntryMap m;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) throw std::invalid_argument("ragged row list");
            for (std::size_t j = 0; j < cols; ++j)
                if (!rows[i][j].is_zero()) m[{i, j}] = rows[i][j];
        }
        return SparseMatrix(rows.size(), cols, std::move(m));
    }

    static SparseMatrix identity(std::size_t n) {
        EntryMap m;
        for (std::size_t i = 0; i < n; ++i) m[{i, i}] = 1;
        return SparseMatrix(n, n, std::move(m));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return entries_.size(); }
    const EntryMap& entries() const { return entries_; }

    Rational at(std::size_t r, std::size_t c) const {
        check_bounds_(r, c);
        auto it = entries_.find({r, c});
        return it == entries_.end() ? Rational(0) : it->second;
    }

    SparseMatrix transposed() const {
        EntryMap m;
        for (const auto& [rc, v] : entries_) m[{rc.second, rc.first}] = v;
        return SparseMatrix(cols_, rows_, std::move(m));
    }

    std::size_t rank() const {
        Elimination e(*this, nullptr);
        return e.run();
    }

    std::size_t nullspace_dim() const { return cols_ - rank(); }

    /// Some exact solution of Mx = b, or nullopt when inconsistent.
    std::optional<std::vector<Rational>> solve(const std::vector<Rational>& b) const {
        if (b.size() != rows_) throw std::invalid_argument("solve: rhs length != rows");
        Elimination e(*this, &b);
        e.run();
        return e.extract_solution(cols_);
    }

    /// Dump format: "rows cols nnz" then "row col num/den" lines, sorted by (row, col).
    void dump(std::ostream& os) const {
        os << rows_ << ' ' << cols_ << ' ' << entries_.size() << '\n';
        for (const auto& [rc, v] : entries_)
            os << rc.first << ' ' << rc.second << ' ' << v.dump_str() << '\n';
    }

    static SparseMatrix load(std::istream& is) {
        std::size_t rows = 0, cols = 0, nnz = 0;
        if (!(is >> rows >> cols >> nnz)) throw std::invalid_argument("matrix load: bad header");
        EntryMap m;
        for (std::size_t i = 0; i < nnz; ++i) {
            std::size_t r = 0, c = 0;
            std::string val;
            if (!(is >> r >> c >> val)) throw std::invalid_argument("matrix load: bad entry");
            m[{r, c}] = Rational::parse(val);
        }
        return SparseMatrix(rows, cols, std::move(m));
    }

private:
    void check_bounds_(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseMatrix index out of range");
    }

    // Gaussian elimination over Q, pivot chosen in the sparsest active row, within
    // it the entry whose column has the fewest active nonzeros; ties break toward
    // the lowest index, so runs are reproducible.
    class Elimination {
    public:
        Elimination(const SparseMatrix& m, const std::vector<Rational>* rhs)
            : ncols_(m.cols_), row_data_(m.rows_), rhs_(m.rows_), has_rhs_(rhs != nullptr) {
            for (const auto& [rc, v] : m.entries_) row_data_[rc.first].emplace_back(rc.second, v);
            if (rhs) for (std::size_t i = 0; i < rhs->size(); ++i) rhs_[i] = (*rhs)[i];
            col_count_.assign(ncols_, 0);
            for (const auto& row : row_data_)
                for (const auto& [c, v] : row) ++col_count_[c];
            active_.assign(row_data_.size(), true);
        }

        std::size_t run() {
            const std::size_t npiv = std::min(row_data_.size(), ncols_);
            while (pivots_.size() < npiv) {
                auto piv = pick_pivot_();
                if (!piv) break;
                eliminate_(piv->first, piv->second);
            }
            return pivots_.size();
        }

        std::optional<std::vector<Rational>> extract_solution(std::size_t ncols) {
            if (!has_rhs_) return std::nullopt;
            for (std::size_t i = 0; i < row_data_.size(); ++i)
                if (active_[i] && row_data_[i].empty() && !rhs_[i].is_zero())
                    return std::nullopt;  // 0 = nonzero: inconsistent
            std::vector<Rational> x(ncols, Rational(0));
            // Pivot rows were fully reduced against each other, so each yields
            // its variable directly; free variables stay 0.
            for (const auto& [r, c] : pivots_) {
                Rational diag(0);
                for (const auto& [cc, v] : row_data_[r])
                    if (cc == c) { diag = v; break; }
                x[c] = rhs_[r] / diag;
            }
            return x;
        }

    private:
        using Row = std::vector<std::pair<std::size_t, Rational>>;  // sorted by column

        std::optional<std::pair<std::size_t, std::size_t>> pick_pivot_() {
            std::size_t best_row = row_data_.size();
            std::size_t best_nnz = std::numeric_limits<std::size_t>::max();
            for (std::size_t i = 0; i < row_data_.size(); ++i) {
                if (!active_[i] || row_data_[i].empty()) continue;
                if (row_data_[i].size() < best_nnz) { best_nnz = row_data_[i].size(); best_row = i; }
            }
            if (best_row == row_data_.size()) return std::nullopt;
            std::size_t best_col = ncols_;
            std::size_t best_colcount = std::numeric_limits<std::size_t>::max();
            for (const auto& [c, v] : row_data_[best_row])
                if (col_count_[c] < best_colcount) { best_colcount = col_count_[c]; best_col = c; }
            return std::make_pair(best_row, best_col);
        }

        void eliminate_(std::size_t pr, std::size_t pc) {
            Rational pivot(0);
            for (const auto& [c, v] : row_data_[pr])
                if (c == pc) { pivot = v; break; }
            for (std::size_t i = 0; i < row_data_.size(); ++i) {
                if (i == pr || row_data_[i].empty()) continue;
                if (!active_[i] && !has_rhs_) continue;  // ranks need no back-substitution
                Rational vi(0);
                bool found = false;
                for (const auto& [c, v] : row_data_[i])
                    if (c == pc) { vi = v; found = true; break; }
                if (!found) continue;
                Rational factor = vi / pivot;
                axpy_(i, pr, factor);
                if (has_rhs_) rhs_[i] -= factor * rhs_[pr];
            }
            active_[pr] = false;
            for (const auto& [c, v] : row_data_[pr]) --col_count_[c];
            pivots_.emplace_back(pr, pc);
        }

        // row[i] -= factor * row[src]
        void axpy_(std::size_t i, std::size_t src, const Rational& factor) {
            Row out;
            out.reserve(row_data_[i].size() + row_data_[src].size());
            auto a = row_data_[i].begin(), ae = row_data_[i].end();
            auto b = row_data_[src].begin(), be = row_data_[src].end();
            while (a != ae || b != be) {
                if (b == be || (a != ae && a->first < b->first)) {
                    out.push_back(*a++);
                } else if (a == ae || b->first < a->first) {
                    Rational v = -(factor * b->second);
                    if (!v.is_zero()) { out.emplace_back(b->first, v); if (active_[i]) ++col_count_[b->first]; }
                    ++b;
                } else {
                    Rational v = a->second - factor * b->second;
                    if (!v.is_zero()) out.emplace_back(a->first, v);
                    else if (active_[i]) --col_count_[a->first];
                    ++a; ++b;
                }
            }
            row_data_[i] = std::move(out);
        }

        std::size_t ncols_;
        std::vector<Row> row_data_;
        std::vector<Rational> rhs_;
        bool has_rhs_;
        std::vector<std::size_t> col_count_;
        std::vector<bool> active_;
        std::vector<std::pair<std::size_t, std::size_t>> pivots_;
    };

    std::size_t rows_;
    std::size_t cols_;
    EntryMap entries_;
};

}  // namespace veccoh
