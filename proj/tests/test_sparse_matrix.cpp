#include <gtest/gtest.h>

#include <sstream>

#include "veccoh/sparse_matrix.hpp"

using veccoh::Rational;
using veccoh::SparseMatrix;

namespace {

SparseMatrix from_ints(const std::vector<std::vector<long>>& rows) {
    std::vector<std::vector<Rational>> r;
    for (const auto& row : rows) {
        std::vector<Rational> rr;
        for (long v : row) rr.emplace_back(v);
        r.push_back(std::move(rr));
    }
    return SparseMatrix::from_rows(r);
}

// Deterministic small generator for property checks.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    long small(long lo, long hi) { return lo + (long)(next() % (std::uint64_t)(hi - lo + 1)); }
};

SparseMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int fill_percent) {
    SparseMatrix::EntryMap m;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (rng.small(0, 99) < fill_percent) {
                long num = rng.small(-4, 4);
                long den = rng.small(1, 3);
                if (num != 0) m[{i, j}] = Rational(num, den);
            }
    return SparseMatrix(rows, cols, std::move(m));
}

}  // namespace

TEST(SparseMatrix, RankExamples) {
    EXPECT_EQ(SparseMatrix(3, 3).rank(), 0u);                       // zero map
    EXPECT_EQ(SparseMatrix::identity(4).rank(), 4u);                // identity
    EXPECT_EQ(from_ints({{1, 2}, {2, 4}, {1, 1}}).rank(), 2u);      // hand elimination
}

TEST(SparseMatrix, NullspaceDimExamples) {
    EXPECT_EQ(SparseMatrix(3, 5).nullspace_dim(), 5u);
    EXPECT_EQ(SparseMatrix::identity(4).nullspace_dim(), 0u);
    EXPECT_EQ(from_ints({{1, 2}, {2, 4}, {1, 1}}).nullspace_dim(), 0u);
}

TEST(SparseMatrix, SolveExamples) {
    auto id2 = SparseMatrix::identity(2);
    auto x = id2.solve({Rational(3), Rational(-1, 2)});
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ((*x)[0], Rational(3));
    EXPECT_EQ((*x)[1], Rational(-1, 2));

    auto inconsistent = from_ints({{1, 1}, {2, 2}}).solve({Rational(1), Rational(3)});
    EXPECT_FALSE(inconsistent.has_value());

    auto single = from_ints({{2}}).solve({Rational(5)});
    ASSERT_TRUE(single.has_value());
    EXPECT_EQ((*single)[0], Rational(5, 2));
}

TEST(SparseMatrix, SolveRejectsBadLength) {
    EXPECT_THROW(SparseMatrix::identity(2).solve({Rational(1)}), std::invalid_argument);
}

TEST(SparseMatrix, RankEqualsTransposeRank) {
    Rng rng(12345);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = random_matrix(rng, 1 + rng.small(0, 7), 1 + rng.small(0, 7), 40);
        EXPECT_EQ(m.rank(), m.transposed().rank());
    }
}

TEST(SparseMatrix, SolveResidualIsExactlyZero) {
    Rng rng(777);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t rows = 1 + rng.small(0, 6), cols = 1 + rng.small(0, 6);
        auto m = random_matrix(rng, rows, cols, 50);
        std::vector<Rational> b;
        for (std::size_t i = 0; i < rows; ++i) b.emplace_back(rng.small(-3, 3));
        auto x = m.solve(b);
        if (!x.has_value()) continue;
        for (std::size_t i = 0; i < rows; ++i) {
            Rational acc(0);
            for (std::size_t j = 0; j < cols; ++j) acc += m.at(i, j) * (*x)[j];
            EXPECT_EQ(acc, b[i]);
        }
    }
}

TEST(SparseMatrix, ConstructedSolutionsAreFound) {
    Rng rng(424242);
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t rows = 1 + rng.small(0, 6), cols = 1 + rng.small(0, 6);
        auto m = random_matrix(rng, rows, cols, 50);
        std::vector<Rational> x0;
        for (std::size_t j = 0; j < cols; ++j) x0.emplace_back(rng.small(-3, 3));
        std::vector<Rational> b(rows, Rational(0));
        for (const auto& [rc, v] : m.entries()) b[rc.first] += v * x0[rc.second];
        auto x = m.solve(b);
        ASSERT_TRUE(x.has_value());
        for (std::size_t i = 0; i < rows; ++i) {
            Rational acc(0);
            for (std::size_t j = 0; j < cols; ++j) acc += m.at(i, j) * (*x)[j];
            EXPECT_EQ(acc, b[i]);
        }
    }
}

TEST(SparseMatrix, RankInvariantUnderRowPermutationAndScaling) {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t rows = 2 + rng.small(0, 5), cols = 1 + rng.small(0, 6);
        auto m = random_matrix(rng, rows, cols, 45);
        std::vector<std::size_t> perm(rows);
        for (std::size_t i = 0; i < rows; ++i) perm[i] = i;
        for (std::size_t i = rows; i > 1; --i) std::swap(perm[i - 1], perm[rng.small(0, (long)i - 1)]);
        std::vector<Rational> scale;
        for (std::size_t i = 0; i < rows; ++i) {
            long num = rng.small(1, 4) * (rng.small(0, 1) ? 1 : -1);
            scale.emplace_back(num, rng.small(1, 3));
        }
        SparseMatrix::EntryMap e;
        for (const auto& [rc, v] : m.entries()) e[{perm[rc.first], rc.second}] = scale[rc.first] * v;
        SparseMatrix m2(rows, cols, std::move(e));
        EXPECT_EQ(m.rank(), m2.rank());
    }
}

TEST(SparseMatrix, DumpRoundTrip) {
    auto m = from_ints({{1, 0, 2}, {0, -3, 0}});
    std::ostringstream os;
    m.dump(os);
    EXPECT_EQ(os.str(), "2 3 3\n0 0 1/1\n0 2 2/1\n1 1 -3/1\n");
    std::istringstream is(os.str());
    auto m2 = SparseMatrix::load(is);
    EXPECT_EQ(m2.rows(), 2u);
    EXPECT_EQ(m2.cols(), 3u);
    EXPECT_EQ(m2.at(1, 1), Rational(-3));
    EXPECT_EQ(m2.entries(), m.entries());
}

TEST(SparseMatrix, EntriesOutOfBoundsRejected) {
    SparseMatrix::EntryMap e;
    e[{5, 0}] = Rational(1);
    EXPECT_THROW(SparseMatrix(2, 2, std::move(e)), std::out_of_range);
}
