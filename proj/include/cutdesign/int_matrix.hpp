#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cutdesign {

using IntVector = std::vector<std::int64_t>;

/// Dense row-major integer matrix. Throughout the library a matrix whose rows
/// are indexed by runs (a design, model or cut configuration) is the primary
/// orientation; the 4ti2 files carry its transpose.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols, std::int64_t fill = 0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static IntMatrix from_rows(const std::vector<IntVector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const std::int64_t> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<std::int64_t> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    IntVector column(std::size_t c) const;

    IntMatrix transposed() const;
    /// Horizontal concatenation; both operands must have the same row count.
    IntMatrix hconcat(const IntMatrix& other) const;
    IntMatrix with_rows_permuted(std::span<const std::size_t> order) const;

    const std::vector<std::int64_t>& data() const noexcept { return data_; }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> data_;
};

/// Result of exact integer elimination on the transpose of a run-indexed
/// matrix: the rank and a lattice basis of {b : b' M = 0}.
struct KernelResult {
    std::size_t rank = 0;
    std::vector<IntVector> basis;
};

/// Unimodular column elimination (Hermite style) on M'. Exact; throws
/// ErrorCode::Overflow if an intermediate value leaves 64-bit range.
KernelResult left_kernel(const IntMatrix& m);

std::size_t integer_rank(const IntMatrix& m);

/// b' M, i.e. the sufficient statistic of b for run-indexed M.
IntVector left_multiply(const IntMatrix& m, std::span<const std::int64_t> b);

bool is_in_left_kernel(const IntMatrix& m, std::span<const std::int64_t> b);

/// Stable FNV-1a digest of shape and entries.
std::uint64_t matrix_digest(const IntMatrix& m);

/// 4ti2 plain matrix format: a `rows cols` header followed by rows of
/// whitespace separated integers.
IntMatrix read_4ti2(std::istream& in);
IntMatrix read_4ti2_file(const std::string& path);
void write_4ti2(std::ostream& out, const IntMatrix& m);
void write_csv(std::ostream& out, const IntMatrix& m);

}  // namespace cutdesign
