#include "cutdesign/int_matrix.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cutdesign/error.hpp"

namespace cutdesign {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::NotAClique: return "NotAClique";
        case ErrorCode::UnsupportedK: return "UnsupportedK";
        case ErrorCode::DependentRelations: return "DependentRelations";
        case ErrorCode::ConfoundedTerm: return "ConfoundedTerm";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::FiberTooLarge: return "FiberTooLarge";
        case ErrorCode::TooManyRelations: return "TooManyRelations";
        case ErrorCode::NotRegular: return "NotRegular";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::AllZero: return "AllZero";
        case ErrorCode::InvalidMove: return "InvalidMove";
        case ErrorCode::NoSamples: return "NoSamples";
        case ErrorCode::NotMarkov: return "NotMarkov";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::Overflow: return "Overflow";
    }
    return "Unknown";
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows) {
    if (rows.empty()) return {};
    IntMatrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols())
            throw Error(ErrorCode::ShapeMismatch, "ragged rows in matrix literal");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

IntVector IntMatrix::column(std::size_t c) const {
    IntVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

IntMatrix IntMatrix::hconcat(const IntMatrix& other) const {
    if (other.rows_ != rows_) throw Error(ErrorCode::ShapeMismatch, "hconcat: row counts differ");
    IntMatrix out(rows_, cols_ + other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::copy(row(r).begin(), row(r).end(), out.row(r).begin());
        std::copy(other.row(r).begin(), other.row(r).end(), out.row(r).begin() + cols_);
    }
    return out;
}

IntMatrix IntMatrix::with_rows_permuted(std::span<const std::size_t> order) const {
    if (order.size() != rows_) throw Error(ErrorCode::ShapeMismatch, "row permutation has wrong length");
    IntMatrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto src = row(order[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw Error(ErrorCode::Overflow, "integer elimination overflow");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw Error(ErrorCode::Overflow, "integer elimination overflow");
    return out;
}

// Column vector of M' augmented with the matching column of the identity.
struct Augmented {
    IntVector top;     // entries of M' (length = number of model columns)
    IntVector bottom;  // unimodular transform (length = runs)
};

void axpy(Augmented& dst, std::int64_t a, const Augmented& src) {
    for (std::size_t i = 0; i < dst.top.size(); ++i) dst.top[i] = checked_add(dst.top[i], checked_mul(a, src.top[i]));
    for (std::size_t i = 0; i < dst.bottom.size(); ++i)
        dst.bottom[i] = checked_add(dst.bottom[i], checked_mul(a, src.bottom[i]));
}

}  // namespace

KernelResult left_kernel(const IntMatrix& m) {
    const std::size_t runs = m.rows();
    const std::size_t params = m.cols();

    // Column j of M' is row j of M.
    std::vector<Augmented> cols(runs);
    for (std::size_t j = 0; j < runs; ++j) {
        cols[j].top.assign(m.row(j).begin(), m.row(j).end());
        cols[j].bottom.assign(runs, 0);
        cols[j].bottom[j] = 1;
    }

    std::size_t pivots = 0;
    for (std::size_t r = 0; r < params && pivots < runs; ++r) {
        // Euclid across the active columns until a single nonzero entry remains.
        while (true) {
            std::size_t best = runs;
            for (std::size_t j = pivots; j < runs; ++j) {
                if (cols[j].top[r] == 0) continue;
                if (best == runs || std::llabs(cols[j].top[r]) < std::llabs(cols[best].top[r])) best = j;
            }
            if (best == runs) break;
            std::swap(cols[pivots], cols[best]);
            bool reduced = false;
            for (std::size_t j = pivots + 1; j < runs; ++j) {
                if (cols[j].top[r] == 0) continue;
                const std::int64_t q = cols[j].top[r] / cols[pivots].top[r];
                axpy(cols[j], -q, cols[pivots]);
                reduced = true;
            }
            bool others_zero = true;
            for (std::size_t j = pivots + 1; j < runs; ++j)
                if (cols[j].top[r] != 0) others_zero = false;
            if (others_zero) {
                ++pivots;
                break;
            }
            if (!reduced) break;
        }
    }

    KernelResult out;
    out.rank = pivots;
    for (std::size_t j = pivots; j < runs; ++j) out.basis.push_back(cols[j].bottom);

    // Size-reduce the basis into reduced echelon form so entries stay small.
    auto& basis = out.basis;
    std::size_t row = 0;
    for (std::size_t c = 0; c < runs && row < basis.size(); ++c) {
        while (true) {
            std::size_t best = basis.size();
            for (std::size_t i = row; i < basis.size(); ++i) {
                if (basis[i][c] == 0) continue;
                if (best == basis.size() || std::llabs(basis[i][c]) < std::llabs(basis[best][c])) best = i;
            }
            if (best == basis.size()) break;
            std::swap(basis[row], basis[best]);
            bool others = false;
            for (std::size_t i = row + 1; i < basis.size(); ++i) {
                if (basis[i][c] == 0) continue;
                const std::int64_t q = basis[i][c] / basis[row][c];
                for (std::size_t t = 0; t < runs; ++t) basis[i][t] = checked_add(basis[i][t], checked_mul(-q, basis[row][t]));
                if (basis[i][c] != 0) others = true;
            }
            if (!others) break;
        }
        if (row < basis.size() && basis[row][c] != 0) {
            if (basis[row][c] < 0)
                for (auto& v : basis[row]) v = -v;
            for (std::size_t i = 0; i < row; ++i) {
                // Floor division keeps entries above the pivot in [0, pivot).
                std::int64_t q = basis[i][c] / basis[row][c];
                if (basis[i][c] - q * basis[row][c] < 0) --q;
                if (q == 0) continue;
                for (std::size_t t = 0; t < runs; ++t) basis[i][t] = checked_add(basis[i][t], checked_mul(-q, basis[row][t]));
            }
            ++row;
        }
    }
    return out;
}

std::size_t integer_rank(const IntMatrix& m) { return left_kernel(m).rank; }

IntVector left_multiply(const IntMatrix& m, std::span<const std::int64_t> b) {
    if (b.size() != m.rows()) throw Error(ErrorCode::ShapeMismatch, "vector length does not match run count");
    IntVector out(m.cols(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (b[r] == 0) continue;
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += b[r] * m(r, c);
    }
    return out;
}

bool is_in_left_kernel(const IntMatrix& m, std::span<const std::int64_t> b) {
    const IntVector s = left_multiply(m, b);
    return std::all_of(s.begin(), s.end(), [](std::int64_t v) { return v == 0; });
}

std::uint64_t matrix_digest(const IntMatrix& m) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    mix(m.rows());
    mix(m.cols());
    for (auto v : m.data()) mix(static_cast<std::uint64_t>(v));
    return h;
}

IntMatrix read_4ti2(std::istream& in) {
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw Error(ErrorCode::InvalidInput, "missing 4ti2 `rows cols` header");
    IntMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (!(in >> m(r, c)))
                throw Error(ErrorCode::InvalidInput, "4ti2 matrix truncated at row " + std::to_string(r + 1));
    return m;
}

IntMatrix read_4ti2_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    return read_4ti2(in);
}

void write_4ti2(std::ostream& out, const IntMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << std::setw(2) << m(r, c) << ' ';
        out << '\n';
    }
}

void write_csv(std::ostream& out, const IntMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << m(r, c);
        }
        out << '\n';
    }
}

}  // namespace cutdesign
