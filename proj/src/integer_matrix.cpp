#include "antilde/integer_matrix.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace antilde {

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
    IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw std::invalid_argument("ragged matrix");
        for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

std::vector<mpz_class> IntMatrix::row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

void IntMatrix::append_row(const std::vector<mpz_class>& row) {
    if (rows_ == 0 && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw std::invalid_argument("row length mismatch");
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
}

IntMatrix IntMatrix::transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const mpz_class& factor) {
    if (factor == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += factor * (*this)(src, c);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const mpz_class& factor) {
    if (factor == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += factor * (*this)(r, src);
}

void IntMatrix::negate_row(std::size_t r) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
}

bool IntMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const mpz_class& x) { return x == 0; });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const mpz_class& x = a(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += x * b(k, j);
        }
    return out;
}

bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_; ++r) {
        if (r) os << "; ";
        for (std::size_t c = 0; c < cols_; ++c) os << (c ? " " : "") << (*this)(r, c);
    }
    return os.str();
}

mpz_class determinant(const IntMatrix& input) {
    if (input.rows() != input.cols()) throw std::invalid_argument("determinant of a non-square matrix");
    const std::size_t n = input.rows();
    if (n == 0) return 1;
    IntMatrix a = input;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            a.swap_rows(k, swap);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = t;
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

IntMatrix hermite_normal_form(const IntMatrix& m) {
    IntMatrix a = m;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < a.cols() && pivot_row < a.rows(); ++c) {
        for (;;) {
            std::optional<std::size_t> best;
            for (std::size_t i = pivot_row; i < a.rows(); ++i)
                if (a(i, c) != 0 && (!best || abs(a(i, c)) < abs(a(*best, c)))) best = i;
            if (!best) break;
            a.swap_rows(pivot_row, *best);
            bool clear = true;
            for (std::size_t i = pivot_row + 1; i < a.rows(); ++i) {
                if (a(i, c) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), a(i, c).get_mpz_t(), a(pivot_row, c).get_mpz_t());
                a.add_row_multiple(i, pivot_row, -q);
                clear &= a(i, c) == 0;
            }
            if (clear) break;
        }
        if (a(pivot_row, c) == 0) continue;
        if (a(pivot_row, c) < 0) a.negate_row(pivot_row);
        for (std::size_t i = 0; i < pivot_row; ++i) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), a(i, c).get_mpz_t(), a(pivot_row, c).get_mpz_t());
            a.add_row_multiple(i, pivot_row, -q);
        }
        ++pivot_row;
    }
    IntMatrix out(pivot_row, a.cols());
    for (std::size_t r = 0; r < pivot_row; ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    return out;
}

bool in_row_lattice(const IntMatrix& hnf, std::vector<mpz_class> x) {
    if (x.size() != hnf.cols()) throw std::invalid_argument("vector length mismatch");
    std::size_t c = 0;
    for (std::size_t r = 0; r < hnf.rows(); ++r) {
        while (hnf(r, c) == 0) {
            if (x[c] != 0) return false;
            ++c;
        }
        if (!mpz_divisible_p(x[c].get_mpz_t(), hnf(r, c).get_mpz_t())) return false;
        const mpz_class q = x[c] / hnf(r, c);
        for (std::size_t j = c; j < x.size(); ++j) x[j] -= q * hnf(r, j);
        ++c;
    }
    return std::all_of(x.begin(), x.end(), [](const mpz_class& v) { return v == 0; });
}

std::vector<mpz_class> SnfCertificate::diagonal() const {
    std::vector<mpz_class> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
}

std::size_t SnfCertificate::rank() const {
    std::size_t r = 0;
    for (const auto& x : diagonal()) r += x != 0;
    return r;
}

namespace {

struct Position {
    std::size_t row, col;
};

// Minimal nonzero |entry| in the block [t.., t..]; row-major scan keeps the
// lowest (row, column) on ties.
std::optional<Position> smallest_entry(const IntMatrix& d, std::size_t t) {
    std::optional<Position> best;
    for (std::size_t i = t; i < d.rows(); ++i)
        for (std::size_t j = t; j < d.cols(); ++j)
            if (d(i, j) != 0 && (!best || abs(d(i, j)) < abs(d(best->row, best->col)))) best = Position{i, j};
    return best;
}

// Same, restricted to row t and column t.
std::optional<Position> smallest_in_cross(const IntMatrix& d, std::size_t t) {
    std::optional<Position> best;
    auto consider = [&](std::size_t i, std::size_t j) {
        if (d(i, j) != 0 && (!best || abs(d(i, j)) < abs(d(best->row, best->col)))) best = Position{i, j};
    };
    for (std::size_t i = t; i < d.rows(); ++i) consider(i, t);
    for (std::size_t j = t + 1; j < d.cols(); ++j) consider(t, j);
    return best;
}

} // namespace

SnfCertificate smith_normal_form(const IntMatrix& m) {
    SnfCertificate cert{IntMatrix::identity(m.rows()), m, IntMatrix::identity(m.cols())};
    IntMatrix& d = cert.D;
    IntMatrix& u = cert.U;
    IntMatrix& v = cert.V;

    const std::size_t limit = std::min(m.rows(), m.cols());
    for (std::size_t t = 0; t < limit; ++t) {
        auto pivot = smallest_entry(d, t);
        if (!pivot) break;
        for (;;) {
            d.swap_rows(t, pivot->row);
            u.swap_rows(t, pivot->row);
            d.swap_cols(t, pivot->col);
            v.swap_cols(t, pivot->col);

            bool clean = true;
            for (std::size_t i = t + 1; i < d.rows(); ++i) {
                if (d(i, t) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), d(i, t).get_mpz_t(), d(t, t).get_mpz_t());
                d.add_row_multiple(i, t, -q);
                u.add_row_multiple(i, t, -q);
                clean &= d(i, t) == 0;
            }
            for (std::size_t j = t + 1; j < d.cols(); ++j) {
                if (d(t, j) == 0) continue;
                mpz_class q;
                mpz_tdiv_q(q.get_mpz_t(), d(t, j).get_mpz_t(), d(t, t).get_mpz_t());
                d.add_col_multiple(j, t, -q);
                v.add_col_multiple(j, t, -q);
                clean &= d(t, j) == 0;
            }
            if (!clean) {
                pivot = smallest_in_cross(d, t);
                continue;
            }
            // Row and column cleared; the pivot must divide the rest of the block.
            std::optional<std::size_t> offending;
            for (std::size_t i = t + 1; i < d.rows() && !offending; ++i)
                for (std::size_t j = t + 1; j < d.cols(); ++j)
                    if (!mpz_divisible_p(d(i, j).get_mpz_t(), d(t, t).get_mpz_t())) {
                        offending = i;
                        break;
                    }
            if (!offending) break;
            d.add_row_multiple(t, *offending, 1);
            u.add_row_multiple(t, *offending, 1);
            pivot = smallest_in_cross(d, t);
        }
        if (d(t, t) < 0) {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    verify_certificate(m, cert);
    return cert;
}

void verify_certificate(const IntMatrix& m, const SnfCertificate& cert) {
    if (!(cert.U * m * cert.V == cert.D)) throw std::logic_error("SNF certificate: U*M*V != D");
    if (abs(determinant(cert.U)) != 1) throw std::logic_error("SNF certificate: U not unimodular");
    if (abs(determinant(cert.V)) != 1) throw std::logic_error("SNF certificate: V not unimodular");
    for (std::size_t i = 0; i < cert.D.rows(); ++i)
        for (std::size_t j = 0; j < cert.D.cols(); ++j)
            if (i != j && cert.D(i, j) != 0) throw std::logic_error("SNF certificate: D not diagonal");
    const auto diag = cert.diagonal();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (diag[i] < 0) throw std::logic_error("SNF certificate: negative diagonal entry");
        if (i + 1 < diag.size() && !mpz_divisible_p(diag[i + 1].get_mpz_t(), diag[i].get_mpz_t()))
            throw std::logic_error("SNF certificate: divisibility chain broken at " + std::to_string(i));
    }
}

mpz_class AbelianGroupStructure::torsion_order() const {
    mpz_class order = 1;
    for (const auto& d : invariant_factors) order *= d;
    return order;
}

std::string AbelianGroupStructure::to_string() const {
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
        os << "Z";
        if (free_rank > 1) os << "^" << free_rank;
        first = false;
    }
    for (const auto& d : invariant_factors) {
        os << (first ? "" : " + ") << "Z/" << d;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

AbelianGroupStructure cokernel_structure(const SnfCertificate& cert, std::size_t cols) {
    AbelianGroupStructure g;
    for (const auto& d : cert.diagonal())
        if (d > 1) g.invariant_factors.push_back(d);
    g.free_rank = cols - cert.rank();
    return g;
}

AbelianGroupStructure cokernel_structure(const IntMatrix& m) {
    return cokernel_structure(smith_normal_form(m), m.cols());
}

bool is_quotient_of(const AbelianGroupStructure& quotient, const AbelianGroupStructure& group) {
    // descending lists, free summands as 0 at the front
    auto descending = [](const AbelianGroupStructure& g) {
        std::vector<mpz_class> out(g.free_rank, mpz_class(0));
        out.insert(out.end(), g.invariant_factors.rbegin(), g.invariant_factors.rend());
        return out;
    };
    const auto q = descending(quotient);
    const auto g = descending(group);
    if (q.size() > g.size()) return false;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (g[i] == 0) continue;
        if (q[i] == 0 || !mpz_divisible_p(g[i].get_mpz_t(), q[i].get_mpz_t())) return false;
    }
    return true;
}

} // namespace antilde
