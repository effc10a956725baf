#pragma once

// Dense matrices over the integers with arbitrary-precision entries, and the
// normal forms built on them: Hermite (row lattices, membership tests) and
// Smith (abelian group structure, with unimodular certificates).

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace antilde {

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    mpz_class& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const mpz_class& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<mpz_class> row(std::size_t r) const;
    void append_row(const std::vector<mpz_class>& row);
    IntMatrix transposed() const;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    /// row[dst] += factor * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const mpz_class& factor);
    void add_col_multiple(std::size_t dst, std::size_t src, const mpz_class& factor);
    void negate_row(std::size_t r);

    bool is_zero() const;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend bool operator==(const IntMatrix& a, const IntMatrix& b);

    /// Rows separated by "; ", entries by spaces.
    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpz_class> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
mpz_class determinant(const IntMatrix& m);

/// Row Hermite normal form: the nonzero rows of the echelon basis of the row
/// lattice, pivots positive, entries above each pivot reduced into [0, pivot).
IntMatrix hermite_normal_form(const IntMatrix& m);

/// x lies in the row lattice whose Hermite form is `hnf`.
bool in_row_lattice(const IntMatrix& hnf, std::vector<mpz_class> x);

/// U * M * V = D with U, V unimodular and D diagonal with d_1 | d_2 | ...
struct SnfCertificate {
    IntMatrix U;
    IntMatrix D;
    IntMatrix V;

    std::vector<mpz_class> diagonal() const;
    std::size_t rank() const;
};

/// Smith normal form. Pivot: minimal nonzero absolute value in the remaining
/// block, ties to the lowest (row, column). The certificate is re-verified
/// before returning; a failed verification throws std::logic_error.
SnfCertificate smith_normal_form(const IntMatrix& m);

/// Throws std::logic_error describing the first violated property.
void verify_certificate(const IntMatrix& m, const SnfCertificate& cert);

/// Finitely generated abelian group Z^free_rank + Z/d_1 + ... + Z/d_k.
struct AbelianGroupStructure {
    std::vector<mpz_class> invariant_factors; ///< d_1 | d_2 | ..., each >= 2
    std::size_t free_rank = 0;

    bool finite() const noexcept { return free_rank == 0; }
    /// Product of the invariant factors; meaningful only when finite().
    mpz_class torsion_order() const;
    std::string to_string() const;

    friend bool operator==(const AbelianGroupStructure&, const AbelianGroupStructure&) = default;
};

/// Cokernel Z^cols / (row lattice of m).
AbelianGroupStructure cokernel_structure(const IntMatrix& m);
AbelianGroupStructure cokernel_structure(const SnfCertificate& cert, std::size_t cols);

/// Whether `quotient` is isomorphic to a quotient of `group`. Compares the
/// descending invariant lists with free summands treated as 0 (divisible by
/// everything): len(Q) <= len(G) and Q_i | G_i.
bool is_quotient_of(const AbelianGroupStructure& quotient, const AbelianGroupStructure& group);

} // namespace antilde
