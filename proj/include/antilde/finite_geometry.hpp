#pragma once

// Subspaces, flags and chambers of the projective geometry PG(n, q), i.e. the
// flag complex of nonzero proper subspaces of F_q^{n+1} for prime q.
//
// Every subspace is stored as its reduced row-echelon basis. Within a fixed
// dimension, subspaces are indexed by the lexicographic order of the
// flattened RREF matrices (most significant entry first). This indexing is
// the reference ordering for every file format in the project.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace antilde {

struct GeometryParams {
    int n = 2; ///< projective dimension; ambient space is F_q^{n+1}
    int q = 2; ///< residue field order, prime

    /// Throws ParameterError unless n >= 1 and q is a prime.
    void check() const;

    int ambient() const noexcept { return n + 1; }
    friend bool operator==(const GeometryParams&, const GeometryParams&) = default;
};

bool is_prime(int value) noexcept;

/// A nonzero proper subspace of F_q^{n+1}.
class Subspace {
public:
    Subspace(int dim, int ambient, std::vector<int> basis, int index)
        : dim_(dim), ambient_(ambient), basis_(std::move(basis)), index_(index) {}

    int dim() const noexcept { return dim_; }
    int ambient() const noexcept { return ambient_; }
    int index() const noexcept { return index_; }

    /// Row-major dim x ambient RREF basis, entries in [0, q).
    const std::vector<int>& basis() const noexcept { return basis_; }
    std::vector<int> row(int i) const;

    friend bool operator==(const Subspace& a, const Subspace& b) noexcept {
        return a.dim_ == b.dim_ && a.index_ == b.index_ && a.ambient_ == b.ambient_;
    }
    friend std::strong_ordering operator<=>(const Subspace& a, const Subspace& b) noexcept {
        if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
        return a.index_ <=> b.index_;
    }

private:
    int dim_;
    int ambient_;
    std::vector<int> basis_;
    int index_;
};

/// Result of intersecting two subspaces; std::nullopt is the zero space.
using SubspaceOrZero = std::optional<Subspace>;

/// Complete flag v_1 < v_2 < ... < v_n with dim v_i = i.
struct Chamber {
    std::vector<Subspace> flag;
};

// Linear algebra over the prime field F_q. Matrices are lists of rows.
namespace gf {

using Rows = std::vector<std::vector<int>>;

/// Nonzero rows of the reduced row-echelon form.
Rows rref(Rows rows, int q);
int rank(const Rows& rows, int q);
/// RREF basis of {x : r . x = 0 for every row r}.
Rows null_space(const Rows& rows, int cols, int q);
int inverse(int a, int q);

} // namespace gf

/// Canonical tables of PG(n, q). Immutable after construction.
class Geometry {
public:
    explicit Geometry(GeometryParams params);

    const GeometryParams& params() const noexcept { return params_; }
    int n() const noexcept { return params_.n; }
    int q() const noexcept { return params_.q; }
    int ambient() const noexcept { return params_.n + 1; }

    /// All r-dimensional subspaces in canonical order. 1 <= r <= n.
    const std::vector<Subspace>& subspaces(int r) const;
    const std::vector<Subspace>& points() const { return subspaces(1); }
    const std::vector<Subspace>& hyperplanes() const { return subspaces(params_.n); }
    const Subspace& subspace(int r, int index) const;
    int count(int r) const { return static_cast<int>(subspaces(r).size()); }

    /// Canonical subspace spanned by the rows. Returns nullopt for the zero
    /// space; throws ParameterError when the rows span the whole space.
    SubspaceOrZero span(const gf::Rows& rows) const;

    /// Canonical form of u ∩ v.
    SubspaceOrZero intersect(const Subspace& u, const Subspace& v) const;

    /// inner ⊆ outer.
    bool contains(const Subspace& outer, const Subspace& inner) const;

    /// Distinct u, v are incident iff one contains the other.
    bool incident(const Subspace& u, const Subspace& v) const;

    /// Orthogonal complement under the standard bilinear form; maps
    /// Π_r onto Π_{n+1-r} and reverses containment.
    Subspace dual(const Subspace& u) const;

    /// Indices of the (r+1)-dimensional subspaces containing u.
    const std::vector<int>& superspaces(const Subspace& u) const;

    /// Number of points off a hyperplane, checked to be the same for every
    /// hyperplane. Throws FalsificationError if it is not.
    std::int64_t count_points_off_hyperplane() const;

    /// All complete flags, ordered lexicographically by the index sequence.
    std::vector<Chamber> chambers() const;

    /// `index<TAB>dim<TAB>entries` per line, dimensions ascending.
    std::string export_table() const;

    /// Hex SHA-256 of export_table(), recorded in report headers.
    std::string table_checksum() const;

private:
    Subspace lookup(int dim, const std::vector<int>& flat) const;

    GeometryParams params_;
    std::vector<std::vector<Subspace>> by_dim_;          // [r - 1]
    std::vector<std::map<std::vector<int>, int>> index_; // [r - 1]
    std::vector<std::vector<std::vector<int>>> above_;   // [r - 1][index]
};

/// Gaussian binomial coefficient [n choose k]_q by the product formula.
std::int64_t gaussian_binomial(int n, int k, int q);

/// Number of complete flags of F_q^{n+1}: prod_{k=1}^{n} (q^{k+1}-1)/(q-1).
std::int64_t flag_count(int n, int q);

std::int64_t int_pow(std::int64_t base, int exp);

} // namespace antilde
