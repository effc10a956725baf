#pragma once

// Lattices in Q_p^{n+1} and the local structure of the Bruhat-Tits building
// of PGL_{n+1}(Q_p): vertex classes, types, adjacency, chambers, the directed
// edge set E1 and the clopen sets Omega(e) of lines, truncated to finite
// p-adic precision.
//
// Every lattice handled here is a sublattice of the standard lattice Z_p^{n+1}
// of p-power index, so all arithmetic is over the integers. A Z_p-lattice
// containing p^N Z_p^{n+1} is the same thing as a subgroup of (Z/p^N)^{n+1},
// which in turn is the same thing as a Z-lattice containing p^N Z^{n+1}; the
// canonical form is the integer Hermite form of the latter.

#include "antilde/finite_geometry.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace antilde {

struct LocalFieldParams {
    int p = 2; ///< prime; uniformizer p, residue field order p
    int n = 2; ///< building type A_n; vectors have n + 1 coordinates

    /// Throws ParameterError unless p is prime and n >= 1.
    void check() const;
    int dim() const noexcept { return n + 1; }
    GeometryParams residue() const noexcept { return {n, p}; }
};

using Vector = std::vector<std::int64_t>;

/// A full-rank sublattice of Z_p^{n+1} in canonical form: upper triangular,
/// columns generate, diagonal entries p^{k_j}, and each entry above the
/// diagonal reduced into [0, p^{k_i}) where p^{k_i} is the diagonal entry of
/// its row.
class Lattice {
public:
    int prime() const noexcept { return p_; }
    int dim() const noexcept { return d_; }
    std::int64_t at(int row, int col) const { return h_[static_cast<std::size_t>(row * d_ + col)]; }
    const std::vector<std::int64_t>& entries() const noexcept { return h_; }
    Vector column(int col) const;

    /// Diagonal exponents k_j.
    std::vector<int> exponents() const;
    /// v_p(det) = index exponent [Z_p^{n+1} : L].
    int det_valuation() const;
    /// Smallest e with p^e Z_p^{n+1} contained in this lattice.
    int exponent() const;
    /// Smallest p-adic valuation over all nonzero entries.
    int min_entry_valuation() const;

    bool contains(std::span<const std::int64_t> v) const;
    bool contains(const Lattice& other) const;

    /// p^k L for k >= 0.
    Lattice scaled(int k) const;
    /// Exact division by p^k; requires every entry divisible.
    Lattice divided(int k) const;

    /// Solves H x = v for v in L; x is integral.
    Vector coordinates(std::span<const std::int64_t> v) const;

    /// "a b c; d e f; ..." rows of the canonical matrix.
    std::string to_string() const;

    friend bool operator==(const Lattice&, const Lattice&) = default;
    friend auto operator<=>(const Lattice&, const Lattice&) = default;

private:
    friend Lattice lattice_from_generators(int p, int dim, const std::vector<Vector>& generators, int index_bound);
    Lattice(int p, int d, std::vector<std::int64_t> h) : p_(p), d_(d), h_(std::move(h)) {}

    int p_ = 2;
    int d_ = 0;
    std::vector<std::int64_t> h_;
};

/// Canonical lattice spanned over Z_p by the columns of `m` (row-major,
/// square). Entries prime to p act as units. Throws ParameterError if m is
/// singular.
Lattice canonical_lattice(int p, const std::vector<std::vector<std::int64_t>>& m);

/// Canonical lattice spanned by the generators together with p^index_bound
/// times the standard lattice. The caller guarantees the generators already
/// span a lattice containing p^index_bound Z_p^{n+1}.
Lattice lattice_from_generators(int p, int dim, const std::vector<Vector>& generators, int index_bound);

/// L + span(extra).
Lattice lattice_sum(const Lattice& base, const std::vector<Vector>& extra);

Lattice standard_lattice(int p, int dim);

/// Vertex of the building: homothety class of lattices.
class LatticeClass {
public:
    /// Normalizes `l` by the largest power of p dividing it.
    explicit LatticeClass(const Lattice& l, int n);

    /// Canonical representative: contained in Z_p^{n+1}, not in p Z_p^{n+1}.
    const Lattice& representative() const noexcept { return rep_; }
    /// tau = log_p vol(rep) mod (n+1) = -v_p(det rep) mod (n+1).
    int type() const noexcept { return type_; }
    int n() const noexcept { return n_; }

    friend bool operator==(const LatticeClass& a, const LatticeClass& b) { return a.rep_ == b.rep_; }
    friend auto operator<=>(const LatticeClass& a, const LatticeClass& b) { return a.rep_ <=> b.rep_; }

private:
    Lattice rep_;
    int type_;
    int n_;
};

LatticeClass class_of(const Lattice& l, int n);

/// Class of the standard lattice; the base vertex v0.
LatticeClass base_vertex(const LocalFieldParams& params);

/// Whether distinct classes are joined by an edge of the building. Throws
/// ParameterError for c1 == c2.
bool adjacent(const LatticeClass& c1, const LatticeClass& c2);

struct Neighbor {
    Subspace subspace;
    LatticeClass vertex;
};

/// Neighbours of c, in bijection with the nonzero proper subspaces of the
/// residue space R / pR (R the representative of c, coordinates w.r.t. the
/// columns of R). Ordered by subspace dimension, then canonical index.
std::vector<Neighbor> neighbors(const LatticeClass& c, const Geometry& residue);

/// Inverse of neighbors(): the residue subspace of `y` at vertex `c`.
/// Throws ParameterError if y is not adjacent to c.
Subspace residue_subspace(const LatticeClass& c, const LatticeClass& y, const Geometry& residue);

/// Directed edge (x, y) with tau(y) = tau(x) + 1, together with the integral
/// representatives lower ⊂ upper ⊂ p^{-1} lower, where upper is the canonical
/// representative of y.
struct DirectedEdge {
    LatticeClass origin;
    LatticeClass target;
    Lattice lower;
    Lattice upper;

    /// exponent(lower) - 1. Omega membership is determined by a line modulo
    /// p^{depth + 1}.
    int depth() const { return lower.exponent() - 1; }
    std::string describe() const;
};

/// Throws ParameterError unless (origin, target) is an E1 edge.
DirectedEdge make_edge(const LatticeClass& origin, const LatticeClass& target);

/// The lattice chain L0 ⊂ L1 ⊂ ... ⊂ Ln ⊂ p^{-1} L0 of a chamber through
/// `base`, given as a complete flag of the residue space at base.
struct ChamberChain {
    std::vector<Lattice> lattices; ///< L0 .. Ln
    Lattice top;                   ///< p^{-1} L0 (the representative of base)
    int n = 0;

    std::vector<LatticeClass> vertices() const;
    /// The n + 1 edges (L_i, L_{i+1}) with L_{n+1} = top.
    std::vector<DirectedEdge> edges() const;
};

ChamberChain chamber_chain(const Chamber& flag, const LatticeClass& base, const Geometry& residue);

/// Number of ordered pairs (x, y) of distinct chamber vertices with
/// tau(y) = tau(x) + 1.
int count_e1_pairs(const ChamberChain& chain);

/// A line of Q_p^{n+1} known modulo p^precision: a primitive vector over
/// Z/p^precision up to unit scaling, normalized so that its first unit
/// coordinate is 1 and every entry lies in [0, p^precision).
struct LineClass {
    Vector vector;
    int precision = 1;

    /// Throws ParameterError if v is not primitive.
    static LineClass normalized(int p, int precision, Vector v);
    /// Reduction to a lower precision.
    LineClass truncated(int p, int lower_precision) const;
    std::string to_string() const;

    friend bool operator==(const LineClass&, const LineClass&) = default;
    friend auto operator<=>(const LineClass&, const LineClass&) = default;
};

/// All line classes of P^n(Z/p^m), lexicographic.
std::vector<LineClass> enumerate_lines(const LocalFieldParams& params, int precision);

/// l ∈ Omega(e), i.e. L1 = L0 + (l ∩ p^{-1} L0). Throws PrecisionError when
/// l.precision < depth(e) + 1.
bool omega_contains(const DirectedEdge& e, const LineClass& l);

struct OmegaBlock {
    DirectedEdge edge;
    std::string label;
    std::vector<LineClass> members;
};

/// Outcome of one partition check. Failures are counted, not thrown.
struct PartitionReport {
    std::string kind; ///< "PA", "PB" or "PC"
    LocalFieldParams params;
    int precision = 1;
    std::size_t lines_examined = 0; ///< size of the set being partitioned
    std::vector<OmegaBlock> blocks;
    std::size_t uncovered = 0;
    std::size_t multiply_covered = 0;

    // PB only
    std::size_t expected_blocks = 0;
    std::size_t criterion_checked = 0;
    std::size_t criterion_mismatches = 0;
    std::string parent;

    bool ok() const;
    /// One block per Omega set; members listed in full when precision <= 2.
    std::string to_text() const;
};

/// P^n is the disjoint union of Omega(e) over the E1 edges leaving `vertex`.
PartitionReport verify_partition_PA(const LatticeClass& vertex, int precision, const Geometry& residue);

/// Omega(e) is the disjoint union of Omega(e') over the q^n successors e' of
/// e, and Omega(e') ⊂ Omega(e) exactly when the residue point of e' misses
/// the residue hyperplane of o(e) at t(e). Requires precision >= depth(e) + 2.
PartitionReport verify_partition_PB(const DirectedEdge& e, int precision, const Geometry& residue);

/// P^n is the disjoint union of Omega(e_i) over the n + 1 E1 edges of a chamber.
PartitionReport verify_partition_PC(const ChamberChain& chain, int precision);

} // namespace antilde
