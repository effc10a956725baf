#pragma once

// Presentation data (lambda, S) of an A~_n group on generators g_a, a in
// Pi_1: lambda sends points to hyperplanes, S lists the (n+1)-tuples whose
// generator products are trivial. Validation, exhaustive search for n = 2,
// the antpres-1 file format, and the derived triple set.

#include "antilde/finite_geometry.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace antilde {

using Tuple = std::vector<int>;

struct PresentationData {
    GeometryParams params;
    std::vector<int> lambda1; ///< point index -> hyperplane index
    std::vector<Tuple> tuples;

    /// Tuples sorted lexicographically; used by save() and comparisons.
    PresentationData canonical() const;
    friend bool operator==(const PresentationData&, const PresentationData&) = default;
};

/// Reads an antpres-1 file. Checks syntax, index ranges and duplicate tuples
/// only; throws ParseError naming the offending line and field.
PresentationData load_presentation(const std::filesystem::path& path);
PresentationData parse_presentation(const std::string& text);

std::string format_presentation(const PresentationData& data);
void save_presentation(const PresentationData& data, const std::filesystem::path& path);

struct ValidationFailure {
    std::string check; ///< "V1" .. "V5", or "shape"
    std::string witness;
};

struct ValidationReport {
    std::vector<ValidationFailure> failures;
    std::size_t tuple_count = 0;
    std::size_t expected_tuples = 0;
    std::size_t cyclic_orbits = 0;
    std::size_t fixed_tuples = 0; ///< tuples (a, a, ..., a)

    bool ok() const noexcept { return failures.empty(); }
    std::string to_text() const;
};

/// V1 lambda bijective; V2 cyclic closure; V3 a_{i+1} in lambda(a_i);
/// V4 |S| = number of complete flags; V5 every incident pair (a, b) with
/// b in lambda(a) starts exactly prod_{i<n} [i]_q tuples.
ValidationReport validate(const PresentationData& data, const Geometry& geometry);

/// Number of tuples V5 demands per incident pair.
std::int64_t tuples_per_pair(const GeometryParams& params);

/// The polarity a -> a^perp (orthogonal complement for the standard dot
/// product) as a lambda map.
std::vector<int> duality_lambda(const Geometry& geometry);

/// First lambda, in a fixed deterministic order, for which search() finds a
/// presentation. Candidates are lambda(P_x) = L_{alpha x + beta} for a Singer
/// cycle sigma, points P_x = sigma^x e_1 and lines L_j = P_j + P_{j+1},
/// scanned over (alpha, beta) lexicographically. n must be 2.
std::optional<std::vector<int>> find_lambda(const Geometry& geometry);

struct SearchResult {
    std::vector<PresentationData> presentations; ///< canonical, in discovery order
    std::size_t nodes = 0;                       ///< backtracking nodes visited
    bool exhausted = true;                       ///< false if stopped at max_results
};

/// All tuple sets S compatible with lambda (V1..V5). n must be 2, otherwise
/// ScopeError. Stops after max_results solutions when max_results > 0.
SearchResult search(const Geometry& geometry, const std::vector<int>& lambda1, std::size_t max_results = 0);

struct VertexRef {
    int dim = 1;
    int index = 0;
    friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

using Triple = std::array<VertexRef, 3>;

struct TripleSet {
    std::vector<Triple> triples;                               ///< sorted, cyclically closed
    std::vector<std::pair<VertexRef, VertexRef>> inverse_pairs; ///< (u, lambda(u)), sorted

    bool cyclically_closed() const;
    /// Every triple has dimension sum divisible by n + 1.
    bool type_sums_vanish(int n) const;
};

/// Triples of vertices whose generator product is trivial, read off the
/// cyclic segments of each tuple. Validates first (ValidationError on
/// failure); only n = 2 is supported (ScopeError otherwise).
TripleSet derive_triples(const PresentationData& data, const Geometry& geometry);

} // namespace antilde
