#pragma once

// Relation matrices over the generators [a], a in Pi_1, plus epsilon (the
// class of the constant function), and the abelian groups they present.
//
//   C: epsilon = sum_a [a]
//   A: [a] = sum over points b off lambda(a) of [b]
//   B: [a_1] + ... + [a_{n+1}] = epsilon for each tuple
//
// The group presented by C, A, B surjects onto the coinvariants; it is an
// upper bound, not the coinvariants themselves.

#include "antilde/finite_geometry.hpp"
#include "antilde/integer_matrix.hpp"
#include "antilde/presentation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace antilde {

struct Relations {
    bool c = true;
    bool a = true;
    bool b = true;

    std::string to_string() const;
};

/// Columns 0 .. |Pi_1| - 1 are the points, the last column is epsilon.
struct RelationMatrix {
    IntMatrix matrix;
    std::vector<std::string> labels; ///< "C", "A:a", "B:(a1,a2,a3)"
    std::size_t points = 0;

    std::size_t epsilon_column() const noexcept { return points; }
};

/// Assembles the chosen relation families without validating lambda or the
/// tuples. A rows are additive: when a is itself off lambda(a) its entry is 0.
RelationMatrix assemble_relations(const Geometry& geometry, const std::vector<int>& lambda1,
                                  const std::vector<Tuple>& tuples, Relations include);

/// Validates first; throws ValidationError on failure.
RelationMatrix build_relation_matrix(const PresentationData& data, const Geometry& geometry, Relations include);

/// Whether k * e_epsilon lies in the row lattice.
bool epsilon_multiple_in_lattice(const RelationMatrix& m, const mpz_class& k);

/// Order of epsilon in the cokernel, read off the Smith certificate and
/// confirmed by Hermite membership tests for k = 1, 2, ... Throws
/// FalsificationError when epsilon has infinite order.
mpz_class epsilon_order(const RelationMatrix& m);

AbelianGroupStructure presented_group(const PresentationData& data, const Geometry& geometry);
mpz_class epsilon_order(const PresentationData& data, const Geometry& geometry);

/// Group on g_a with one relation sum_i g_{a_i} = 0 per tuple.
AbelianGroupStructure abelianization(const PresentationData& data, const Geometry& geometry);

/// The presented group modulo epsilon compared with the abelianization.
struct ThetaCheck {
    AbelianGroupStructure quotient;       ///< presented group / <epsilon>
    AbelianGroupStructure stacked;        ///< abelianization rows + C + A in point coordinates
    AbelianGroupStructure abelianization; ///< Gamma^ab
    bool stacked_agrees = false;
    bool quotient_of_abelianization = false;

    bool ok() const noexcept { return stacked_agrees && quotient_of_abelianization; }
};

ThetaCheck theta_check(const PresentationData& data, const Geometry& geometry);

enum class Verdict { Certified, Inconclusive };

struct DistributionCertificate {
    Verdict verdict = Verdict::Inconclusive;
    std::size_t free_rank = 0;

    std::string verdict_name() const;
};

/// CERTIFIED when the group is finite, INCONCLUSIVE otherwise.
DistributionCertificate distribution_certificate(const AbelianGroupStructure& g);

struct CoinvariantsReport {
    GeometryParams params;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t c_rows = 0, a_rows = 0, b_rows = 0;
    AbelianGroupStructure group;
    std::optional<mpz_class> epsilon; ///< empty when of infinite order
    std::string epsilon_witness;
    bool epsilon_divides_bound = false;
    bool surjection_consistent = false; ///< (C,A,B) group is a quotient of the (C,A) group
    DistributionCertificate certificate;

    /// Every predicted identity held.
    bool ok() const noexcept;
    std::string to_text() const;
};

CoinvariantsReport coinvariants_report(const PresentationData& data, const Geometry& geometry);

} // namespace antilde
