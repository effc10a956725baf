#include "antilde/coinvariants.hpp"

#include "antilde/errors.hpp"

#include <sstream>

namespace antilde {

namespace {

std::vector<mpz_class> zero_row(std::size_t cols) { return std::vector<mpz_class>(cols, 0); }

std::string tuple_label(const Tuple& t) {
    std::string s = "B:(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

void require_valid(const PresentationData& data, const Geometry& geometry) {
    const auto report = validate(data, geometry);
    if (!report.ok())
        throw ValidationError("presentation fails validation: " + report.failures.front().check + " " +
                              report.failures.front().witness);
}

IntMatrix with_epsilon_row(IntMatrix m, std::size_t epsilon) {
    auto row = zero_row(m.cols());
    row[epsilon] = 1;
    m.append_row(row);
    return m;
}

} // namespace

std::string Relations::to_string() const {
    std::string s;
    if (c) s += "C";
    if (a) s += s.empty() ? "A" : ",A";
    if (b) s += s.empty() ? "B" : ",B";
    return s.empty() ? "none" : s;
}

RelationMatrix assemble_relations(const Geometry& geometry, const std::vector<int>& lambda1,
                                  const std::vector<Tuple>& tuples, Relations include) {
    RelationMatrix out;
    out.points = geometry.points().size();
    const std::size_t cols = out.points + 1;
    const std::size_t eps = out.epsilon_column();
    out.matrix = IntMatrix(0, cols);

    if (include.c) {
        auto row = zero_row(cols);
        row[eps] = 1;
        for (std::size_t a = 0; a < out.points; ++a) row[a] = -1;
        out.matrix.append_row(row);
        out.labels.push_back("C");
    }
    if (include.a) {
        if (lambda1.size() != out.points) throw ParameterError("lambda has the wrong length");
        for (std::size_t a = 0; a < out.points; ++a) {
            const auto& h = geometry.hyperplanes().at(static_cast<std::size_t>(lambda1[a]));
            auto row = zero_row(cols);
            row[a] += 1;
            for (const auto& b : geometry.points())
                if (!geometry.contains(h, b)) row[static_cast<std::size_t>(b.index())] -= 1;
            out.matrix.append_row(row);
            out.labels.push_back("A:" + std::to_string(a));
        }
    }
    if (include.b) {
        for (const auto& t : tuples) {
            auto row = zero_row(cols);
            for (int a : t) row.at(static_cast<std::size_t>(a)) += 1;
            row[eps] = -1;
            out.matrix.append_row(row);
            out.labels.push_back(tuple_label(t));
        }
    }
    return out;
}

RelationMatrix build_relation_matrix(const PresentationData& data, const Geometry& geometry, Relations include) {
    require_valid(data, geometry);
    return assemble_relations(geometry, data.lambda1, data.tuples, include);
}

bool epsilon_multiple_in_lattice(const RelationMatrix& m, const mpz_class& k) {
    auto x = zero_row(m.matrix.cols());
    x[m.epsilon_column()] = k;
    return in_row_lattice(hermite_normal_form(m.matrix), x);
}

mpz_class epsilon_order(const RelationMatrix& m) {
    const auto cert = smith_normal_form(m.matrix);
    const auto d = cert.diagonal();
    const std::size_t rank = cert.rank();
    // x -> x V carries the row lattice of M onto that of D.
    const std::size_t eps = m.epsilon_column();
    mpz_class order = 1;
    for (std::size_t i = 0; i < m.matrix.cols(); ++i) {
        const mpz_class& y = cert.V(eps, i);
        if (i >= rank) {
            if (y != 0)
                throw FalsificationError("epsilon has infinite order: its image has coordinate " + y.get_str() +
                                         " on free summand " + std::to_string(i - rank));
            continue;
        }
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), d[i].get_mpz_t(), y.get_mpz_t());
        const mpz_class part = d[i] / g;
        mpz_lcm(order.get_mpz_t(), order.get_mpz_t(), part.get_mpz_t());
    }
    // Independent confirmation against the Hermite form.
    const IntMatrix hnf = hermite_normal_form(m.matrix);
    for (mpz_class k = 1; k <= order; ++k) {
        auto x = zero_row(m.matrix.cols());
        x[eps] = k;
        const bool member = in_row_lattice(hnf, x);
        if (member != (k == order))
            throw std::logic_error("epsilon order disagrees between Smith and Hermite forms at k = " + k.get_str());
    }
    return order;
}

AbelianGroupStructure presented_group(const PresentationData& data, const Geometry& geometry) {
    return cokernel_structure(build_relation_matrix(data, geometry, {}).matrix);
}

mpz_class epsilon_order(const PresentationData& data, const Geometry& geometry) {
    return epsilon_order(build_relation_matrix(data, geometry, {}));
}

AbelianGroupStructure abelianization(const PresentationData& data, const Geometry& geometry) {
    require_valid(data, geometry);
    const std::size_t points = geometry.points().size();
    IntMatrix m(0, points);
    for (const auto& t : data.tuples) {
        auto row = zero_row(points);
        for (int a : t) row[static_cast<std::size_t>(a)] += 1;
        m.append_row(row);
    }
    return cokernel_structure(m);
}

ThetaCheck theta_check(const PresentationData& data, const Geometry& geometry) {
    ThetaCheck out;
    const auto full = build_relation_matrix(data, geometry, {});
    out.quotient = cokernel_structure(with_epsilon_row(full.matrix, full.epsilon_column()));
    out.abelianization = abelianization(data, geometry);

    // Modulo epsilon, C reads sum_a [a] = 0 and B reads sum_i [a_i] = 0.
    const std::size_t points = geometry.points().size();
    IntMatrix stacked(0, points);
    for (const auto& t : data.tuples) {
        auto row = zero_row(points);
        for (int a : t) row[static_cast<std::size_t>(a)] += 1;
        stacked.append_row(row);
    }
    stacked.append_row(std::vector<mpz_class>(points, 1));
    const auto ca = assemble_relations(geometry, data.lambda1, {}, {false, true, false});
    for (std::size_t r = 0; r < ca.matrix.rows(); ++r) {
        auto row = ca.matrix.row(r);
        row.pop_back();
        stacked.append_row(row);
    }
    out.stacked = cokernel_structure(stacked);
    out.stacked_agrees = out.stacked == out.quotient;
    out.quotient_of_abelianization = is_quotient_of(out.quotient, out.abelianization);
    return out;
}

std::string DistributionCertificate::verdict_name() const {
    return verdict == Verdict::Certified ? "CERTIFIED" : "INCONCLUSIVE";
}

DistributionCertificate distribution_certificate(const AbelianGroupStructure& g) {
    return {g.finite() ? Verdict::Certified : Verdict::Inconclusive, g.free_rank};
}

bool CoinvariantsReport::ok() const noexcept {
    return group.finite() && epsilon.has_value() && epsilon_divides_bound && surjection_consistent &&
           certificate.verdict == Verdict::Certified;
}

std::string CoinvariantsReport::to_text() const {
    std::ostringstream os;
    os << "# upper-bound presentation of the coinvariants: generators [a] for points a and epsilon,\n";
    os << "# relations C, A, B; the group below surjects onto the coinvariants\n";
    os << "[matrix-shape]\n";
    os << "rows = " << rows << "\n";
    os << "cols = " << cols << "\n";
    os << "rows-C = " << c_rows << "\n";
    os << "rows-A = " << a_rows << "\n";
    os << "rows-B = " << b_rows << "\n";
    os << "[invariant-factors]\n";
    os << "factors = [";
    for (std::size_t i = 0; i < group.invariant_factors.size(); ++i) os << (i ? ", " : "") << group.invariant_factors[i];
    os << "]\n";
    os << "structure = " << group.to_string() << "\n";
    os << "[free-rank]\n";
    os << "free-rank = " << group.free_rank << "\n";
    os << "[epsilon-order]\n";
    const std::int64_t bound = int_pow(params.q, params.n) - 1;
    if (epsilon) {
        os << "epsilon-order = " << *epsilon << "\n";
    } else {
        os << "epsilon-order = infinite\n";
        os << "witness = " << epsilon_witness << "\n";
    }
    os << "bound = " << bound << "\n";
    os << "divides-bound = " << (epsilon_divides_bound ? "yes" : "no") << "\n";
    os << "quotient-of-CA-group = " << (surjection_consistent ? "yes" : "no") << "\n";
    os << "[verdict]\n";
    os << "verdict = " << certificate.verdict_name() << "\n";
    if (certificate.verdict != Verdict::Certified) os << "witness = free rank " << certificate.free_rank << "\n";
    os << "status = " << (ok() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

CoinvariantsReport coinvariants_report(const PresentationData& data, const Geometry& geometry) {
    CoinvariantsReport r;
    r.params = data.params;
    const auto full = build_relation_matrix(data, geometry, {});
    r.rows = full.matrix.rows();
    r.cols = full.matrix.cols();
    for (const auto& l : full.labels) {
        if (l == "C") ++r.c_rows;
        else if (l[0] == 'A') ++r.a_rows;
        else ++r.b_rows;
    }
    r.group = cokernel_structure(full.matrix);
    try {
        r.epsilon = epsilon_order(full);
        const mpz_class bound = mpz_class(int_pow(data.params.q, data.params.n) - 1);
        r.epsilon_divides_bound = bound % *r.epsilon == 0;
    } catch (const FalsificationError& e) {
        r.epsilon_witness = e.what();
    }
    const auto ca = assemble_relations(geometry, data.lambda1, data.tuples, {true, true, false});
    r.surjection_consistent = is_quotient_of(r.group, cokernel_structure(ca.matrix));
    r.certificate = distribution_certificate(r.group);
    return r;
}

} // namespace antilde
