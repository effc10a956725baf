#include "antilde/padic_building.hpp"

#include "antilde/errors.hpp"
#include "antilde/integer_matrix.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace antilde {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("lattice arithmetic overflow");
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("lattice arithmetic overflow");
    return r;
}

int valuation(std::int64_t x, int p) {
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

int valuation(mpz_class x, int p) {
    int v = 0;
    while (mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(p))) {
        x /= p;
        ++v;
    }
    return v;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
    std::int64_t old_r = mod(a, m), r = m, old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::tie(old_r, r) = std::pair{r, old_r - q * r};
        std::tie(old_s, s) = std::pair{s, old_s - q * s};
    }
    if (old_r != 1) throw ParameterError("not a unit");
    return mod(old_s, m);
}

Vector scale(const Vector& v, std::int64_t f) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = checked_mul(v[i], f);
    return out;
}

std::vector<Vector> lifts(const Subspace& s, const Lattice& frame) {
    std::vector<Vector> out;
    for (int r = 0; r < s.dim(); ++r) {
        const auto row = s.row(r);
        Vector w(static_cast<std::size_t>(frame.dim()), 0);
        for (int j = 0; j < frame.dim(); ++j) {
            if (row[static_cast<std::size_t>(j)] == 0) continue;
            const Vector col = frame.column(j);
            for (int i = 0; i < frame.dim(); ++i)
                w[static_cast<std::size_t>(i)] += checked_mul(row[static_cast<std::size_t>(j)], col[static_cast<std::size_t>(i)]);
        }
        out.push_back(std::move(w));
    }
    return out;
}

void check_residue(const Geometry& residue, const Lattice& l) {
    if (residue.ambient() != l.dim() || residue.q() != l.prime())
        throw ParameterError("residue geometry does not match the lattice dimension and prime");
}

} // namespace

void LocalFieldParams::check() const {
    if (!is_prime(p)) throw ParameterError("p must be prime, got " + std::to_string(p));
    if (n < 1) throw ParameterError("n must be >= 1, got " + std::to_string(n));
}

// ---------------------------------------------------------------- Lattice

Vector Lattice::column(int col) const {
    Vector v(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) v[static_cast<std::size_t>(i)] = at(i, col);
    return v;
}

std::vector<int> Lattice::exponents() const {
    std::vector<int> k;
    for (int j = 0; j < d_; ++j) k.push_back(valuation(at(j, j), p_));
    return k;
}

int Lattice::det_valuation() const {
    int total = 0;
    for (int k : exponents()) total += k;
    return total;
}

int Lattice::exponent() const {
    const auto k = exponents();
    for (int e = *std::max_element(k.begin(), k.end());; ++e) {
        const std::int64_t pe = int_pow(p_, e);
        bool all = true;
        for (int i = 0; i < d_ && all; ++i) {
            Vector unit(static_cast<std::size_t>(d_), 0);
            unit[static_cast<std::size_t>(i)] = pe;
            all = contains(unit);
        }
        if (all) return e;
    }
}

int Lattice::min_entry_valuation() const {
    int best = -1;
    for (auto x : h_)
        if (x != 0) {
            const int v = valuation(x, p_);
            if (best < 0 || v < best) best = v;
        }
    return best;
}

bool Lattice::contains(std::span<const std::int64_t> v) const {
    if (static_cast<int>(v.size()) != d_) throw ParameterError("vector length mismatch");
    Vector rest(v.begin(), v.end());
    for (int j = d_ - 1; j >= 0; --j) {
        const std::int64_t pivot = at(j, j);
        const std::int64_t x = rest[static_cast<std::size_t>(j)];
        if (x % pivot != 0) return false;
        const std::int64_t f = x / pivot;
        if (f == 0) continue;
        for (int i = 0; i <= j; ++i)
            rest[static_cast<std::size_t>(i)] = checked_sub(rest[static_cast<std::size_t>(i)], checked_mul(f, at(i, j)));
    }
    return true;
}

bool Lattice::contains(const Lattice& other) const {
    for (int j = 0; j < d_; ++j)
        if (!contains(other.column(j))) return false;
    return true;
}

Vector Lattice::coordinates(std::span<const std::int64_t> v) const {
    Vector rest(v.begin(), v.end());
    Vector x(static_cast<std::size_t>(d_), 0);
    for (int j = d_ - 1; j >= 0; --j) {
        const std::int64_t pivot = at(j, j);
        if (rest[static_cast<std::size_t>(j)] % pivot != 0) throw ParameterError("vector not in lattice");
        const std::int64_t f = rest[static_cast<std::size_t>(j)] / pivot;
        x[static_cast<std::size_t>(j)] = f;
        for (int i = 0; i <= j; ++i)
            rest[static_cast<std::size_t>(i)] = checked_sub(rest[static_cast<std::size_t>(i)], checked_mul(f, at(i, j)));
    }
    return x;
}

Lattice Lattice::scaled(int k) const {
    const std::int64_t f = int_pow(p_, k);
    std::vector<std::int64_t> h(h_.size());
    for (std::size_t i = 0; i < h_.size(); ++i) h[i] = checked_mul(h_[i], f);
    return {p_, d_, std::move(h)};
}

Lattice Lattice::divided(int k) const {
    const std::int64_t f = int_pow(p_, k);
    std::vector<std::int64_t> h(h_.size());
    for (std::size_t i = 0; i < h_.size(); ++i) {
        if (h_[i] % f != 0) throw ParameterError("lattice not divisible by p^" + std::to_string(k));
        h[i] = h_[i] / f;
    }
    return {p_, d_, std::move(h)};
}

std::string Lattice::to_string() const {
    std::ostringstream os;
    os << '[';
    for (int i = 0; i < d_; ++i) {
        if (i) os << "; ";
        for (int j = 0; j < d_; ++j) os << (j ? " " : "") << at(i, j);
    }
    os << ']';
    return os.str();
}

Lattice lattice_from_generators(int p, int dim, const std::vector<Vector>& generators, int index_bound) {
    // Rows are generators with coordinates reversed, so the row Hermite form
    // T (upper triangular) gives the upper triangular column form
    // H[i][j] = T[d-1-j][d-1-i].
    IntMatrix rows(0, static_cast<std::size_t>(dim));
    for (const auto& g : generators) {
        if (static_cast<int>(g.size()) != dim) throw ParameterError("generator length mismatch");
        std::vector<mpz_class> r(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) r[static_cast<std::size_t>(dim - 1 - i)] = static_cast<long>(g[static_cast<std::size_t>(i)]);
        rows.append_row(r);
    }
    mpz_class bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(index_bound));
    for (int i = 0; i < dim; ++i) {
        std::vector<mpz_class> r(static_cast<std::size_t>(dim), 0);
        r[static_cast<std::size_t>(i)] = bound;
        rows.append_row(r);
    }
    const IntMatrix t = hermite_normal_form(rows);
    if (static_cast<int>(t.rows()) != dim) throw std::logic_error("lattice Hermite form lost rank");
    std::vector<std::int64_t> h(static_cast<std::size_t>(dim * dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const mpz_class& x = t(static_cast<std::size_t>(dim - 1 - j), static_cast<std::size_t>(dim - 1 - i));
            if (!x.fits_slong_p()) throw OverflowError("lattice entry exceeds 64 bits");
            h[static_cast<std::size_t>(i * dim + j)] = x.get_si();
        }
    return Lattice(p, dim, std::move(h));
}

Lattice canonical_lattice(int p, const std::vector<std::vector<std::int64_t>>& m) {
    if (!is_prime(p)) throw ParameterError("p must be prime");
    const int dim = static_cast<int>(m.size());
    IntMatrix exact(m.size(), m.size());
    for (int i = 0; i < dim; ++i) {
        if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != dim) throw ParameterError("matrix must be square");
        for (int j = 0; j < dim; ++j)
            exact(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = static_cast<long>(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    const mpz_class det = determinant(exact);
    if (det == 0) throw ParameterError("singular matrix does not span a lattice");
    std::vector<Vector> columns;
    for (int j = 0; j < dim; ++j) {
        Vector c(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) c[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        columns.push_back(std::move(c));
    }
    return lattice_from_generators(p, dim, columns, valuation(det, p));
}

Lattice lattice_sum(const Lattice& base, const std::vector<Vector>& extra) {
    std::vector<Vector> gens;
    for (int j = 0; j < base.dim(); ++j) gens.push_back(base.column(j));
    gens.insert(gens.end(), extra.begin(), extra.end());
    return lattice_from_generators(base.prime(), base.dim(), gens, base.det_valuation());
}

Lattice standard_lattice(int p, int dim) {
    std::vector<std::vector<std::int64_t>> id(static_cast<std::size_t>(dim), std::vector<std::int64_t>(static_cast<std::size_t>(dim), 0));
    for (int i = 0; i < dim; ++i) id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    return canonical_lattice(p, id);
}

// ---------------------------------------------------------- LatticeClass

LatticeClass::LatticeClass(const Lattice& l, int n)
    : rep_(l.divided(l.min_entry_valuation())), type_(0), n_(n) {
    if (l.dim() != n + 1) throw ParameterError("lattice dimension does not match n + 1");
    type_ = static_cast<int>(mod(-rep_.det_valuation(), n + 1));
}

LatticeClass class_of(const Lattice& l, int n) { return LatticeClass(l, n); }

LatticeClass base_vertex(const LocalFieldParams& params) {
    params.check();
    return LatticeClass(standard_lattice(params.p, params.dim()), params.n);
}

bool adjacent(const LatticeClass& c1, const LatticeClass& c2) {
    if (c1 == c2) throw ParameterError("adjacency is defined for distinct vertices");
    const Lattice low = c1.representative().scaled(1);
    for (int t = 0; t <= 1; ++t) {
        const Lattice mid = c2.representative().scaled(t);
        if (mid.contains(low) && c1.representative().contains(mid)) return true;
    }
    return false;
}

std::vector<Neighbor> neighbors(const LatticeClass& c, const Geometry& residue) {
    const Lattice& frame = c.representative();
    check_residue(residue, frame);
    const Lattice low = frame.scaled(1);
    std::vector<Neighbor> out;
    for (int r = 1; r <= residue.n(); ++r)
        for (const auto& s : residue.subspaces(r))
            out.push_back({s, LatticeClass(lattice_sum(low, lifts(s, frame)), c.n())});
    return out;
}

Subspace residue_subspace(const LatticeClass& c, const LatticeClass& y, const Geometry& residue) {
    const Lattice& frame = c.representative();
    check_residue(residue, frame);
    if (c == y) throw ParameterError("a vertex is not its own neighbour");
    const Lattice low = frame.scaled(1);
    for (int t = 0; t <= 1; ++t) {
        const Lattice mid = y.representative().scaled(t);
        if (!(mid.contains(low) && frame.contains(mid))) continue;
        gf::Rows rows;
        for (int j = 0; j < mid.dim(); ++j) {
            const Vector x = frame.coordinates(mid.column(j));
            rows.emplace_back();
            for (auto v : x) rows.back().push_back(static_cast<int>(mod(v, frame.prime())));
        }
        return *residue.span(rows);
    }
    throw ParameterError("vertex is not adjacent");
}

// ---------------------------------------------------------- DirectedEdge

std::string DirectedEdge::describe() const {
    std::ostringstream os;
    os << "origin " << origin.representative().to_string() << " type " << origin.type() << " -> target "
       << target.representative().to_string() << " type " << target.type();
    return os.str();
}

DirectedEdge make_edge(const LatticeClass& origin, const LatticeClass& target) {
    const int n = origin.n();
    if (origin == target) throw ParameterError("edge endpoints coincide");
    if (target.type() != (origin.type() + 1) % (n + 1))
        throw ParameterError("not an E1 edge: target type must be origin type + 1");
    const Lattice& upper = target.representative();
    const Lattice upper_p = upper.scaled(1);
    for (int t = 0; t <= 1; ++t) {
        Lattice lower = origin.representative().scaled(t);
        if (lower != upper && lower.contains(upper_p) && upper.contains(lower))
            return DirectedEdge{origin, target, std::move(lower), upper};
    }
    throw ParameterError("edge endpoints are not adjacent");
}

// ---------------------------------------------------------- chambers

std::vector<LatticeClass> ChamberChain::vertices() const {
    std::vector<LatticeClass> out;
    for (const auto& l : lattices) out.emplace_back(l, n);
    return out;
}

std::vector<DirectedEdge> ChamberChain::edges() const {
    const auto v = vertices();
    std::vector<DirectedEdge> out;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back(make_edge(v[i], v[i + 1]));
    out.push_back(make_edge(v.back(), LatticeClass(top, n)));
    return out;
}

ChamberChain chamber_chain(const Chamber& flag, const LatticeClass& base, const Geometry& residue) {
    const Lattice& frame = base.representative();
    check_residue(residue, frame);
    const int n = residue.n();
    bool complete = static_cast<int>(flag.flag.size()) == n;
    for (int i = 0; complete && i < n; ++i) {
        complete = flag.flag[static_cast<std::size_t>(i)].dim() == i + 1;
        if (complete && i > 0)
            complete = residue.contains(flag.flag[static_cast<std::size_t>(i)], flag.flag[static_cast<std::size_t>(i - 1)]);
    }
    if (!complete) throw ParameterError("chamber_chain needs a complete flag v1 < ... < vn");
    ChamberChain chain{{frame.scaled(1)}, frame, n};
    for (const auto& v : flag.flag) chain.lattices.push_back(lattice_sum(chain.lattices.front(), lifts(v, frame)));
    return chain;
}

int count_e1_pairs(const ChamberChain& chain) {
    const auto v = chain.vertices();
    int count = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (i != j && adjacent(v[i], v[j]) && v[j].type() == (v[i].type() + 1) % (chain.n + 1)) ++count;
    return count;
}

// ---------------------------------------------------------- lines

LineClass LineClass::normalized(int p, int precision, Vector v) {
    if (precision < 1) throw ParameterError("precision must be >= 1");
    const std::int64_t modulus = int_pow(p, precision);
    for (auto& x : v) x = mod(x, modulus);
    const auto unit = std::find_if(v.begin(), v.end(), [p](std::int64_t x) { return x % p != 0; });
    if (unit == v.end()) throw ParameterError("vector is not primitive");
    const std::int64_t inv = inverse_mod(*unit, modulus);
    for (auto& x : v) x = static_cast<std::int64_t>(static_cast<__int128>(x) * inv % modulus);
    return {std::move(v), precision};
}

LineClass LineClass::truncated(int p, int lower_precision) const {
    if (lower_precision > precision) throw PrecisionError(precision, lower_precision);
    return normalized(p, lower_precision, vector);
}

std::string LineClass::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < vector.size(); ++i) os << (i ? "," : "") << vector[i];
    os << ')';
    return os.str();
}

std::vector<LineClass> enumerate_lines(const LocalFieldParams& params, int precision) {
    params.check();
    if (precision < 1) throw ParameterError("precision must be >= 1");
    const int dim = params.dim();
    const std::int64_t modulus = int_pow(params.p, precision);
    std::vector<LineClass> out;
    Vector v(static_cast<std::size_t>(dim));
    for (int lead = 0; lead < dim; ++lead) {
        auto fill = [&](auto&& self, int i) -> void {
            if (i == dim) {
                out.push_back({v, precision});
                return;
            }
            if (i == lead) {
                v[static_cast<std::size_t>(i)] = 1;
                self(self, i + 1);
                return;
            }
            const std::int64_t step = i < lead ? params.p : 1;
            for (std::int64_t x = 0; x < modulus; x += step) {
                v[static_cast<std::size_t>(i)] = x;
                self(self, i + 1);
            }
        };
        fill(fill, 0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool omega_contains(const DirectedEdge& e, const LineClass& l) {
    const int required = e.depth() + 1;
    if (l.precision < required) throw PrecisionError(l.precision, required);
    const int p = e.lower.prime();
    const int bound = e.lower.exponent();
    int t = 0;
    Vector scaled = l.vector;
    while (t <= bound && !e.lower.contains(scaled)) {
        scaled = scale(scaled, p);
        ++t;
    }
    if (t == 0) return false;
    // p^{t-1} a generates l ∩ p^{-1} L0 after rescaling into the integral frame
    const Vector w = scale(l.vector, int_pow(p, t - 1));
    if (!e.upper.contains(w)) return false;
    return lattice_sum(e.lower, {w}) == e.upper;
}

// ---------------------------------------------------------- partitions

bool PartitionReport::ok() const {
    if (uncovered != 0 || multiply_covered != 0) return false;
    for (const auto& b : blocks)
        if (b.members.empty()) return false;
    if (kind == "PB") return blocks.size() == expected_blocks && criterion_mismatches == 0;
    if (kind == "PC") return static_cast<int>(blocks.size()) == params.n + 1;
    return true;
}

std::string PartitionReport::to_text() const {
    std::ostringstream os;
    os << "[partition " << kind << "]\n";
    os << "prime = " << params.p << "\n";
    os << "dim = " << params.n << "\n";
    os << "precision = " << precision << "\n";
    if (!parent.empty()) os << "parent-edge = " << parent << "\n";
    os << "lines = " << lines_examined << "\n";
    os << "blocks = " << blocks.size() << "\n";
    if (kind == "PB") {
        os << "expected-blocks = " << expected_blocks << "\n";
        os << "criterion-checked = " << criterion_checked << "\n";
        os << "criterion-mismatches = " << criterion_mismatches << "\n";
    }
    os << "uncovered = " << uncovered << "\n";
    os << "multiply-covered = " << multiply_covered << "\n";
    os << "status = " << (ok() ? "PASS" : "FAIL") << "\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        os << "block " << i << ": " << b.label << "; edge " << b.edge.describe() << "; size " << b.members.size();
        if (precision <= 2) {
            os << "; members";
            for (const auto& m : b.members) os << ' ' << m.to_string();
        }
        os << "\n";
    }
    return os.str();
}

namespace {

LocalFieldParams params_of(const Lattice& l) { return {l.prime(), l.dim() - 1}; }

void check_precision(const std::vector<DirectedEdge>& edges, int precision) {
    int required = 1;
    for (const auto& e : edges) required = std::max(required, e.depth() + 1);
    if (precision < required) throw PrecisionError(precision, required);
}

// Assigns every line to the blocks containing it; fills coverage counters.
void cover(PartitionReport& report, const std::vector<LineClass>& lines) {
    for (const auto& l : lines) {
        std::size_t hits = 0;
        for (auto& b : report.blocks)
            if (omega_contains(b.edge, l)) {
                b.members.push_back(l);
                ++hits;
            }
        if (hits == 0) ++report.uncovered;
        if (hits > 1) ++report.multiply_covered;
    }
    report.lines_examined = lines.size();
}

} // namespace

PartitionReport verify_partition_PA(const LatticeClass& vertex, int precision, const Geometry& residue) {
    PartitionReport report;
    report.kind = "PA";
    report.params = params_of(vertex.representative());
    report.precision = precision;
    std::vector<DirectedEdge> edges;
    for (const auto& nb : neighbors(vertex, residue))
        if (nb.subspace.dim() == 1) {
            edges.push_back(make_edge(vertex, nb.vertex));
            report.blocks.push_back({edges.back(), "point " + std::to_string(nb.subspace.index()), {}});
        }
    check_precision(edges, precision);
    cover(report, enumerate_lines(report.params, precision));
    return report;
}

PartitionReport verify_partition_PB(const DirectedEdge& e, int precision, const Geometry& residue) {
    const int required = e.depth() + 2;
    if (precision < required) throw PrecisionError(precision, required);
    PartitionReport report;
    report.kind = "PB";
    report.params = params_of(e.upper);
    report.precision = precision;
    report.parent = e.describe();
    report.expected_blocks = static_cast<std::size_t>(int_pow(report.params.p, report.params.n));

    const LatticeClass& x = e.target;
    const Subspace back = residue_subspace(x, e.origin, residue);
    if (back.dim() != residue.n()) throw std::logic_error("origin of an E1 edge must be a hyperplane at its target");

    std::vector<LineClass> parent_lines;
    for (const auto& l : enumerate_lines(report.params, precision))
        if (omega_contains(e, l)) parent_lines.push_back(l);
    const std::vector<LineClass>& in_parent = parent_lines; // sorted

    for (const auto& nb : neighbors(x, residue)) {
        if (nb.subspace.dim() != 1) continue;
        DirectedEdge next = make_edge(x, nb.vertex);
        std::size_t inside = 0, outside = 0;
        for (const auto& l : enumerate_lines(report.params, precision))
            if (omega_contains(next, l))
                (std::binary_search(in_parent.begin(), in_parent.end(), l) ? inside : outside)++;
        const bool subset = inside > 0 && outside == 0;
        const bool disjoint = inside == 0;
        const bool off_hyperplane = !residue.intersect(nb.subspace, back).has_value();
        ++report.criterion_checked;
        if (off_hyperplane ? !subset : !disjoint) ++report.criterion_mismatches;
        if (subset)
            report.blocks.push_back({std::move(next), "point " + std::to_string(nb.subspace.index()) + " off hyperplane " +
                                                          std::to_string(back.index()), {}});
    }
    cover(report, parent_lines);
    return report;
}

PartitionReport verify_partition_PC(const ChamberChain& chain, int precision) {
    PartitionReport report;
    report.kind = "PC";
    report.params = params_of(chain.top);
    report.precision = precision;
    const auto edges = chain.edges();
    check_precision(edges, precision);
    for (std::size_t i = 0; i < edges.size(); ++i) report.blocks.push_back({edges[i], "e" + std::to_string(i), {}});
    cover(report, enumerate_lines(report.params, precision));
    return report;
}

} // namespace antilde
