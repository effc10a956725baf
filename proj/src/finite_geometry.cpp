#include "antilde/finite_geometry.hpp"

#include "antilde/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace antilde {

bool is_prime(int value) noexcept {
    if (value < 2) return false;
    for (int d = 2; d * d <= value; ++d)
        if (value % d == 0) return false;
    return true;
}

void GeometryParams::check() const {
    if (n < 1) throw ParameterError("dimension parameter n must be >= 1, got " + std::to_string(n));
    if (!is_prime(q)) throw ParameterError("field order q must be prime, got " + std::to_string(q));
}

std::vector<int> Subspace::row(int i) const {
    auto first = basis_.begin() + static_cast<std::ptrdiff_t>(i) * ambient_;
    return {first, first + ambient_};
}

std::int64_t int_pow(std::int64_t base, int exp) {
    std::int64_t result = 1;
    for (int i = 0; i < exp; ++i)
        if (__builtin_mul_overflow(result, base, &result))
            throw OverflowError("int_pow overflow");
    return result;
}

std::int64_t gaussian_binomial(int n, int k, int q) {
    if (k < 0 || k > n) return 0;
    // prod_{i=0}^{k-1} (q^{n-i} - 1) / (q^{i+1} - 1); each partial quotient is integral
    std::int64_t num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        if (__builtin_mul_overflow(num, int_pow(q, n - i) - 1, &num))
            throw OverflowError("gaussian_binomial overflow");
        den *= int_pow(q, i + 1) - 1;
    }
    return num / den;
}

std::int64_t flag_count(int n, int q) {
    std::int64_t total = 1;
    for (int k = 1; k <= n; ++k) total *= (int_pow(q, k + 1) - 1) / (q - 1);
    return total;
}

namespace gf {

int inverse(int a, int q) {
    a %= q;
    if (a < 0) a += q;
    if (a == 0) throw ParameterError("zero has no inverse");
    // Fermat: a^{q-2}
    std::int64_t r = 1, b = a;
    for (int e = q - 2; e > 0; e >>= 1) {
        if (e & 1) r = r * b % q;
        b = b * b % q;
    }
    return static_cast<int>(r);
}

Rows rref(Rows rows, int q) {
    for (auto& r : rows)
        for (auto& x : r) x = ((x % q) + q) % q;
    const int m = static_cast<int>(rows.size());
    const int cols = m == 0 ? 0 : static_cast<int>(rows[0].size());
    int lead = 0;
    for (int c = 0; c < cols && lead < m; ++c) {
        int pivot = -1;
        for (int i = lead; i < m; ++i)
            if (rows[i][c] != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        std::swap(rows[lead], rows[pivot]);
        const int inv = inverse(rows[lead][c], q);
        for (auto& x : rows[lead]) x = x * inv % q;
        for (int i = 0; i < m; ++i) {
            if (i == lead || rows[i][c] == 0) continue;
            const int f = rows[i][c];
            for (int j = 0; j < cols; ++j)
                rows[i][j] = ((rows[i][j] - f * rows[lead][j]) % q + q) % q;
        }
        ++lead;
    }
    rows.resize(static_cast<std::size_t>(lead));
    return rows;
}

int rank(const Rows& rows, int q) { return static_cast<int>(rref(rows, q).size()); }

Rows null_space(const Rows& rows, int cols, int q) {
    const Rows r = rref(rows, q);
    std::vector<int> pivot_of_col(static_cast<std::size_t>(cols), -1);
    for (int i = 0; i < static_cast<int>(r.size()); ++i) {
        const auto it = std::find_if(r[i].begin(), r[i].end(), [](int x) { return x != 0; });
        pivot_of_col[static_cast<std::size_t>(it - r[i].begin())] = i;
    }
    Rows basis;
    for (int free = 0; free < cols; ++free) {
        if (pivot_of_col[free] >= 0) continue;
        std::vector<int> v(static_cast<std::size_t>(cols), 0);
        v[free] = 1;
        for (int c = 0; c < cols; ++c)
            if (pivot_of_col[c] >= 0) v[c] = (q - r[pivot_of_col[c]][free]) % q;
        basis.push_back(std::move(v));
    }
    return rref(std::move(basis), q);
}

} // namespace gf

namespace {

// All RREF r x cols matrices over F_q, flattened row-major.
void enumerate_rref(int r, int cols, int q, std::vector<std::vector<int>>& out) {
    std::vector<int> pivots(static_cast<std::size_t>(r));
    auto fill = [&](auto&& self, std::vector<int>& flat, std::vector<std::pair<int, int>>& free,
                    std::size_t k) -> void {
        if (k == free.size()) {
            out.push_back(flat);
            return;
        }
        for (int v = 0; v < q; ++v) {
            flat[static_cast<std::size_t>(free[k].first * cols + free[k].second)] = v;
            self(self, flat, free, k + 1);
        }
    };
    auto choose = [&](auto&& self, int start, int k) -> void {
        if (k == r) {
            std::vector<int> flat(static_cast<std::size_t>(r * cols), 0);
            std::vector<std::pair<int, int>> free;
            for (int i = 0; i < r; ++i) {
                flat[static_cast<std::size_t>(i * cols + pivots[i])] = 1;
                for (int c = pivots[i] + 1; c < cols; ++c)
                    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end())
                        free.emplace_back(i, c);
            }
            fill(fill, flat, free, 0);
            return;
        }
        for (int c = start; c < cols; ++c) {
            pivots[static_cast<std::size_t>(k)] = c;
            self(self, c + 1, k + 1);
        }
    };
    choose(choose, 0, 0);
}

gf::Rows rows_of(const Subspace& s) {
    gf::Rows rows;
    for (int i = 0; i < s.dim(); ++i) rows.push_back(s.row(i));
    return rows;
}

} // namespace

Geometry::Geometry(GeometryParams params) : params_(params) {
    params_.check();
    const int cols = ambient();
    by_dim_.resize(static_cast<std::size_t>(params_.n));
    index_.resize(static_cast<std::size_t>(params_.n));
    for (int r = 1; r <= params_.n; ++r) {
        std::vector<std::vector<int>> flats;
        enumerate_rref(r, cols, params_.q, flats);
        std::sort(flats.begin(), flats.end());
        auto& list = by_dim_[static_cast<std::size_t>(r - 1)];
        auto& idx = index_[static_cast<std::size_t>(r - 1)];
        for (int i = 0; i < static_cast<int>(flats.size()); ++i) {
            idx.emplace(flats[static_cast<std::size_t>(i)], i);
            list.emplace_back(r, cols, std::move(flats[static_cast<std::size_t>(i)]), i);
        }
    }
    above_.resize(static_cast<std::size_t>(params_.n));
    for (int r = 1; r <= params_.n; ++r) {
        auto& table = above_[static_cast<std::size_t>(r - 1)];
        table.resize(subspaces(r).size());
        if (r == params_.n) continue;
        for (const auto& u : subspaces(r))
            for (const auto& w : subspaces(r + 1))
                if (contains(w, u)) table[static_cast<std::size_t>(u.index())].push_back(w.index());
    }
}

const std::vector<Subspace>& Geometry::subspaces(int r) const {
    if (r < 1 || r > params_.n)
        throw ParameterError("subspace dimension " + std::to_string(r) + " outside 1.." +
                             std::to_string(params_.n));
    return by_dim_[static_cast<std::size_t>(r - 1)];
}

const Subspace& Geometry::subspace(int r, int index) const {
    const auto& list = subspaces(r);
    if (index < 0 || index >= static_cast<int>(list.size()))
        throw ParameterError("subspace index " + std::to_string(index) + " out of range for dimension " +
                             std::to_string(r));
    return list[static_cast<std::size_t>(index)];
}

Subspace Geometry::lookup(int dim, const std::vector<int>& flat) const {
    const auto& idx = index_[static_cast<std::size_t>(dim - 1)];
    return subspace(dim, idx.at(flat));
}

SubspaceOrZero Geometry::span(const gf::Rows& rows) const {
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != ambient()) throw ParameterError("vector length mismatch");
    const gf::Rows reduced = gf::rref(rows, params_.q);
    const int dim = static_cast<int>(reduced.size());
    if (dim == 0) return std::nullopt;
    if (dim == ambient()) throw ParameterError("rows span the whole space");
    std::vector<int> flat;
    for (const auto& r : reduced) flat.insert(flat.end(), r.begin(), r.end());
    return lookup(dim, flat);
}

SubspaceOrZero Geometry::intersect(const Subspace& u, const Subspace& v) const {
    // u ∩ v = (u^⊥ + v^⊥)^⊥
    gf::Rows perp = gf::null_space(rows_of(u), ambient(), params_.q);
    const gf::Rows pv = gf::null_space(rows_of(v), ambient(), params_.q);
    perp.insert(perp.end(), pv.begin(), pv.end());
    return span(gf::null_space(perp, ambient(), params_.q));
}

bool Geometry::contains(const Subspace& outer, const Subspace& inner) const {
    if (inner.dim() > outer.dim()) return false;
    gf::Rows rows = rows_of(outer);
    for (int i = 0; i < inner.dim(); ++i) rows.push_back(inner.row(i));
    return gf::rank(rows, params_.q) == outer.dim();
}

bool Geometry::incident(const Subspace& u, const Subspace& v) const {
    if (u == v) throw ParameterError("incidence is defined for distinct subspaces");
    return contains(u, v) || contains(v, u);
}

Subspace Geometry::dual(const Subspace& u) const {
    return *span(gf::null_space(rows_of(u), ambient(), params_.q));
}

const std::vector<int>& Geometry::superspaces(const Subspace& u) const {
    return above_[static_cast<std::size_t>(u.dim() - 1)][static_cast<std::size_t>(u.index())];
}

std::int64_t Geometry::count_points_off_hyperplane() const {
    std::optional<std::int64_t> common;
    for (const auto& h : hyperplanes()) {
        std::int64_t off = 0;
        for (const auto& b : points())
            if (!intersect(b, h)) ++off;
        if (common && *common != off)
            throw FalsificationError("points off hyperplane " + std::to_string(h.index()) + ": " +
                                     std::to_string(off) + " != " + std::to_string(*common));
        common = off;
    }
    return *common;
}

std::vector<Chamber> Geometry::chambers() const {
    std::vector<Chamber> out;
    std::vector<Subspace> flag;
    auto extend = [&](auto&& self) -> void {
        if (static_cast<int>(flag.size()) == params_.n) {
            out.push_back(Chamber{flag});
            return;
        }
        const int r = static_cast<int>(flag.size()) + 1;
        if (flag.empty()) {
            for (const auto& p : points()) {
                flag.push_back(p);
                self(self);
                flag.pop_back();
            }
            return;
        }
        for (int idx : superspaces(flag.back())) {
            flag.push_back(subspace(r, idx));
            self(self);
            flag.pop_back();
        }
    };
    extend(extend);
    return out;
}

std::string Geometry::export_table() const {
    std::ostringstream os;
    for (int r = 1; r <= params_.n; ++r)
        for (const auto& s : subspaces(r)) {
            os << s.index() << '\t' << s.dim() << '\t';
            for (std::size_t i = 0; i < s.basis().size(); ++i) os << (i ? " " : "") << s.basis()[i];
            os << '\n';
        }
    return os.str();
}

std::string Geometry::table_checksum() const {
    const std::string table = export_table();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(table.data(), table.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

} // namespace antilde
