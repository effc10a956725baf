#include "antilde/presentation.hpp"

#include "antilde/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace antilde {

namespace {

std::string tuple_string(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

Tuple rotated(const Tuple& t, std::size_t k) {
    Tuple r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = t[(i + k) % t.size()];
    return r;
}

Tuple min_rotation(const Tuple& t) {
    Tuple best = t;
    for (std::size_t k = 1; k < t.size(); ++k) best = std::min(best, rotated(t, k));
    return best;
}

// inc[a][h]: point a lies in hyperplane h.
std::vector<std::vector<char>> point_hyperplane_incidence(const Geometry& g) {
    std::vector<std::vector<char>> inc(g.points().size(), std::vector<char>(g.hyperplanes().size(), 0));
    for (const auto& h : g.hyperplanes())
        for (const auto& a : g.points())
            inc[static_cast<std::size_t>(a.index())][static_cast<std::size_t>(h.index())] = g.contains(h, a) ? 1 : 0;
    return inc;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

int parse_int(const std::string& value, int line, const std::string& field) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) throw ParseError(line, field, "expected an integer, got '" + value + "'");
    return out;
}

std::vector<int> parse_int_array(const nlohmann::json& j, int line, const std::string& field) {
    if (!j.is_array()) throw ParseError(line, field, "expected an array of integers");
    std::vector<int> out;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw ParseError(line, field, "expected an array of integers");
        const auto v = x.get<std::int64_t>();
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            throw ParseError(line, field, "index out of range");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

} // namespace

PresentationData PresentationData::canonical() const {
    PresentationData out = *this;
    std::sort(out.tuples.begin(), out.tuples.end());
    return out;
}

// ------------------------------------------------------------- file format

PresentationData parse_presentation(const std::string& text) {
    std::map<std::string, std::pair<int, std::string>> fields;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(line, trim(s), "expected 'key = value'");
        const std::string key = trim(std::string_view(s).substr(0, eq));
        const std::string value = trim(std::string_view(s).substr(eq + 1));
        if (key != "format" && key != "n" && key != "q" && key != "lambda" && key != "S")
            throw ParseError(line, key, "unknown field");
        if (fields.contains(key)) throw ParseError(line, key, "duplicate field");
        fields[key] = {line, value};
    }
    for (const char* key : {"format", "n", "q", "lambda", "S"})
        if (!fields.contains(key)) throw ParseError(line + 1, key, "missing field");

    const auto& [format_line, format] = fields["format"];
    if (format != "antpres-1") throw ParseError(format_line, "format", "unsupported format '" + format + "'");

    PresentationData data;
    data.params.n = parse_int(fields["n"].second, fields["n"].first, "n");
    data.params.q = parse_int(fields["q"].second, fields["q"].first, "q");
    if (data.params.n < 1) throw ParseError(fields["n"].first, "n", "n must be >= 1");
    if (!is_prime(data.params.q)) throw ParseError(fields["q"].first, "q", "q must be prime");
    if (data.params.n > 8 || data.params.q > 101) throw ParseError(fields["n"].first, "n", "parameters too large");

    const std::int64_t points = gaussian_binomial(data.params.n + 1, 1, data.params.q);
    auto parse_json = [&](const std::string& key) {
        try {
            return nlohmann::json::parse(fields[key].second);
        } catch (const nlohmann::json::parse_error&) {
            throw ParseError(fields[key].first, key, "malformed array");
        }
    };

    const int lambda_line = fields["lambda"].first;
    data.lambda1 = parse_int_array(parse_json("lambda"), lambda_line, "lambda");
    if (static_cast<std::int64_t>(data.lambda1.size()) != points)
        throw ParseError(lambda_line, "lambda", "expected " + std::to_string(points) + " entries, got " +
                                                    std::to_string(data.lambda1.size()));
    for (std::size_t i = 0; i < data.lambda1.size(); ++i)
        if (data.lambda1[i] < 0 || data.lambda1[i] >= points)
            throw ParseError(lambda_line, "lambda", "entry " + std::to_string(i) + " = " + std::to_string(data.lambda1[i]) +
                                                        " out of range [0, " + std::to_string(points) + ")");

    const int s_line = fields["S"].first;
    const auto s = parse_json("S");
    if (!s.is_array()) throw ParseError(s_line, "S", "expected an array of tuples");
    std::set<Tuple> seen;
    for (std::size_t k = 0; k < s.size(); ++k) {
        Tuple t = parse_int_array(s[k], s_line, "S");
        if (static_cast<int>(t.size()) != data.params.n + 1)
            throw ParseError(s_line, "S", "tuple " + std::to_string(k) + " has length " + std::to_string(t.size()) +
                                              ", expected " + std::to_string(data.params.n + 1));
        for (int a : t)
            if (a < 0 || a >= points)
                throw ParseError(s_line, "S", "tuple " + std::to_string(k) + " index " + std::to_string(a) + " out of range");
        if (!seen.insert(t).second) throw ParseError(s_line, "S", "duplicate tuple " + tuple_string(t));
        data.tuples.push_back(std::move(t));
    }
    return data;
}

PresentationData load_presentation(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "file", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_presentation(ss.str());
}

std::string format_presentation(const PresentationData& data) {
    std::ostringstream os;
    os << "format = antpres-1\n";
    os << "n = " << data.params.n << "\n";
    os << "q = " << data.params.q << "\n";
    os << "lambda = [";
    for (std::size_t i = 0; i < data.lambda1.size(); ++i) os << (i ? ", " : "") << data.lambda1[i];
    os << "]\nS = [";
    const auto sorted = data.canonical().tuples;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        os << (k ? ", " : "") << '[';
        for (std::size_t i = 0; i < sorted[k].size(); ++i) os << (i ? ", " : "") << sorted[k][i];
        os << ']';
    }
    os << "]\n";
    return os.str();
}

void save_presentation(const PresentationData& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << format_presentation(data);
}

// -------------------------------------------------------------- validation

std::int64_t tuples_per_pair(const GeometryParams& params) {
    std::int64_t r = 1;
    for (int i = 1; i < params.n; ++i) r *= gaussian_binomial(i, 1, params.q);
    return r;
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    os << "[validation]\n";
    os << "tuples = " << tuple_count << "\n";
    os << "expected-tuples = " << expected_tuples << "\n";
    os << "cyclic-orbits = " << cyclic_orbits << "\n";
    os << "fixed-tuples = " << fixed_tuples << "\n";
    os << "failures = " << failures.size() << "\n";
    for (const auto& f : failures) os << "failure " << f.check << ": " << f.witness << "\n";
    os << "status = " << (ok() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

ValidationReport validate(const PresentationData& data, const Geometry& geometry) {
    ValidationReport report;
    if (data.params.n != geometry.n() || data.params.q != geometry.q()) {
        report.failures.push_back({"shape", "presentation parameters differ from the geometry"});
        return report;
    }
    const int n = data.params.n;
    const auto points = static_cast<int>(geometry.points().size());
    const auto hyperplanes = static_cast<int>(geometry.hyperplanes().size());
    report.tuple_count = data.tuples.size();
    report.expected_tuples = static_cast<std::size_t>(flag_count(n, data.params.q));

    if (static_cast<int>(data.lambda1.size()) != points) {
        report.failures.push_back({"shape", "lambda has " + std::to_string(data.lambda1.size()) + " entries, expected " +
                                                std::to_string(points)});
        return report;
    }
    for (int h : data.lambda1)
        if (h < 0 || h >= hyperplanes) {
            report.failures.push_back({"shape", "lambda entry " + std::to_string(h) + " out of range"});
            return report;
        }
    for (const auto& t : data.tuples) {
        const bool bad = static_cast<int>(t.size()) != n + 1 ||
                         std::any_of(t.begin(), t.end(), [&](int a) { return a < 0 || a >= points; });
        if (bad) {
            report.failures.push_back({"shape", "malformed tuple " + tuple_string(t)});
            return report;
        }
    }

    // V1
    {
        std::vector<int> preimage(static_cast<std::size_t>(hyperplanes), -1);
        std::size_t clashes = 0;
        std::string witness;
        for (int a = 0; a < points; ++a) {
            int& slot = preimage[static_cast<std::size_t>(data.lambda1[static_cast<std::size_t>(a)])];
            if (slot >= 0) {
                if (clashes++ == 0)
                    witness = "points " + std::to_string(slot) + " and " + std::to_string(a) + " both map to hyperplane " +
                              std::to_string(data.lambda1[static_cast<std::size_t>(a)]);
            } else {
                slot = a;
            }
        }
        if (clashes) report.failures.push_back({"V1", witness + "; " + std::to_string(clashes) + " collisions"});
    }

    const std::set<Tuple> members(data.tuples.begin(), data.tuples.end());
    std::set<Tuple> orbits;
    for (const auto& t : data.tuples) {
        orbits.insert(min_rotation(t));
        if (std::all_of(t.begin(), t.end(), [&](int a) { return a == t[0]; })) ++report.fixed_tuples;
    }
    report.cyclic_orbits = orbits.size();

    // V2
    {
        std::size_t missing = 0;
        std::string witness;
        for (const auto& t : data.tuples)
            for (std::size_t k = 1; k < t.size(); ++k) {
                const Tuple r = rotated(t, k);
                if (!members.contains(r) && missing++ == 0)
                    witness = "rotation " + tuple_string(r) + " of " + tuple_string(t) + " is absent";
            }
        if (missing) report.failures.push_back({"V2", witness + "; " + std::to_string(missing) + " missing rotations"});
    }

    // V3
    const auto inc = point_hyperplane_incidence(geometry);
    auto incident_pair = [&](int a, int b) {
        return inc[static_cast<std::size_t>(b)][static_cast<std::size_t>(data.lambda1[static_cast<std::size_t>(a)])] != 0;
    };
    {
        std::size_t bad = 0;
        std::string witness;
        for (const auto& t : data.tuples)
            for (std::size_t i = 0; i < t.size(); ++i) {
                const int a = t[i], b = t[(i + 1) % t.size()];
                if (!incident_pair(a, b) && bad++ == 0)
                    witness = "tuple " + tuple_string(t) + ": point " + std::to_string(b) + " not in lambda(" +
                              std::to_string(a) + ") = hyperplane " + std::to_string(data.lambda1[static_cast<std::size_t>(a)]);
            }
        if (bad) report.failures.push_back({"V3", witness + "; " + std::to_string(bad) + " violations"});
    }

    // V4
    if (report.tuple_count != report.expected_tuples)
        report.failures.push_back({"V4", std::to_string(report.tuple_count) + " tuples, expected " +
                                             std::to_string(report.expected_tuples)});

    // V5
    {
        std::map<std::pair<int, int>, std::int64_t> starts;
        for (const auto& t : data.tuples) ++starts[{t[0], t[1]}];
        const std::int64_t want = tuples_per_pair(data.params);
        std::size_t bad = 0;
        std::string witness;
        for (int a = 0; a < points; ++a)
            for (int b = 0; b < points; ++b) {
                if (!incident_pair(a, b)) continue;
                const auto it = starts.find({a, b});
                const std::int64_t got = it == starts.end() ? 0 : it->second;
                if (got != want && bad++ == 0)
                    witness = "pair (" + std::to_string(a) + "," + std::to_string(b) + ") starts " + std::to_string(got) +
                              " tuples, expected " + std::to_string(want);
            }
        if (bad) report.failures.push_back({"V5", witness + "; " + std::to_string(bad) + " pairs"});
    }
    return report;
}

// ------------------------------------------------------------------ search

std::vector<int> duality_lambda(const Geometry& geometry) {
    std::vector<int> lambda;
    for (const auto& a : geometry.points()) {
        const auto perp = gf::null_space({a.row(0)}, geometry.ambient(), geometry.q());
        lambda.push_back(geometry.span(perp)->index());
    }
    return lambda;
}

namespace {

struct Searcher {
    int points;
    std::vector<std::vector<char>> incident; // incident[a][b]: b in lambda(a)
    std::vector<std::vector<int>> on_line;   // on_line[a]: points of lambda(a), ascending
    std::vector<std::vector<char>> covered;
    std::vector<Tuple> chosen;
    std::size_t limit;
    SearchResult result;
    GeometryParams params;
    std::vector<int> lambda;

    bool next_uncovered(int& a, int& b) const {
        for (a = 0; a < points; ++a)
            for (int x : on_line[static_cast<std::size_t>(a)])
                if (!covered[static_cast<std::size_t>(a)][static_cast<std::size_t>(x)]) {
                    b = x;
                    return true;
                }
        return false;
    }

    void set(int a, int b, int c, char v) {
        covered[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
        covered[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = v;
        covered[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] = v;
    }

    // Returns false once the result limit is reached.
    bool run() {
        ++result.nodes;
        int a = 0, b = 0;
        if (!next_uncovered(a, b)) {
            PresentationData data{params, lambda, {}};
            for (const auto& t : chosen) {
                data.tuples.push_back(t);
                if (!(t[0] == t[1] && t[1] == t[2])) {
                    data.tuples.push_back(rotated(t, 1));
                    data.tuples.push_back(rotated(t, 2));
                }
            }
            result.presentations.push_back(data.canonical());
            return limit == 0 || result.presentations.size() < limit;
        }
        for (int c : on_line[static_cast<std::size_t>(b)]) {
            if (!incident[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)]) continue;
            const bool fixed = a == b && b == c;
            if (!fixed && (covered[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] ||
                           covered[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)]))
                continue;
            set(a, b, c, 1);
            chosen.push_back({a, b, c});
            const bool go_on = run();
            chosen.pop_back();
            set(a, b, c, 0);
            if (!go_on) return false;
        }
        return true;
    }
};

} // namespace

SearchResult search(const Geometry& geometry, const std::vector<int>& lambda1, std::size_t max_results) {
    if (geometry.n() != 2) throw ScopeError("search supports n = 2 only, got n = " + std::to_string(geometry.n()));
    const int points = static_cast<int>(geometry.points().size());
    if (static_cast<int>(lambda1.size()) != points) throw ParameterError("lambda has the wrong length");
    std::vector<char> hit(static_cast<std::size_t>(points), 0);
    for (int h : lambda1) {
        if (h < 0 || h >= points || hit[static_cast<std::size_t>(h)]) throw ParameterError("lambda must be a bijection");
        hit[static_cast<std::size_t>(h)] = 1;
    }

    const auto inc = point_hyperplane_incidence(geometry);
    Searcher s{points, {}, {}, {}, {}, max_results, {}, geometry.params(), lambda1};
    s.incident.assign(static_cast<std::size_t>(points), std::vector<char>(static_cast<std::size_t>(points), 0));
    s.on_line.resize(static_cast<std::size_t>(points));
    s.covered.assign(static_cast<std::size_t>(points), std::vector<char>(static_cast<std::size_t>(points), 0));
    for (int a = 0; a < points; ++a)
        for (int b = 0; b < points; ++b)
            if (inc[static_cast<std::size_t>(b)][static_cast<std::size_t>(lambda1[static_cast<std::size_t>(a)])]) {
                s.incident[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
                s.on_line[static_cast<std::size_t>(a)].push_back(b);
            }
    s.result.exhausted = s.run();
    return std::move(s.result);
}

std::optional<std::vector<int>> find_lambda(const Geometry& geometry) {
    if (geometry.n() != 2) throw ScopeError("find_lambda supports n = 2 only");
    const int q = geometry.q();
    const int points = static_cast<int>(geometry.points().size());
    auto apply = [q](const gf::Rows& m, const std::vector<int>& v) {
        std::vector<int> w(3, 0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                w[static_cast<std::size_t>(i)] = (w[static_cast<std::size_t>(i)] + m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)]) % q;
        return w;
    };
    // Companion matrices of x^3 + c2 x^2 + c1 x + c0; the first one whose
    // powers of e_1 reach every point is a Singer cycle.
    for (int c0 = 1; c0 < q; ++c0)
        for (int c1 = 0; c1 < q; ++c1)
            for (int c2 = 0; c2 < q; ++c2) {
                const gf::Rows companion{{0, 0, (q - c0) % q}, {1, 0, (q - c1) % q}, {0, 1, (q - c2) % q}};
                std::vector<std::vector<int>> orbit{{1, 0, 0}};
                for (int x = 1; x < points; ++x) orbit.push_back(apply(companion, orbit.back()));
                std::vector<int> exponent_of(static_cast<std::size_t>(points), -1);
                bool transitive = true;
                for (int x = 0; x < points && transitive; ++x) {
                    int& slot = exponent_of[static_cast<std::size_t>(geometry.span({orbit[static_cast<std::size_t>(x)]})->index())];
                    transitive = slot < 0;
                    slot = x;
                }
                if (!transitive) continue;
                std::vector<int> lines;
                for (int j = 0; j < points; ++j)
                    lines.push_back(geometry.span({orbit[static_cast<std::size_t>(j)], orbit[static_cast<std::size_t>((j + 1) % points)]})->index());
                for (int alpha = 1; alpha < points; ++alpha)
                    for (int beta = 0; beta < points; ++beta) {
                        std::vector<int> lambda(static_cast<std::size_t>(points));
                        std::vector<char> used(static_cast<std::size_t>(points), 0);
                        bool bijective = true;
                        for (int a = 0; a < points && bijective; ++a) {
                            const int x = exponent_of[static_cast<std::size_t>(a)];
                            const int h = lines[static_cast<std::size_t>((alpha * x + beta) % points)];
                            bijective = !used[static_cast<std::size_t>(h)];
                            used[static_cast<std::size_t>(h)] = 1;
                            lambda[static_cast<std::size_t>(a)] = h;
                        }
                        if (bijective && !search(geometry, lambda, 1).presentations.empty()) return lambda;
                    }
                return std::nullopt;
            }
    return std::nullopt;
}

// ----------------------------------------------------------------- triples

bool TripleSet::cyclically_closed() const {
    for (const auto& t : triples)
        if (!std::binary_search(triples.begin(), triples.end(), Triple{t[1], t[2], t[0]})) return false;
    return true;
}

bool TripleSet::type_sums_vanish(int n) const {
    return std::all_of(triples.begin(), triples.end(),
                       [n](const Triple& t) { return (t[0].dim + t[1].dim + t[2].dim) % (n + 1) == 0; });
}

TripleSet derive_triples(const PresentationData& data, const Geometry& geometry) {
    if (data.params.n != 2) throw ScopeError("derive_triples supports n = 2 only");
    const auto report = validate(data, geometry);
    if (!report.ok()) throw ValidationError("presentation fails validation: " + report.failures.front().check + " " +
                                            report.failures.front().witness);
    std::set<Triple> triples;
    std::set<std::pair<VertexRef, VertexRef>> pairs;
    auto lam = [&](int a) { return VertexRef{2, data.lambda1[static_cast<std::size_t>(a)]}; };
    for (const auto& t : data.tuples) {
        // Segments of length one: the tuple itself.
        triples.insert({VertexRef{1, t[0]}, VertexRef{1, t[1]}, VertexRef{1, t[2]}});
        // Segments of length two: g_{a1} g_{a2} = g_{lambda(a3)} and cyclically.
        triples.insert({lam(t[2]), lam(t[1]), lam(t[0])});
        // Split into lengths one and two: g_{a1} (g_{a2} g_{a3}) = 1.
        pairs.insert({VertexRef{1, t[0]}, lam(t[0])});
        pairs.insert({lam(t[0]), VertexRef{1, t[0]}});
    }
    return {{triples.begin(), triples.end()}, {pairs.begin(), pairs.end()}};
}

} // namespace antilde
