#include "antilde/cli.hpp"

#include "antilde/coinvariants.hpp"
#include "antilde/errors.hpp"
#include "antilde/finite_geometry.hpp"
#include "antilde/padic_building.hpp"
#include "antilde/presentation.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace antilde {

const std::vector<std::string>& RunConfig::commands() {
    static const std::vector<std::string> names{"geometry", "building-verify", "validate", "search",
                                                "coinvariants", "abelianization", "certify", "all"};
    return names;
}

bool RunConfig::within_envelope() const noexcept { return n == 2 && (p == 2 || p == 3) && precision <= 3; }

namespace {

// A stage failed for configuration reasons; maps to exit status 2.
struct ConfigFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Runner {
public:
    Runner(const RunConfig& config, std::ostream& log, std::ostream& err)
        : config_(config), log_(log), err_(err), geometry_(GeometryParams{config.n, config.p}) {}

    int run() {
        const auto& c = config_.command;
        bool ok = true;
        if (c == "geometry" || c == "all") ok = geometry_stage() && ok;
        if (c == "building-verify" || c == "all") ok = building_stage() && ok;
        if (c == "search" || c == "all") ok = search_stage() && ok;
        if (c == "validate" || c == "all") ok = validate_stage() && ok;
        if (c == "coinvariants" || c == "all") ok = coinvariants_stage() && ok;
        if (c == "abelianization" || c == "all") ok = abelianization_stage() && ok;
        if (c == "certify" || c == "all") ok = certify_stage() && ok;
        return ok ? kExitOk : kExitAssertion;
    }

private:
    std::string header(const std::string& stage) const {
        std::ostringstream os;
        os << "format-version = " << kReportFormatVersion << "\n";
        os << "stage = " << stage << "\n";
        os << "command = " << config_.command << "\n";
        os << "dim = " << config_.n << "\n";
        os << "prime = " << config_.p << "\n";
        os << "precision = " << config_.precision << "\n";
        os << "presentation = " << (config_.presentation ? config_.presentation->string() : "-") << "\n";
        os << "max-results = " << config_.max_results << "\n";
        os << "seed = " << config_.seed << "\n";
        os << "unbounded = " << (config_.unbounded ? "yes" : "no") << "\n";
        os << "table-checksum = " << geometry_.table_checksum() << "\n";
        os << "\n";
        return os.str();
    }

    bool write(const std::string& stage, const std::string& file, const std::string& body, bool ok) {
        const auto path = config_.out / file;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigFailure("cannot write " + path.string());
        out << header(stage) << body << "\nresult = " << (ok ? "PASS" : "FAIL") << "\n";
        log_ << stage << ": " << (ok ? "PASS" : "FAIL") << " (" << path.string() << ")\n";
        return ok;
    }

    bool geometry_stage() {
        std::ostringstream os;
        bool ok = true;
        const int n = config_.n, q = config_.p;
        os << "[counts]\n";
        for (int r = 1; r <= n; ++r) {
            const auto got = static_cast<std::int64_t>(geometry_.count(r));
            const auto want = gaussian_binomial(n + 1, r, q);
            ok = ok && got == want;
            os << "subspaces-dim-" << r << " = " << got << " (expected " << want << ")\n";
        }
        const auto points = static_cast<std::int64_t>(geometry_.points().size());
        const auto point_formula = (int_pow(q, n + 1) - 1) / (q - 1);
        ok = ok && points == point_formula;
        os << "points-formula = " << point_formula << "\n";
        std::int64_t off = 0;
        try {
            off = geometry_.count_points_off_hyperplane();
        } catch (const FalsificationError& e) {
            os << "points-off-hyperplane-witness = " << e.what() << "\n";
            ok = false;
        }
        ok = ok && off == int_pow(q, n);
        os << "points-off-hyperplane = " << off << " (expected " << int_pow(q, n) << ")\n";
        const auto chambers = static_cast<std::int64_t>(geometry_.chambers().size());
        ok = ok && chambers == flag_count(n, q);
        os << "chambers = " << chambers << " (expected " << flag_count(n, q) << ")\n";
        std::size_t duality_failures = 0;
        for (int r = 1; r <= n; ++r)
            for (const auto& u : geometry_.subspaces(r))
                if (!(geometry_.dual(geometry_.dual(u)) == u)) ++duality_failures;
        ok = ok && duality_failures == 0;
        os << "duality-involution-failures = " << duality_failures << "\n";
        if (points <= 40) os << "[table]\n" << geometry_.export_table();
        return write("geometry", "geometry.txt", os.str(), ok);
    }

    bool building_stage() {
        const LocalFieldParams params{config_.p, config_.n};
        const int m = config_.precision;
        std::ostringstream os;
        bool ok = true;
        try {
            const auto v0 = base_vertex(params);
            const auto chambers = geometry_.chambers();
            std::size_t bad = 0;
            for (const auto& c : chambers)
                if (count_e1_pairs(chamber_chain(c, v0, geometry_)) != config_.n + 1) ++bad;
            ok = bad == 0;
            os << "[chamber-edges]\nchambers = " << chambers.size() << "\nexpected-e1-pairs = " << config_.n + 1
               << "\nchambers-violating = " << bad << "\n\n";

            auto add = [&](const PartitionReport& r) {
                ok = ok && r.ok();
                os << r.to_text() << "\n";
            };
            add(verify_partition_PA(v0, m, geometry_));

            std::mt19937_64 rng(config_.seed);
            const auto nbrs = neighbors(v0, geometry_);
            const auto& base_point = nbrs.front();
            add(verify_partition_PB(make_edge(v0, base_point.vertex), m, geometry_));
            const auto& random_point = geometry_.points()[rng() % geometry_.points().size()];
            for (const auto& nb : nbrs)
                if (nb.subspace == random_point && !(nb.subspace == base_point.subspace))
                    add(verify_partition_PB(make_edge(v0, nb.vertex), m, geometry_));

            add(verify_partition_PC(chamber_chain(chambers.front(), v0, geometry_), m));
            const auto& random_chamber = chambers[rng() % chambers.size()];
            add(verify_partition_PC(chamber_chain(random_chamber, v0, geometry_), m));
        } catch (const PrecisionError& e) {
            os << "precision-error = " << e.what() << "\nrequired-precision = " << e.required() << "\n";
            write("building-verify", "building.txt", os.str(), false);
            throw ConfigFailure(std::string(e.what()) + " (use --precision " + std::to_string(e.required()) + ")");
        }
        return write("building-verify", "building.txt", os.str(), ok);
    }

    std::vector<int> lambda() {
        if (!lambda_) {
            const auto found = find_lambda(geometry_);
            if (!found) throw ConfigFailure("no lambda with a presentation found in the scanned family");
            lambda_ = *found;
        }
        return *lambda_;
    }

    const SearchResult& searched() {
        if (!searched_) searched_ = search(geometry_, lambda(), config_.max_results);
        return *searched_;
    }

    // The presentations later stages work on: the file given, or the search results.
    const std::vector<PresentationData>& presentations() {
        if (!inputs_) {
            if (config_.presentation) {
                auto data = load_presentation(*config_.presentation);
                if (!(data.params == geometry_.params()))
                    throw ConfigFailure("presentation file has n = " + std::to_string(data.params.n) + ", q = " +
                                        std::to_string(data.params.q) + " but the run uses n = " +
                                        std::to_string(config_.n) + ", p = " + std::to_string(config_.p));
                inputs_ = std::vector<PresentationData>{std::move(data)};
            } else {
                inputs_ = searched().presentations;
            }
        }
        return *inputs_;
    }

    bool search_stage() {
        const auto& r = searched();
        std::ostringstream os;
        os << "[search]\nlambda = [";
        const auto lam = lambda();
        for (std::size_t i = 0; i < lam.size(); ++i) os << (i ? ", " : "") << lam[i];
        os << "]\nresults = " << r.presentations.size() << "\nnodes = " << r.nodes
           << "\nexhausted = " << (r.exhausted ? "yes" : "no") << "\n";
        for (std::size_t k = 0; k < r.presentations.size(); ++k) {
            const std::string file = "presentation-" + std::to_string(k) + ".txt";
            save_presentation(r.presentations[k], config_.out / file);
            os << "file-" << k << " = " << file << "\n";
        }
        return write("search", "search.txt", os.str(), !r.presentations.empty());
    }

    bool validate_stage() {
        std::ostringstream os;
        bool ok = !presentations().empty();
        for (std::size_t k = 0; k < presentations().size(); ++k) {
            const auto report = validate(presentations()[k], geometry_);
            ok = ok && report.ok();
            os << "## presentation " << k << "\n" << report.to_text() << "\n";
        }
        return write("validate", "validation.txt", os.str(), ok);
    }

    // Runs `body` for each valid presentation; invalid ones fail the stage
    // with their first witness.
    template <typename F>
    bool per_presentation(std::ostringstream& os, F&& body) {
        bool ok = !presentations().empty();
        for (std::size_t k = 0; k < presentations().size(); ++k) {
            os << "## presentation " << k << "\n";
            const auto& data = presentations()[k];
            const auto report = validate(data, geometry_);
            if (!report.ok()) {
                os << "invalid = " << report.failures.front().check << " " << report.failures.front().witness << "\n\n";
                ok = false;
                continue;
            }
            ok = body(data) && ok;
            os << "\n";
        }
        return ok;
    }

    bool coinvariants_stage() {
        std::ostringstream os;
        const auto ca = assemble_relations(geometry_, lambda_for_bound(), {}, {true, true, false});
        const mpz_class bound = mpz_class(int_pow(config_.p, config_.n) - 1);
        const bool ca_bound = epsilon_multiple_in_lattice(ca, bound);
        os << "[ca-epsilon-bound]\nmultiple = " << bound << "\nin-lattice = " << (ca_bound ? "yes" : "no") << "\n\n";
        const bool ok = per_presentation(os, [&](const PresentationData& data) {
            const auto r = coinvariants_report(data, geometry_);
            os << r.to_text();
            return r.ok();
        });
        return write("coinvariants", "coinvariants.txt", os.str(), ok && ca_bound);
    }

    std::vector<int> lambda_for_bound() {
        if (config_.n == 2 && (config_.presentation || lambda_)) return presentations().front().lambda1;
        return duality_lambda(geometry_);
    }

    bool abelianization_stage() {
        std::ostringstream os;
        const bool ok = per_presentation(os, [&](const PresentationData& data) {
            const auto theta = theta_check(data, geometry_);
            os << "[abelianization]\nstructure = " << theta.abelianization.to_string()
               << "\nfree-rank = " << theta.abelianization.free_rank << "\n";
            os << "[theta-check]\nquotient-by-epsilon = " << theta.quotient.to_string()
               << "\nstacked = " << theta.stacked.to_string()
               << "\nstacked-agrees = " << (theta.stacked_agrees ? "yes" : "no")
               << "\nquotient-of-abelianization = " << (theta.quotient_of_abelianization ? "yes" : "no") << "\n";
            return theta.ok() && theta.abelianization.finite();
        });
        return write("abelianization", "abelianization.txt", os.str(), ok);
    }

    bool certify_stage() {
        std::ostringstream os;
        std::size_t certified = 0;
        const bool ok = per_presentation(os, [&](const PresentationData& data) {
            const auto group = presented_group(data, geometry_);
            const auto cert = distribution_certificate(group);
            os << "group = " << group.to_string() << "\nverdict = " << cert.verdict_name() << "\n";
            if (cert.verdict != Verdict::Certified) os << "witness = free rank " << cert.free_rank << "\n";
            else ++certified;
            return cert.verdict == Verdict::Certified;
        });
        os << "[summary]\ncertified = " << certified << " of " << presentations().size() << "\n";
        os << "verdict = " << (ok ? "CERTIFIED" : "INCONCLUSIVE") << "\n";
        return write("certify", "certificate.txt", os.str(), ok);
    }

    const RunConfig& config_;
    std::ostream& log_;
    std::ostream& err_;
    Geometry geometry_;
    std::optional<std::vector<int>> lambda_;
    std::optional<SearchResult> searched_;
    std::optional<std::vector<PresentationData>> inputs_;
};

} // namespace

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
    const auto& names = RunConfig::commands();
    if (std::find(names.begin(), names.end(), config.command) == names.end()) {
        err << "error: unknown command '" << config.command << "'\n";
        return kExitConfig;
    }
    if (config.n < 2) {
        err << "error: --dim must be >= 2\n";
        return kExitConfig;
    }
    if (!is_prime(config.p)) {
        err << "error: --prime must be prime\n";
        return kExitConfig;
    }
    if (config.precision < 1) {
        err << "error: --precision must be >= 1\n";
        return kExitConfig;
    }
    if (!config.within_envelope()) {
        if (!config.unbounded) {
            err << "error: parameters outside the desk-scale envelope (n = 2, p in {2, 3}, m <= 3); pass --unbounded to run anyway\n";
            return kExitConfig;
        }
        err << "warning: running outside the desk-scale envelope; this may take a long time\n";
    }
    std::error_code ec;
    std::filesystem::create_directories(config.out, ec);
    if (ec) {
        err << "error: cannot create " << config.out.string() << ": " << ec.message() << "\n";
        return kExitConfig;
    }
    try {
        Runner runner(config, log, err);
        const int status = runner.run();
        if (status != kExitOk) err << "error: at least one stage failed; see the reports in " << config.out.string() << "\n";
        return status;
    } catch (const ConfigFailure& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ScopeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PrecisionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FalsificationError& e) {
        err << "falsified: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitAssertion;
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Finite-geometry, building and coinvariant computations for A~_n groups"};
    RunConfig config;
    std::string presentation;
    std::string out = ".";
    app.add_option("command", config.command, "Stage to run")->required()->check(CLI::IsMember(RunConfig::commands()));
    app.add_option("--dim", config.n, "Dimension parameter n");
    app.add_option("--prime", config.p, "Prime p (residue order q = p)");
    app.add_option("--precision", config.precision, "p-adic precision m for line classes");
    app.add_option("--presentation", presentation, "Presentation file (antpres-1)");
    app.add_option("--out", out, "Directory for the reports");
    app.add_option("--seed", config.seed, "Seed for randomized sweeps");
    app.add_option("--max-results", config.max_results, "Stop search after this many presentations (0: all)");
    app.add_flag("--unbounded", config.unbounded, "Allow parameters outside the desk-scale envelope");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    if (!presentation.empty()) config.presentation = presentation;
    config.out = out;
    return run(config, std::cout, std::cerr);
}

} // namespace antilde
