// k3dyn: command-line front end for the lattice, dynamics, mod-p and measure
// modules. Machine-readable output (JSON or CSV) by default, tables with --human.
// Exit codes: 0 success, 1 domain or format error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "k3dyn/io.hpp"
#include "k3dyn/measures.hpp"
#include "k3dyn/modp.hpp"

using namespace k3dyn;

namespace {

struct Options {
    bool human = false;

    // picard
    std::string input;
    std::string fixture;
    unsigned long power = 1;
    std::size_t map_index = 0;

    // chebyshev
    std::string q = "4";

    // wehler
    std::string surface;
    std::string point;
    long steps = 5;
    unsigned depth = 8;
    std::optional<unsigned> truncate;
    std::string walk = "involutions";
    long bound = 2;
    bool quadratic = false;
    unsigned long max_period = 64;
    double max_height = 200.0;

    // modp
    std::vector<std::uint32_t> primes;

    // measure
    std::string points_file;
    std::string tag = "cloud";
    std::string chart = "x0y0";
    std::string cloud_a;
    std::string cloud_b;
    unsigned grid = 4;

    std::string output;
};

/// Writes to --output when given, otherwise stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw FormatError(path, "cannot open for writing");
        }
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(const Options& o, const json& j) {
    Sink sink(o.output);
    sink.out() << io::dump_compact(j);
}

std::string class_str(const PicardClass& c) { return to_string(c); }

// ---------------------------------------------------------------------------
// picard

LatticeSystemFile lattice_input(const Options& o) {
    if (!o.input.empty() && !o.fixture.empty()) throw CLI::ValidationError("give either --input or --fixture, not both");
    if (!o.fixture.empty()) {
        const auto& f = lattice_fixture(o.fixture);
        return {f.system, f.cone};
    }
    if (!o.input.empty()) return load_lattice_system(o.input);
    throw CLI::ValidationError("one of --input or --fixture is required");
}

void print_polarization_human(std::ostream& os, const PolarizationResult& r, const IntMatrix& tensor) {
    os << "maps: " << r.map_count << "\n";
    os << "tensor sum:\n";
    for (std::size_t i = 0; i < tensor.rows(); ++i) {
        os << "  ";
        for (std::size_t k = 0; k < tensor.cols(); ++k) os << std::setw(8) << tensor(i, k).get_str();
        os << "\n";
    }
    if (r.polarizable()) {
        os << "polarizable\n";
        for (const auto& c : r.certificates)
            os << "  q = " << to_string(c.q) << "  witness " << class_str(c.witness)
               << "  eigenspace dim " << c.eigenbasis.size() << (c.verified ? "  verified" : "") << "\n";
    } else {
        os << "not polarizable\n";
    }
    os << "eigenvalues:\n";
    os << "  " << std::left << std::setw(12) << "value" << std::setw(6) << "mult" << std::setw(28) << "basis"
       << "cone witness\n";
    for (const auto& d : r.diagnostics) {
        std::string basis;
        for (const auto& b : d.basis) basis += (basis.empty() ? "" : " ") + class_str(b);
        os << "  " << std::setw(12) << to_string(d.eigenvalue) << std::setw(6) << d.multiplicity << std::setw(28)
           << basis << (d.cone_witness ? class_str(*d.cone_witness) : "-") << "\n";
    }
    os << std::right;
}

int run_polarization(const Options& o, const MorphismSystem& system, const Cone& cone, json extra) {
    auto result = find_polarizations(system, cone);
    IntMatrix tensor = tensor_sum(system);
    if (o.human) {
        Sink sink(o.output);
        print_polarization_human(sink.out(), result, tensor);
    } else {
        json j = std::move(extra);
        json body = polarization_json(result, tensor);
        for (auto& [k, v] : body.items()) j[k] = v;
        emit_json(o, j);
    }
    return 0;
}

int picard_check(const Options& o) {
    auto in = lattice_input(o);
    return run_polarization(o, in.system, in.cone, json::object());
}

int picard_dump(const Options& o) {
    const auto& f = lattice_fixture(o.fixture);
    emit_json(o, lattice_system_json(f.system, f.cone));
    return 0;
}

int picard_list(const Options& o) {
    if (o.human) {
        Sink sink(o.output);
        for (const auto& f : lattice_fixtures())
            sink.out() << std::left << std::setw(20) << f.key << f.description << "\n";
        return 0;
    }
    json arr = json::array();
    for (const auto& f : lattice_fixtures()) arr.push_back({{"key", f.key}, {"description", f.description}});
    emit_json(o, arr);
    return 0;
}

int picard_power(const Options& o) {
    auto in = lattice_input(o);
    if (o.map_index >= in.system.maps.size())
        throw InvalidArgument("--map " + std::to_string(o.map_index) + " out of range; the system has " +
                              std::to_string(in.system.maps.size()) + " maps");
    MorphismSystem pair = power_pair(in.system.maps[o.map_index], o.power);
    json extra = json::object();
    extra["map"] = in.system.maps[o.map_index].label;
    extra["m"] = o.power;
    return run_polarization(o, pair, in.cone, std::move(extra));
}

// ---------------------------------------------------------------------------
// chebyshev

Rational parse_rational(const std::string& s) {
    static const std::regex re(R"(^[+-]?\d+(/\d+)?$)");
    if (!std::regex_match(s, re)) throw CLI::ValidationError("-q", "expected an integer or a fraction a/b, got '" + s + "'");
    Rational q(s[0] == '+' ? s.substr(1) : s);
    if (q.get_den() == 0) throw CLI::ValidationError("-q", "zero denominator");
    q.canonicalize();
    return q;
}

int chebyshev(const Options& o) {
    Rational q = parse_rational(o.q);
    Rational v = chebyshev_degree(q, o.power);
    Sink sink(o.output);
    if (o.human)
        sink.out() << "q_" << o.power << " = " << to_string(v) << "  (q = " << to_string(q) << ")\n";
    else
        sink.out() << io::rational_json(v).dump() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// wehler

RationalPoint point_on(const WehlerSurface& s, const std::string& literal) {
    RationalPoint p = parse_rational_point(literal);
    if (!on_surface(s, p)) throw InvalidArgument("point " + to_string(p) + " is not on the surface");
    return p;
}

int wehler_validate(const Options& o) {
    auto s = load_surface(o.surface);
    auto diag = validate_surface(s);
    Sink sink(o.output);
    if (o.human) {
        sink.out() << diag.summary() << "\n";
    } else {
        json j;
        j["degenerate"] = diag.degenerate();
        j["findings"] = diag.findings;
        j["summary"] = diag.summary();
        sink.out() << io::dump_compact(j);
    }
    return diag.degenerate() ? 1 : 0;
}

int wehler_orbit(const Options& o) {
    auto s = load_surface(o.surface);
    auto p = point_on(s, o.point);
    auto seg = orbit_segment(s, p, o.steps);
    Sink sink(o.output);
    if (o.human) {
        for (long k = -seg.n; k <= seg.n; ++k)
            sink.out() << std::setw(5) << k << "  " << std::setw(12) << std::fixed << std::setprecision(6)
                       << naive_height(seg.at(k)) << "  " << to_string(seg.at(k)) << "\n";
        return 0;
    }
    sink.out() << "k,point,naive_height\n";
    for (long k = -seg.n; k <= seg.n; ++k)
        sink.out() << k << ',' << to_string(seg.at(k)) << ',' << format_double(naive_height(seg.at(k))) << '\n';
    return 0;
}

HeightWalk parse_walk(const std::string& w) {
    if (w == "involutions") return HeightWalk::Involutions;
    if (w == "sigma") return HeightWalk::Sigma;
    throw CLI::ValidationError("--walk", "expected 'involutions' or 'sigma'");
}

int wehler_canheight(const Options& o) {
    auto s = load_surface(o.surface);
    auto p = point_on(s, o.point);
    HeightOptions ho{parse_walk(o.walk), o.truncate};
    auto est = canonical_height(s, p, o.depth, ho);
    Sink sink(o.output);
    if (o.human) {
        sink.out() << "h_hat_" << est.depth << " = " << format_double(est.value) << "  (q = " << to_string(est.q)
                   << ", walk " << o.walk << ")\n";
        if (est.delta) sink.out() << "delta = " << format_double(*est.delta) << "\n";
        if (o.truncate) sink.out() << "dropped mass = " << format_double(est.dropped_mass) << "\n";
        return 0;
    }
    json j;
    j["point"] = to_string(p);
    j["walk"] = o.walk;
    j["q"] = io::rational_json(est.q);
    j["depth"] = est.depth;
    j["value"] = est.value;
    j["delta"] = est.delta ? json(*est.delta) : json(nullptr);
    j["dropped_mass"] = est.dropped_mass;
    j["naive_height"] = naive_height(p);
    sink.out() << io::dump_compact(j);
    return 0;
}

int wehler_search(const Options& o) {
    auto s = load_surface(o.surface);
    auto res = search_points(s, o.bound, o.quadratic);
    Sink sink(o.output);
    if (o.human) {
        sink.out() << res.rational.size() << " rational points with |x_i| <= " << o.bound << "\n";
        for (const auto& p : res.rational)
            sink.out() << "  " << std::setw(10) << std::fixed << std::setprecision(4) << naive_height(p) << "  "
                       << to_string(p) << "\n";
        if (o.quadratic) {
            sink.out() << res.quadratic.size() << " quadratic points\n";
            for (const auto& p : res.quadratic) sink.out() << "  " << to_string(p) << "\n";
        }
        if (res.degenerate_fibers) sink.out() << res.degenerate_fibers << " degenerate fibers skipped\n";
        return 0;
    }
    json j;
    j["bound"] = o.bound;
    json pts = json::array();
    for (const auto& p : res.rational) pts.push_back({{"point", to_string(p)}, {"naive_height", naive_height(p)}});
    j["rational"] = std::move(pts);
    if (o.quadratic) {
        json q = json::array();
        for (const auto& p : res.quadratic) q.push_back(to_string(p));
        j["quadratic"] = std::move(q);
    }
    j["degenerate_fibers"] = res.degenerate_fibers;
    sink.out() << io::dump_compact(j);
    return 0;
}

int wehler_periodic(const Options& o) {
    auto s = load_surface(o.surface);
    auto p = point_on(s, o.point);
    auto period = detect_periodic(s, p, o.max_period, o.max_height);
    Sink sink(o.output);
    if (o.human) {
        if (period)
            sink.out() << to_string(p) << " has period " << *period << "\n";
        else
            sink.out() << to_string(p) << ": no period up to " << o.max_period << "\n";
        return 0;
    }
    json j;
    j["point"] = to_string(p);
    j["period"] = period ? json(*period) : json(nullptr);
    j["max_period"] = o.max_period;
    sink.out() << io::dump_compact(j);
    return 0;
}

// ---------------------------------------------------------------------------
// modp

int modp_cycles(const Options& o) {
    auto s = load_surface(o.surface);
    auto report = periodic_report(s, o.primes);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    Sink sink(o.output);
    if (o.human) {
        sink.out() << std::setw(7) << "p" << std::setw(8) << "total" << std::setw(8) << "good" << std::setw(8) << "bad"
                   << std::setw(8) << "cycles" << std::setw(10) << "max" << std::setw(10) << "mean" << "\n";
        for (const auto& r : report.rows)
            sink.out() << std::setw(7) << r.p << std::setw(8) << r.total << std::setw(8) << r.good << std::setw(8)
                       << r.bad << std::setw(8) << r.cycles << std::setw(10) << r.max_cycle << std::setw(10)
                       << std::fixed << std::setprecision(4) << r.mean_cycle << "\n";
    } else {
        write_report_csv(sink.out(), report);
    }
    return report.rows.empty() ? 1 : 0;
}

// ---------------------------------------------------------------------------
// measure

int measure_cloud(const Options& o) {
    Chart chart = Chart::parse(o.chart);
    auto lines = read_point_lines(o.points_file);
    PointCloud cloud;
    std::optional<WehlerSurface> s;
    if (!o.surface.empty()) s = load_surface(o.surface);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        try {
            if (lines[k].find(";d=") != std::string::npos) {
                auto p = parse_quadratic_point(lines[k]);
                if (s && !on_surface(*s, p)) throw InvalidArgument("point " + to_string(p) + " is not on the surface");
                auto part = export_cloud(std::vector<QuadraticPoint>{p}, o.tag, chart);
                cloud.rows.insert(cloud.rows.end(), part.rows.begin(), part.rows.end());
            } else {
                auto p = parse_rational_point(lines[k]);
                if (s && !on_surface(*s, p)) throw InvalidArgument("point " + to_string(p) + " is not on the surface");
                auto part = export_cloud(std::vector<RationalPoint>{p}, o.tag, chart);
                cloud.rows.insert(cloud.rows.end(), part.rows.begin(), part.rows.end());
            }
        } catch (const FormatError& e) {
            throw FormatError(o.points_file + ": point " + std::to_string(k + 1) + " " + e.where(), e.what());
        }
    }
    Sink sink(o.output);
    write_cloud_csv(sink.out(), cloud);
    return 0;
}

PointCloud load_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path, "cannot open file");
    return read_cloud_csv(in, path);
}

int measure_discrepancy(const Options& o) {
    double d = box_discrepancy(load_cloud(o.cloud_a), load_cloud(o.cloud_b), o.grid);
    Sink sink(o.output);
    if (o.human)
        sink.out() << "box discrepancy (g = " << o.grid << "): " << format_double(d) << "\n";
    else
        sink.out() << format_double(d) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polarized K3 dynamics: Picard-lattice certificates, Wehler surface orbits and heights, "
                 "mod-p periodicity, point-cloud measures"};
    app.require_subcommand(1);
    Options o;
    app.set_version_flag("--version", std::string("k3dyn 1.0 fixtures ") + fixture_registry_hash());

    std::function<int()> action;
    auto bind = [&](CLI::App* sub, int (*fn)(const Options&)) {
        sub->callback([&action, &o, fn] { action = [&o, fn] { return fn(o); }; });
        sub->add_option("-o,--output", o.output, "Write output to FILE");
        sub->add_flag("--human", o.human, "Human-readable tables instead of JSON/CSV");
    };

    auto* picard = app.add_subcommand("picard", "Picard-lattice polarization certificates");
    picard->require_subcommand(1);
    auto* check = picard->add_subcommand("check", "Certify polarizability of a lattice system");
    check->add_option("--input", o.input, "Lattice system JSON")->check(CLI::ExistingFile);
    check->add_option("--fixture", o.fixture, "Registered fixture key");
    bind(check, picard_check);
    auto* dump = picard->add_subcommand("dump", "Print a fixture as lattice-system JSON");
    dump->add_option("--fixture", o.fixture, "Registered fixture key")->required();
    bind(dump, picard_dump);
    auto* list = picard->add_subcommand("list", "List registered fixtures");
    bind(list, picard_list);
    auto* power = picard->add_subcommand("power", "Polarization of {A^m, A^-m} for one map A of a system");
    power->add_option("--input", o.input, "Lattice system JSON")->check(CLI::ExistingFile);
    power->add_option("--fixture", o.fixture, "Registered fixture key");
    power->add_option("-m", o.power, "Exponent m >= 1")->required()->check(CLI::PositiveNumber);
    power->add_option("--map", o.map_index, "Index of the map A in the system (default 0)");
    bind(power, picard_power);

    auto* cheb = app.add_subcommand("chebyshev", "Degree q_m of {A^m, A^-m} from q = q_1");
    cheb->add_option("-q", o.q, "q_1 (integer or a/b)")->required();
    cheb->add_option("-m", o.power, "Exponent m >= 1")->required()->check(CLI::PositiveNumber);
    bind(cheb, chebyshev);

    auto* wehler = app.add_subcommand("wehler", "Dynamics on a Wehler surface over Q");
    wehler->require_subcommand(1);
    auto add_surface = [&](CLI::App* sub) {
        sub->add_option("--surface", o.surface, "Surface JSON {F, G}")->required()->check(CLI::ExistingFile);
    };
    auto add_point = [&](CLI::App* sub) {
        sub->add_option("--point", o.point, "Point [x0:x1:x2]x[y0:y1:y2]")->required();
    };
    auto* validate = wehler->add_subcommand("validate", "Probe for degenerate forms and fibers");
    add_surface(validate);
    bind(validate, wehler_validate);
    auto* orbit = wehler->add_subcommand("orbit", "sigma^k(P) for k = -n..n (CSV)");
    add_surface(orbit);
    add_point(orbit);
    orbit->add_option("-n", o.steps, "Steps in each direction")->check(CLI::NonNegativeNumber);
    bind(orbit, wehler_orbit);
    auto* canh = wehler->add_subcommand("canheight", "Canonical height estimate by monoid averaging");
    add_surface(canh);
    add_point(canh);
    canh->add_option("-N", o.depth, "Word length (even)");
    canh->add_option("--truncate", o.truncate, "Drop walk positions beyond K");
    canh->add_option("--walk", o.walk, "involutions (q = 4) or sigma (q = 14)")
        ->check(CLI::IsMember({"involutions", "sigma"}));
    bind(canh, wehler_canheight);
    auto* search = wehler->add_subcommand("search", "Rational points with x in a coordinate box");
    add_surface(search);
    search->add_option("-B", o.bound, "Coordinate bound")->check(CLI::PositiveNumber);
    search->add_flag("--quadratic", o.quadratic, "Also report points over quadratic fields");
    bind(search, wehler_search);
    auto* periodic = wehler->add_subcommand("periodic", "Detect a sigma-period of a rational point");
    add_surface(periodic);
    add_point(periodic);
    periodic->add_option("--max-period", o.max_period, "Largest period tried");
    periodic->add_option("--max-height", o.max_height, "Give up beyond this naive height");
    bind(periodic, wehler_periodic);

    auto* modp = app.add_subcommand("modp", "Reduction modulo primes");
    modp->require_subcommand(1);
    auto* cycles = modp->add_subcommand("cycles", "sigma cycle census per prime (CSV)");
    add_surface(cycles);
    cycles->add_option("-p", o.primes, "Primes, comma separated")->required()->delimiter(',');
    bind(cycles, modp_cycles);

    auto* measure = app.add_subcommand("measure", "Point clouds and box discrepancy");
    measure->require_subcommand(1);
    auto* cloud = measure->add_subcommand("cloud", "Affine coordinates of points, one row per real embedding");
    cloud->add_option("--points", o.points_file, "File of point literals, one per line")
        ->required()
        ->check(CLI::ExistingFile);
    cloud->add_option("--surface", o.surface, "Reject points not on this surface")->check(CLI::ExistingFile);
    cloud->add_option("--tag", o.tag, "Tag column value");
    cloud->add_option("--chart", o.chart, "Preferred chart x<i>y<j>");
    bind(cloud, measure_cloud);
    auto* disc = measure->add_subcommand("discrepancy", "Max cell mass difference of two clouds");
    disc->add_option("A", o.cloud_a, "Cloud CSV")->required()->check(CLI::ExistingFile);
    disc->add_option("B", o.cloud_b, "Cloud CSV")->required()->check(CLI::ExistingFile);
    disc->add_option("-g", o.grid, "Cells per axis")->check(CLI::PositiveNumber);
    bind(disc, measure_discrepancy);

    try {
        app.parse(argc, argv);
        return action();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
