#pragma once

// File formats.
//
// Lattice system (JSON):
//   { "rank": n,
//     "maps": [ { "label": "...", "matrix": [[...], ...] }, ... ],
//     "cone": "positive-orthant" | { "generators": [[...], ...] } }
// Matrices are row-major and column j holds the pullback of basis class L_j.
// Integers may be JSON numbers or decimal strings (for values beyond 64 bits).
//
// Surface (JSON): { "F": 3x3 integers, "G": 6x6 integers }, G over the
// monomials x0², x0x1, x0x2, x1², x1x2, x2² crossed with the same in y.
//
// Point literal: "[x0:x1:x2]x[y0:y1:y2]", integer entries. Over Q(√d) the
// entries are written a+b*r (r = √d) and the literal ends with ";d=<d>".

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "k3dyn/errors.hpp"
#include "k3dyn/fixtures.hpp"
#include "k3dyn/picard.hpp"
#include "k3dyn/wehler.hpp"

namespace k3dyn {

using json = nlohmann::ordered_json;

namespace io {

inline Integer parse_integer(const json& j, const std::string& where) {
    if (j.is_number_integer()) return j.is_number_unsigned() ? Integer(std::to_string(j.get<std::uint64_t>()))
                                                            : Integer(std::to_string(j.get<std::int64_t>()));
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        Integer v;
        std::string_view digits = s;
        if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(c); }) ||
            v.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
            throw FormatError(where, "not an integer: \"" + s + "\"");
        return v;
    }
    throw FormatError(where, "expected an integer, got " + std::string(j.type_name()));
}

/// Number when it fits in 64 bits, decimal string otherwise.
inline json integer_json(const Integer& v) {
    if (v.fits_slong_p()) return json(static_cast<std::int64_t>(v.get_si()));
    return json(v.get_str());
}

inline json rational_json(const Rational& v) {
    Rational c = v;
    c.canonicalize();
    if (c.get_den() == 1) return integer_json(c.get_num());
    return json(to_string(c));
}

inline json class_json(const PicardClass& c) {
    json arr = json::array();
    for (const auto& v : c.coeffs) arr.push_back(integer_json(v));
    return arr;
}

inline IntMatrix parse_matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& where) {
    if (!j.is_array() || j.size() != rows)
        throw FormatError(where, "expected " + std::to_string(rows) + " rows");
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        std::string rw = where + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != cols)
            throw FormatError(rw, "expected a row of " + std::to_string(cols) + " integers");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = parse_integer(j[i][k], rw + "[" + std::to_string(k) + "]");
    }
    return m;
}

inline json matrix_json(const IntMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(integer_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Indented dump that keeps arrays of scalars on one line.
inline void dump_compact(std::ostream& os, const json& j, int indent = 0) {
    auto scalar_array = [](const json& a) {
        return std::all_of(a.begin(), a.end(), [](const json& e) { return e.is_primitive(); });
    };
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    if (j.is_object() && !j.empty()) {
        os << "{\n";
        std::size_t k = 0;
        for (const auto& [key, v] : j.items()) {
            os << pad << json(key).dump() << ": ";
            dump_compact(os, v, indent + 2);
            os << (++k < j.size() ? ",\n" : "\n");
        }
        os << std::string(static_cast<std::size_t>(indent), ' ') << "}";
    } else if (j.is_array() && !j.empty() && !scalar_array(j)) {
        os << "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            os << pad;
            dump_compact(os, j[k], indent + 2);
            os << (k + 1 < j.size() ? ",\n" : "\n");
        }
        os << std::string(static_cast<std::size_t>(indent), ' ') << "]";
    } else {
        os << j.dump(-1, ' ', false);
    }
}

inline std::string dump_compact(const json& j) {
    std::ostringstream os;
    dump_compact(os, j);
    os << '\n';
    return os.str();
}

inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        std::size_t line = 1;
        for (std::size_t k = 0; k < std::min<std::size_t>(e.byte, text.size()); ++k)
            if (text[k] == '\n') ++line;
        throw FormatError(source + ":" + std::to_string(line), std::string("invalid JSON: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace io

// ---------------------------------------------------------------------------
// Lattice systems

struct LatticeSystemFile {
    MorphismSystem system;
    Cone cone;
};

inline LatticeSystemFile parse_lattice_system(const json& j) {
    if (!j.is_object()) throw FormatError("", "lattice system must be a JSON object");
    if (!j.contains("rank")) throw FormatError("rank", "missing");
    if (!j["rank"].is_number_unsigned() || j["rank"].get<std::uint64_t>() == 0)
        throw FormatError("rank", "expected a positive integer");
    const auto n = static_cast<std::size_t>(j["rank"].get<std::uint64_t>());
    if (!j.contains("maps") || !j["maps"].is_array() || j["maps"].empty())
        throw FormatError("maps", "expected a nonempty array");

    std::vector<PullbackMap> maps;
    for (std::size_t k = 0; k < j["maps"].size(); ++k) {
        const auto& m = j["maps"][k];
        std::string where = "maps[" + std::to_string(k) + "]";
        if (!m.is_object()) throw FormatError(where, "expected an object");
        std::string label = "map" + std::to_string(k);
        if (m.contains("label")) {
            if (!m["label"].is_string()) throw FormatError(where + ".label", "expected a string");
            label = m["label"].get<std::string>();
        }
        if (!m.contains("matrix")) throw FormatError(where + ".matrix", "missing");
        maps.emplace_back(io::parse_matrix(m["matrix"], n, n, where + ".matrix"), label);
    }

    Cone cone = Cone::positive_orthant();
    if (j.contains("cone")) {
        const auto& c = j["cone"];
        if (c.is_string()) {
            if (c.get<std::string>() != "positive-orthant")
                throw FormatError("cone", "unknown cone \"" + c.get<std::string>() + "\"");
        } else if (c.is_object() && c.contains("generators") && c["generators"].is_array()) {
            std::vector<PicardClass> gens;
            for (std::size_t k = 0; k < c["generators"].size(); ++k) {
                std::string where = "cone.generators[" + std::to_string(k) + "]";
                const auto& g = c["generators"][k];
                if (!g.is_array() || g.size() != n)
                    throw FormatError(where, "expected " + std::to_string(n) + " integers");
                std::vector<Integer> coeffs;
                for (std::size_t i = 0; i < n; ++i)
                    coeffs.push_back(io::parse_integer(g[i], where + "[" + std::to_string(i) + "]"));
                gens.emplace_back(std::move(coeffs));
            }
            try {
                cone = Cone::generated_by(std::move(gens));
            } catch (const InvalidArgument& e) {
                throw FormatError("cone.generators", e.what());
            }
        } else {
            throw FormatError("cone", "expected \"positive-orthant\" or {\"generators\": [...]}");
        }
    }
    return {MorphismSystem(n, std::move(maps)), std::move(cone)};
}

inline LatticeSystemFile load_lattice_system(const std::string& path) {
    return parse_lattice_system(io::parse_json_text(io::read_file(path), path));
}

inline json lattice_system_json(const MorphismSystem& system, const Cone& cone) {
    json j;
    j["rank"] = system.rank;
    json maps = json::array();
    for (const auto& m : system.maps) {
        json e;
        e["label"] = m.label;
        e["matrix"] = io::matrix_json(m.matrix);
        maps.push_back(std::move(e));
    }
    j["maps"] = std::move(maps);
    if (cone.is_positive_orthant()) {
        j["cone"] = "positive-orthant";
    } else {
        json gens = json::array();
        for (const auto& g : cone.generators) gens.push_back(io::class_json(g));
        j["cone"] = json{{"generators", std::move(gens)}};
    }
    return j;
}

inline json polarization_json(const PolarizationResult& r, const IntMatrix& tensor) {
    json j;
    j["maps"] = r.map_count;
    j["tensor_sum"] = io::matrix_json(tensor);
    j["polarizable"] = r.polarizable();
    json certs = json::array();
    for (const auto& c : r.certificates) {
        json e;
        e["q"] = io::rational_json(c.q);
        e["witness"] = io::class_json(c.witness);
        json basis = json::array();
        for (const auto& b : c.eigenbasis) basis.push_back(io::class_json(b));
        e["eigenbasis"] = std::move(basis);
        e["verified"] = c.verified;
        certs.push_back(std::move(e));
    }
    j["certificates"] = std::move(certs);
    json diags = json::array();
    for (const auto& d : r.diagnostics) {
        json e;
        e["eigenvalue"] = io::rational_json(d.eigenvalue);
        e["multiplicity"] = d.multiplicity;
        json basis = json::array();
        for (const auto& b : d.basis) basis.push_back(io::class_json(b));
        e["eigenbasis"] = std::move(basis);
        e["cone_witness"] = d.cone_witness ? io::class_json(*d.cone_witness) : json(nullptr);
        diags.push_back(std::move(e));
    }
    j["diagnostics"] = std::move(diags);
    return j;
}

// ---------------------------------------------------------------------------
// Surfaces

inline WehlerSurface parse_surface(const json& j) {
    if (!j.is_object()) throw FormatError("", "surface must be a JSON object with keys F and G");
    if (!j.contains("F")) throw FormatError("F", "missing");
    if (!j.contains("G")) throw FormatError("G", "missing");
    IntMatrix f = io::parse_matrix(j["F"], 3, 3, "F");
    IntMatrix g = io::parse_matrix(j["G"], 6, 6, "G");
    WehlerSurface s;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) s.F[i][k] = f(i, k);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) s.G[a][b] = g(a, b);
    return s;
}

inline WehlerSurface load_surface(const std::string& path) {
    try {
        return parse_surface(io::parse_json_text(io::read_file(path), path));
    } catch (const FormatError& e) {
        if (e.where().rfind(path, 0) == 0) throw;
        throw FormatError(path + ": " + e.where(), e.what());
    }
}

inline json surface_json(const WehlerSurface& s) {
    IntMatrix f(3, 3), g(6, 6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) f(i, k) = s.F[i][k];
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) g(a, b) = s.G[a][b];
    return json{{"F", io::matrix_json(f)}, {"G", io::matrix_json(g)}};
}

// ---------------------------------------------------------------------------
// Point literals

namespace io {

inline Integer parse_int_token(std::string_view tok, const std::string& where) {
    std::string s(tok);
    std::string_view digits = tok;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) digits.remove_prefix(1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(c); }))
        throw FormatError(where, "not an integer: '" + s + "'");
    if (s[0] == '+') s.erase(0, 1);
    return Integer(s);
}

/// a, a+b*r, a-b*r, b*r, r, -r and the like.
inline std::pair<Integer, Integer> parse_quadratic_entry(std::string_view text, const std::string& where) {
    Integer a = 0, b = 0;
    std::size_t pos = 0;
    if (text.empty()) throw FormatError(where, "empty coordinate");
    while (pos < text.size()) {
        std::size_t end = pos + 1;
        while (end < text.size() && text[end] != '+' && text[end] != '-') ++end;
        std::string_view term = text.substr(pos, end - pos);
        bool neg = false;
        std::string_view body = term;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            neg = body[0] == '-';
            body.remove_prefix(1);
        }
        if (body.empty()) throw FormatError(where, "dangling sign in '" + std::string(text) + "'");
        if (body.back() == 'r') {
            Integer coeff = 1;
            if (body.size() > 1) {
                if (body.size() < 3 || body[body.size() - 2] != '*')
                    throw FormatError(where, "expected <int>*r in '" + std::string(text) + "'");
                coeff = parse_int_token(body.substr(0, body.size() - 2), where);
            }
            b += neg ? Integer(-coeff) : coeff;
        } else {
            Integer v = parse_int_token(body, where);
            a += neg ? Integer(-v) : v;
        }
        pos = end;
    }
    return {a, b};
}

struct RawPoint {
    std::array<std::string, 3> x;
    std::array<std::string, 3> y;
    std::optional<long> d;
};

inline RawPoint split_point_literal(const std::string& literal) {
    std::string text = literal;
    RawPoint raw;
    auto semi = text.find(';');
    if (semi != std::string::npos) {
        std::string tail = text.substr(semi + 1);
        text = text.substr(0, semi);
        if (tail.rfind("d=", 0) != 0) throw FormatError("point", "expected ';d=<integer>' after the coordinates");
        Integer d = parse_int_token(tail.substr(2), "point.d");
        if (!d.fits_slong_p()) throw FormatError("point.d", "out of range");
        raw.d = d.get_si();
    }
    auto parse_triple = [](std::string_view s, const std::string& name, std::array<std::string, 3>& out) {
        if (s.size() < 2 || s.front() != '[' || s.back() != ']')
            throw FormatError("point." + name, "expected [a:b:c], got '" + std::string(s) + "'");
        s = s.substr(1, s.size() - 2);
        std::size_t k = 0, start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ':') {
                if (k == 3) throw FormatError("point." + name, "more than three coordinates");
                out[k++] = std::string(s.substr(start, i - start));
                start = i + 1;
            }
        }
        if (k != 3) throw FormatError("point." + name, "expected three coordinates");
    };
    auto sep = text.find("]x[");
    if (sep == std::string::npos) throw FormatError("point", "expected [x0:x1:x2]x[y0:y1:y2], got '" + literal + "'");
    parse_triple(std::string_view(text).substr(0, sep + 1), "x", raw.x);
    parse_triple(std::string_view(text).substr(sep + 2), "y", raw.y);
    return raw;
}

}  // namespace io

inline RationalPoint parse_rational_point(const std::string& literal) {
    auto raw = io::split_point_literal(literal);
    if (raw.d) throw FormatError("point.d", "a rational point takes no ';d=' suffix");
    RationalPoint p;
    for (std::size_t k = 0; k < 3; ++k) {
        p.x[k] = io::parse_int_token(raw.x[k], "point.x[" + std::to_string(k) + "]");
        p.y[k] = io::parse_int_token(raw.y[k], "point.y[" + std::to_string(k) + "]");
    }
    if (is_zero_triple(p.x) || is_zero_triple(p.y)) throw FormatError("point", "zero projective triple");
    normalize(p);
    return p;
}

inline QuadraticPoint parse_quadratic_point(const std::string& literal) {
    auto raw = io::split_point_literal(literal);
    if (!raw.d) throw FormatError("point.d", "missing ';d=<d>' for a quadratic point");
    long d = *raw.d;
    if (d == 0 || d == 1 || square_decomposition(Integer(d)).first != 1)
        throw FormatError("point.d", "d must be squarefree and different from 0 and 1");
    QuadraticPoint p;
    for (std::size_t k = 0; k < 3; ++k) {
        auto [xa, xb] = io::parse_quadratic_entry(raw.x[k], "point.x[" + std::to_string(k) + "]");
        auto [ya, yb] = io::parse_quadratic_entry(raw.y[k], "point.y[" + std::to_string(k) + "]");
        p.x[k] = QuadInt(xa, xb, d);
        p.y[k] = QuadInt(ya, yb, d);
    }
    if (is_zero_triple(p.x) || is_zero_triple(p.y)) throw FormatError("point", "zero projective triple");
    normalize(p);
    return p;
}

/// Point literals one per line; blank lines and lines starting with '#' are skipped.
inline std::vector<std::string> read_point_lines(const std::string& path) {
    std::istringstream in(io::read_file(path));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
        line = line.substr(start);
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixture registry hash (FNV-1a over the canonical dump).

inline std::string fixture_registry_hash() {
    json all = json::array();
    for (const auto& f : lattice_fixtures()) {
        json e = lattice_system_json(f.system, f.cone);
        e["key"] = f.key;
        all.push_back(std::move(e));
    }
    std::string text = all.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace k3dyn
