#include "peer/methods.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "builtin_tables.hpp"

namespace peer {

namespace {

MethodTableau from_raw(const detail::RawTableau& raw) {
    const std::size_t s = raw.s;
    std::vector<double> c(raw.c, raw.c + s);
    std::vector<double> r_lower(raw.r_lower, raw.r_lower + s * (s - 1) / 2);
    std::vector<double> s2_lower(raw.s2_lower, raw.s2_lower + s * (s - 1) / 2);
    RealMatrix p(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) p(i, j) = raw.p[i * s + j];
    return make_tableau(raw.label, c, raw.gamma, r_lower, p, s2_lower);
}

struct Line {
    std::string key;
    std::vector<std::string> values;
    std::size_t number = 0;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line line;
        line.number = number;
        if (!(ls >> line.key)) continue;
        std::string tok;
        while (ls >> tok) line.values.push_back(tok);
        lines.push_back(std::move(line));
    }
    return lines;
}

double parse_double(const Line& line, const std::string& tok) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != tok.size())
        throw TableauFormatError("line " + std::to_string(line.number) + ": '" + tok +
                                 "' is not a number");
    return v;
}

std::vector<double> parse_doubles(const Line& line, std::size_t expect) {
    if (line.values.size() != expect)
        throw TableauFormatError("line " + std::to_string(line.number) + ": key '" + line.key +
                                 "' expects " + std::to_string(expect) + " values, got " +
                                 std::to_string(line.values.size()));
    std::vector<double> out;
    out.reserve(expect);
    for (const auto& tok : line.values) out.push_back(parse_double(line, tok));
    return out;
}

// R and S2 may be given packed (strict lower triangle) or as full row-major
// matrices; full form is validated against the required structure.
std::vector<double> lower_entries(const Line& line, std::size_t s, double diag,
                                  bool strict_lower) {
    const std::size_t packed = s * (s - 1) / 2;
    if (line.values.size() == packed) return parse_doubles(line, packed);
    if (line.values.size() != s * s)
        throw TableauFormatError("line " + std::to_string(line.number) + ": key '" + line.key +
                                 "' expects " + std::to_string(packed) + " or " +
                                 std::to_string(s * s) + " values, got " +
                                 std::to_string(line.values.size()));
    const std::vector<double> full = parse_doubles(line, s * s);
    std::vector<double> out;
    out.reserve(packed);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            const double v = full[i * s + j];
            if (j < i) {
                out.push_back(v);
            } else if (j == i && !strict_lower) {
                if (std::abs(v - diag) > 1e-14)
                    throw TableauFormatError("line " + std::to_string(line.number) +
                                             ": diagonal of '" + line.key +
                                             "' must equal gamma");
            } else if (v != 0.0) {
                throw TableauFormatError("line " + std::to_string(line.number) + ": '" +
                                         line.key + "' must be strictly lower triangular, entry (" +
                                         std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                         ") is nonzero");
            }
        }
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"imex-peer2s", "imex-peer3s", "imex-peer4s"}; }

MethodTableau builtin(const std::string& name) {
    if (name == "imex-peer2s") return from_raw(detail::kImexPeer2s);
    if (name == "imex-peer3s") return from_raw(detail::kImexPeer3s);
    if (name == "imex-peer4s") return from_raw(detail::kImexPeer4s);
    throw Error("unknown builtin method '" + name +
                "' (available: imex-peer2s, imex-peer3s, imex-peer4s)");
}

MethodTableau parse_tableau(const std::string& text) {
    const std::vector<Line> lines = tokenize(text);
    std::string label = "unnamed";
    std::size_t s = 0;
    std::vector<double> c;
    double gamma = 0;
    bool have_gamma = false;
    const Line* p_line = nullptr;
    const Line* r_line = nullptr;
    const Line* s2_line = nullptr;
    const Line* c_line = nullptr;
    for (const Line& line : lines) {
        if (line.key == "label") {
            if (line.values.size() != 1)
                throw TableauFormatError("line " + std::to_string(line.number) +
                                         ": label expects one token");
            label = line.values[0];
        } else if (line.key == "s") {
            const double v = parse_doubles(line, 1)[0];
            s = static_cast<std::size_t>(v);
            if (v != static_cast<double>(s))
                throw TableauFormatError("line " + std::to_string(line.number) +
                                         ": s must be an integer");
        } else if (line.key == "c") {
            c_line = &line;
        } else if (line.key == "gamma") {
            gamma = parse_doubles(line, 1)[0];
            have_gamma = true;
        } else if (line.key == "P") {
            p_line = &line;
        } else if (line.key == "R") {
            r_line = &line;
        } else if (line.key == "S2") {
            s2_line = &line;
        } else {
            throw TableauFormatError("line " + std::to_string(line.number) + ": unknown key '" +
                                     line.key + "'");
        }
    }
    if (s == 0) throw TableauFormatError("missing key 's'");
    if (!c_line) throw TableauFormatError("missing key 'c'");
    if (!have_gamma) throw TableauFormatError("missing key 'gamma'");
    if (!p_line) throw TableauFormatError("missing key 'P'");
    if (!r_line) throw TableauFormatError("missing key 'R'");
    if (!s2_line) throw TableauFormatError("missing key 'S2'");
    c = parse_doubles(*c_line, s);
    const std::vector<double> pv = parse_doubles(*p_line, s * s);
    RealMatrix p(s, s);
    for (std::size_t i = 0; i < s * s; ++i) p.data()[i] = pv[i];
    const std::vector<double> r_lower = lower_entries(*r_line, s, gamma, false);
    const std::vector<double> s2_lower = lower_entries(*s2_line, s, 0.0, true);
    return make_tableau(label, c, gamma, r_lower, p, s2_lower);
}

MethodTableau load_tableau_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TableauFormatError("cannot open tableau file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_tableau(ss.str());
}

std::string serialize_tableau(const MethodTableau& t) {
    std::ostringstream os;
    os << "label " << t.label << "\n";
    os << "s " << t.s << "\n";
    os << "c";
    for (double ci : t.c) os << ' ' << fmt17(ci);
    os << "\ngamma " << fmt17(t.gamma) << "\nP";
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < t.s; ++j) os << ' ' << fmt17(t.P(i, j));
    os << "\nR";
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < i; ++j) os << ' ' << fmt17(t.R(i, j));
    os << "\nS2";
    for (std::size_t i = 0; i < t.s; ++i)
        for (std::size_t j = 0; j < i; ++j) os << ' ' << fmt17(t.S2(i, j));
    os << "\n";
    return os.str();
}

MethodTableau resolve_method(const std::string& name_or_path) {
    for (const auto& n : builtin_names())
        if (n == name_or_path) return builtin(n);
    return load_tableau_file(name_or_path);
}

}  // namespace peer
