#include "fdtruss/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fdtruss/errors.hpp"

namespace fdtruss {

namespace {

using nlohmann::json;

std::size_t node_index(const json& v, std::size_t n, const char* what) {
    if (!v.is_number_integer() || v.get<long long>() < 0 ||
        static_cast<std::size_t>(v.get<long long>()) >= n) {
        throw ParseError(std::string(what) + ": node index out of range");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

double number(const json& v, const char* what) {
    if (!v.is_number()) throw ParseError(std::string(what) + ": expected a number");
    return v.get<double>();
}

bool flag(const json& v, const char* what) {
    if (!v.is_boolean()) throw ParseError(std::string(what) + ": expected true or false");
    return v.get<bool>();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines(std::string_view text) {
    std::vector<std::string_view> out;
    for (auto l : split(text, '\n')) {
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        if (!l.empty()) out.push_back(l);
    }
    return out;
}

bool parse_number(std::string_view s, double& out) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::optional<double> optional_field(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    if (!parse_number(s, v)) throw ParseError("front CSV: bad number '" + std::string(s) + "'");
    return v;
}

std::string optional_text(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

} // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

GroundStructure parse_problem(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("problem file: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("problem file: top level must be an object");
    for (const char* key : {"nodes", "members", "supports", "loads"}) {
        if (!doc.contains(key) || !doc[key].is_array()) {
            throw ParseError(std::string("problem file: missing array '") + key + "'");
        }
    }

    std::vector<Point> nodes;
    for (const auto& p : doc["nodes"]) {
        if (!p.is_array() || p.size() != 2) throw ParseError("nodes: expected [x, y]");
        nodes.push_back({number(p[0], "nodes"), number(p[1], "nodes")});
    }
    const std::size_t n = nodes.size();

    std::vector<Member> members;
    for (const auto& m : doc["members"]) {
        if (!m.is_array() || m.size() != 2) throw ParseError("members: expected [a, b]");
        members.push_back({NodeId{node_index(m[0], n, "members")},
                           NodeId{node_index(m[1], n, "members")}});
    }

    std::vector<Support> supports;
    for (const auto& s : doc["supports"]) {
        if (!s.is_object() || !s.contains("node")) throw ParseError("supports: expected {node}");
        Support sup{NodeId{node_index(s["node"], n, "supports")}};
        if (s.contains("fix_x")) sup.fix_x = flag(s["fix_x"], "supports");
        if (s.contains("fix_y")) sup.fix_y = flag(s["fix_y"], "supports");
        supports.push_back(sup);
    }

    std::vector<Load> loads;
    for (const auto& l : doc["loads"]) {
        if (!l.is_object() || !l.contains("node") || !l.contains("direction") ||
            !l.contains("magnitude")) {
            throw ParseError("loads: expected {node, direction, magnitude}");
        }
        const NodeId node{node_index(l["node"], n, "loads")};
        const double p = number(l["magnitude"], "loads");
        if (!l["direction"].is_string()) throw ParseError("loads: direction must be a string");
        const auto dir = l["direction"].get<std::string>();
        Load* target = nullptr;
        for (auto& existing : loads) {
            if (existing.node == node) target = &existing;
        }
        if (!target) {
            loads.push_back({node, 0.0, 0.0});
            target = &loads.back();
        }
        if (dir == "x") {
            target->px += p;
        } else if (dir == "y") {
            target->py += p;
        } else {
            throw ParseError("loads: direction must be \"x\" or \"y\"");
        }
    }

    std::vector<NodeId> extra;
    if (doc.contains("fixed")) {
        if (!doc["fixed"].is_array()) throw ParseError("problem file: 'fixed' must be an array");
        for (const auto& f : doc["fixed"]) extra.push_back(NodeId{node_index(f, n, "fixed")});
    }
    return GroundStructure(std::move(nodes), std::move(members), std::move(supports),
                           std::move(loads), std::move(extra));
}

GroundStructure read_problem(const std::filesystem::path& path) {
    return parse_problem(read_text(path));
}

std::string problem_json(const GroundStructure& g) {
    json doc;
    doc["nodes"] = json::array();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto p = g.node(NodeId{i});
        doc["nodes"].push_back({p.x, p.y});
    }
    doc["members"] = json::array();
    for (const auto& m : g.members()) doc["members"].push_back({m.end_a.value, m.end_b.value});
    doc["supports"] = json::array();
    for (const auto& s : g.supports()) {
        doc["supports"].push_back({{"node", s.node.value}, {"fix_x", s.fix_x}, {"fix_y", s.fix_y}});
    }
    doc["loads"] = json::array();
    for (const auto& l : g.loads()) {
        if (l.px != 0.0) {
            doc["loads"].push_back({{"node", l.node.value}, {"direction", "x"}, {"magnitude", l.px}});
        }
        if (l.py != 0.0) {
            doc["loads"].push_back({{"node", l.node.value}, {"direction", "y"}, {"magnitude", l.py}});
        }
    }
    doc["fixed"] = json::array();
    for (const auto& f : g.fixed_nodes()) {
        bool implied = g.is_support(f);
        for (const auto& l : g.loads()) implied = implied || l.node == f;
        if (!implied) doc["fixed"].push_back(f.value);
    }
    return doc.dump(2) + "\n";
}

std::string front_csv(std::span<const ParetoPoint> points) {
    std::string out = "index,Fx,Fy,beta,mu_ratio,r_est\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        out += fmt::format("{},{},{},{},{},{}\n", i, format_double(p.S[0]), format_double(p.S[1]),
                           optional_text(p.beta), optional_text(p.mu_ratio),
                           optional_text(p.r_est));
    }
    return out;
}

std::vector<ParetoPoint> parse_front_csv(std::string_view text) {
    const auto rows = lines(text);
    if (rows.empty() || rows.front() != "index,Fx,Fy,beta,mu_ratio,r_est") {
        throw ParseError("front CSV: missing header");
    }
    std::vector<ParetoPoint> out;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto f = split(rows[k], ',');
        if (f.size() != 6) throw ParseError("front CSV: expected 6 fields");
        ParetoPoint p;
        const auto fx = optional_field(f[1]);
        const auto fy = optional_field(f[2]);
        if (!fx || !fy) throw ParseError("front CSV: objectives are required");
        p.S = {*fx, *fy};
        p.beta = optional_field(f[3]);
        p.mu_ratio = optional_field(f[4]);
        p.r_est = optional_field(f[5]);
        out.push_back(std::move(p));
    }
    return out;
}

std::string genome_csv(std::span<const ParetoPoint> points) {
    std::string out;
    if (!points.empty()) {
        out = "index";
        for (Eigen::Index i = 0; i < points.front().genome.size(); ++i) {
            out += fmt::format(",q{}", i);
        }
        out += "\n";
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        out += std::to_string(k);
        for (double v : points[k].genome) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

std::vector<std::vector<double>> parse_numeric_csv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    const auto all = lines(text);
    for (std::size_t k = 0; k < all.size(); ++k) {
        std::vector<double> row;
        bool ok = true;
        for (auto field : split(all[k], ',')) {
            double v = 0.0;
            if (!parse_number(field, v)) {
                ok = false;
                break;
            }
            row.push_back(v);
        }
        if (!ok) {
            if (k == 0) continue;
            throw ParseError("CSV line " + std::to_string(k + 1) + ": expected numbers");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
    std::string out = "method,r,compliance\n";
    for (const auto& row : rows) {
        out += fmt::format("{},{},{}\n", row.method, format_double(row.r),
                           format_double(row.compliance));
    }
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace fdtruss
