#include "fdtruss/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "fdtruss/energy.hpp"

namespace fdtruss {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kMargin = 0.08;

std::string num(double v) {
    if (std::abs(v) < 1e-9) v = 0.0;
    return fmt::format("{:.6g}", v);
}

// Maps a window onto a square-pixel canvas, y pointing up.
struct Frame {
    Window w;
    double scale = 1.0;
    double width = kCanvas;
    double height = kCanvas;
    double pad = 0.0;

    explicit Frame(Window win) : w(win) {
        const double ex = std::max(w.x_max - w.x_min, 1e-12);
        const double ey = std::max(w.y_max - w.y_min, 1e-12);
        scale = kCanvas / std::max(ex, ey);
        pad = kMargin * kCanvas;
        width = ex * scale + 2.0 * pad;
        height = ey * scale + 2.0 * pad;
    }

    double px(double x) const { return pad + (x - w.x_min) * scale; }
    double py(double y) const { return height - pad - (y - w.y_min) * scale; }
};

std::string header(const Frame& f) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        num(f.width), num(f.height));
}

Window enclose(const std::vector<Point>& pts) {
    Window w{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
        w.x_min = std::min(w.x_min, p.x);
        w.x_max = std::max(w.x_max, p.x);
        w.y_min = std::min(w.y_min, p.y);
        w.y_max = std::max(w.y_max, p.y);
    }
    if (pts.empty()) return Window{};
    return w;
}

} // namespace

std::string truss_svg(const GroundStructure& g, const TrussDesign& d, std::optional<Window> window) {
    const auto members = g.members();
    const auto keep = retained_members(d.q_tilde);
    const auto& x = d.geometry.x;
    const auto& y = d.geometry.y;
    auto at = [&](NodeId n) {
        return Point{x[static_cast<Eigen::Index>(n.value)], y[static_cast<Eigen::Index>(n.value)]};
    };

    std::vector<Point> drawn;
    double amax = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (!keep[k]) continue;
        drawn.push_back(at(members[k].end_a));
        drawn.push_back(at(members[k].end_b));
        amax = std::max(amax, d.areas[static_cast<Eigen::Index>(k)]);
    }
    for (const auto& s : g.supports()) drawn.push_back(at(s.node));
    for (const auto& l : g.loads()) drawn.push_back(at(l.node));

    const Window w = window ? *window : enclose(drawn);
    const Frame f(w);
    const double span = std::max(w.x_max - w.x_min, w.y_max - w.y_min) * f.scale;
    const double k_width = amax > 0.0 ? 0.02 * span / amax : 0.0;

    std::string out = header(f);
    out += "<g stroke-linecap=\"round\">\n";
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (!keep[k]) continue;
        const auto a = at(members[k].end_a);
        const auto b = at(members[k].end_b);
        const auto idx = static_cast<Eigen::Index>(k);
        const char* color = d.N_tilde[idx] >= 0.0 ? "#1f4e9c" : "#b22222";
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
            num(f.px(a.x)), num(f.py(a.y)), num(f.px(b.x)), num(f.py(b.y)), color,
            num(k_width * d.areas[idx]));
    }
    out += "</g>\n";

    const double glyph = 0.025 * kCanvas;
    for (const auto& s : g.supports()) {
        const auto p = at(s.node);
        const double cx = f.px(p.x);
        const double cy = f.py(p.y);
        out += fmt::format("<polygon points=\"{},{} {},{} {},{}\" fill=\"#444\"/>\n", num(cx),
                           num(cy), num(cx - glyph), num(cy + glyph), num(cx - glyph),
                           num(cy - glyph));
    }
    for (const auto& l : g.loads()) {
        const double mag = std::hypot(l.px, l.py);
        if (!(mag > 0.0)) continue;
        const auto p = at(l.node);
        const double cx = f.px(p.x);
        const double cy = f.py(p.y);
        const double len = 4.0 * glyph;
        // Arrow ends at the node; screen y points down.
        const double ux = l.px / mag;
        const double uy = -l.py / mag;
        const double tx = cx - ux * len;
        const double ty = cy - uy * len;
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2e7d32\" stroke-width=\"{}\"/>\n",
            num(tx), num(ty), num(cx), num(cy), num(0.2 * glyph));
        out += fmt::format("<polygon points=\"{},{} {},{} {},{}\" fill=\"#2e7d32\"/>\n", num(cx),
                           num(cy), num(cx - ux * glyph - uy * 0.5 * glyph),
                           num(cy - uy * glyph + ux * 0.5 * glyph),
                           num(cx - ux * glyph + uy * 0.5 * glyph),
                           num(cy - uy * glyph - ux * 0.5 * glyph));
    }
    out += "</svg>\n";
    return out;
}

std::string front_svg(std::span<const ParetoPoint> points, std::span<const Objectives> reference,
                      std::optional<Window> window) {
    std::vector<Point> all;
    for (const auto& p : points) all.push_back({p.S[0], p.S[1]});
    for (const auto& r : reference) all.push_back({r[0], r[1]});
    Window w = window ? *window : enclose(all);
    if (!window) {
        w.x_min = std::min(w.x_min, 0.0);
        w.y_min = std::min(w.y_min, 0.0);
    }
    const Frame f(w);
    auto inside = [&](double a, double b) {
        return a >= w.x_min && a <= w.x_max && b >= w.y_min && b <= w.y_max;
    };

    std::string out = header(f);
    out += fmt::format(
        "<g stroke=\"black\" stroke-width=\"1\">\n"
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n"
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\"/>\n</g>\n",
        num(f.px(w.x_min)), num(f.py(w.y_min)), num(f.px(w.x_max)), num(f.py(w.y_max)));
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"16\" text-anchor=\"end\">Fx</text>\n"
        "<text x=\"{}\" y=\"{}\" font-size=\"16\">Fy</text>\n",
        num(f.px(w.x_max)), num(f.py(w.y_min) + 24.0), num(f.px(w.x_min) + 6.0),
        num(f.py(w.y_max) + 4.0));

    const double arm = 6.0;
    out += "<g stroke=\"#1f4e9c\" stroke-width=\"1.5\">\n";
    for (const auto& p : points) {
        if (!inside(p.S[0], p.S[1])) continue;
        const double cx = f.px(p.S[0]);
        const double cy = f.py(p.S[1]);
        out += fmt::format("<path d=\"M{} {}H{}M{} {}V{}\"/>\n", num(cx - arm), num(cy),
                           num(cx + arm), num(cx), num(cy - arm), num(cy + arm));
    }
    out += "</g>\n<g fill=\"black\">\n";
    for (const auto& r : reference) {
        if (!inside(r[0], r[1])) continue;
        out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\"/>\n", num(f.px(r[0])),
                           num(f.py(r[1])));
    }
    out += "</g>\n</svg>\n";
    return out;
}

} // namespace fdtruss
