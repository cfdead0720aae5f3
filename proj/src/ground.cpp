#include "fdtruss/ground.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "fdtruss/errors.hpp"

namespace fdtruss {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

} // namespace

GroundStructure::GroundStructure(std::vector<Point> nodes, std::vector<Member> members,
                                 std::vector<Support> supports, std::vector<Load> loads,
                                 std::vector<NodeId> extra_fixed)
    : ref_nodes_(std::move(nodes)),
      members_(std::move(members)),
      supports_(std::move(supports)),
      loads_(std::move(loads)) {
    const std::size_t n = ref_nodes_.size();
    require(n >= 2, "ground structure needs at least two nodes");
    require(!members_.empty(), "ground structure has no members");

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& mem : members_) {
        require(mem.end_a.value < n && mem.end_b.value < n, "member references unknown node");
        require(mem.end_a != mem.end_b, "member connects a node to itself");
        auto key = std::minmax(mem.end_a.value, mem.end_b.value);
        require(seen.insert(key).second, "duplicate member");
    }

    is_fixed_.assign(n, false);
    require(!supports_.empty(), "ground structure has no supports");
    for (const auto& s : supports_) {
        require(s.node.value < n, "support references unknown node");
        require(s.fix_x || s.fix_y, "support constrains no component");
        is_fixed_[s.node.value] = true;
    }
    for (const auto& l : loads_) {
        require(l.node.value < n, "load references unknown node");
        is_fixed_[l.node.value] = true;
    }
    for (auto id : extra_fixed) {
        require(id.value < n, "fixed node out of range");
        is_fixed_[id.value] = true;
    }

    slot_.assign(n, Slot{});
    for (std::size_t i = 0; i < n; ++i) {
        if (is_fixed_[i]) {
            slot_[i].fixed = fixed_.size();
            fixed_.push_back(NodeId{i});
        } else {
            slot_[i].free = free_.size();
            free_.push_back(NodeId{i});
        }
    }

    auto [xmin, xmax] = std::minmax_element(ref_nodes_.begin(), ref_nodes_.end(),
                                            [](auto& a, auto& b) { return a.x < b.x; });
    auto [ymin, ymax] = std::minmax_element(ref_nodes_.begin(), ref_nodes_.end(),
                                            [](auto& a, auto& b) { return a.y < b.y; });
    ref_width_ = xmax->x - xmin->x;
    ref_height_ = ymax->y - ymin->y;

    require(is_connected(*this), "member graph is not connected");
}

bool GroundStructure::is_support(NodeId n) const {
    return std::any_of(supports_.begin(), supports_.end(),
                       [&](const Support& s) { return s.node == n; });
}

Point GroundStructure::node(NodeId n) const {
    const auto& p = ref_nodes_[n.value];
    return {p.x * sx_, p.y * sy_};
}

std::vector<double> GroundStructure::x_coords() const {
    std::vector<double> x(node_count());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = ref_nodes_[i].x * sx_;
    }
    return x;
}

std::vector<double> GroundStructure::y_coords() const {
    std::vector<double> y(node_count());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = ref_nodes_[i].y * sy_;
    }
    return y;
}

std::vector<double> GroundStructure::px() const {
    std::vector<double> p(node_count(), 0.0);
    for (const auto& l : loads_) {
        p[l.node.value] += l.px;
    }
    return p;
}

std::vector<double> GroundStructure::py() const {
    std::vector<double> p(node_count(), 0.0);
    for (const auto& l : loads_) {
        p[l.node.value] += l.py;
    }
    return p;
}

GridLayout grid_layout(std::size_t nx, std::size_t ny, double width, double height) {
    require(nx >= 1 && ny >= 1, "grid needs at least one cell in each direction");
    require(width > 0.0 && height > 0.0, "grid dimensions must be positive");

    GridLayout out;
    const double dx = width / static_cast<double>(nx);
    const double dy = height / static_cast<double>(ny);
    for (std::size_t i = 0; i <= nx; ++i) {
        for (std::size_t j = 0; j <= ny; ++j) {
            out.nodes.push_back({static_cast<double>(i) * dx, static_cast<double>(j) * dy});
        }
    }
    auto id = [ny](std::size_t i, std::size_t j) { return grid_node(i, j, ny); };
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            out.members.push_back({id(i, j), id(i + 1, j)});
        }
    }
    for (std::size_t i = 0; i <= nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            out.members.push_back({id(i, j), id(i, j + 1)});
        }
    }
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            out.members.push_back({id(i, j), id(i + 1, j + 1)});
            out.members.push_back({id(i + 1, j), id(i, j + 1)});
        }
    }
    return out;
}

GroundStructure generate_grid(std::size_t nx, std::size_t ny, double width, double height,
                              double load_y) {
    auto layout = grid_layout(nx, ny, width, height);
    std::vector<Support> supports;
    for (std::size_t j = 0; j <= ny; ++j) {
        supports.push_back({grid_node(0, j, ny), true, true});
    }
    std::vector<Load> loads{{grid_node(nx, ny / 2, ny), 0.0, load_y}};
    return GroundStructure(std::move(layout.nodes), std::move(layout.members),
                           std::move(supports), std::move(loads));
}

GroundStructure scale_structure(const GroundStructure& g, double sx, double sy) {
    require(sx > 0.0 && sy > 0.0, "scale factors must be positive");
    GroundStructure out = g;
    out.sx_ = g.sx_ * sx;
    out.sy_ = g.sy_ * sy;
    return out;
}

bool is_connected(const GroundStructure& g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& m : g.members()) {
        adj[m.end_a.value].push_back(m.end_b.value);
        adj[m.end_b.value].push_back(m.end_a.value);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n;
}

} // namespace fdtruss
