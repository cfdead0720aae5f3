#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace fdtruss {

struct NodeId {
    std::size_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct Member {
    NodeId end_a;
    NodeId end_b;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// A displacement support. Pin supports constrain both components.
struct Support {
    NodeId node;
    bool fix_x = true;
    bool fix_y = true;
};

/// Point load applied at a fixed node.
struct Load {
    NodeId node;
    double px = 0.0;
    double py = 0.0;
};

/// Immutable problem definition: nodes, candidate members, the free/fixed
/// partition, supports and loads.
///
/// Coordinates are stored as reference values plus a cumulative anisotropic
/// scale, so repeated scaling composes exactly:
/// scale(scale(g, a, b), c, d) and scale(g, a*c, b*d) hold identical fields.
///
/// Fixed nodes are the supports, the loaded nodes, and any node the caller
/// pins explicitly. Their coordinates do not change during optimization.
/// Free-node coordinates stored here are the initial ground-structure layout
/// and are used only as a reference (uniform-section analysis, rendering).
class GroundStructure {
public:
    /// Validates every invariant; throws ConfigError on violation.
    GroundStructure(std::vector<Point> nodes, std::vector<Member> members,
                    std::vector<Support> supports, std::vector<Load> loads,
                    std::vector<NodeId> extra_fixed = {});

    std::size_t node_count() const { return ref_nodes_.size(); }
    std::size_t member_count() const { return members_.size(); }

    std::span<const Member> members() const { return members_; }
    std::span<const Support> supports() const { return supports_; }
    std::span<const Load> loads() const { return loads_; }

    /// Sorted ascending.
    std::span<const NodeId> free_nodes() const { return free_; }
    std::span<const NodeId> fixed_nodes() const { return fixed_; }

    bool is_fixed(NodeId n) const { return is_fixed_[n.value]; }
    bool is_support(NodeId n) const;

    /// Position in the free (resp. fixed) block, or npos.
    std::size_t free_index(NodeId n) const { return slot_[n.value].free; }
    std::size_t fixed_index(NodeId n) const { return slot_[n.value].fixed; }

    /// Current (scaled) coordinate of a node.
    Point node(NodeId n) const;
    std::vector<double> x_coords() const;
    std::vector<double> y_coords() const;

    /// Nodal load vectors of length n (zero on free nodes).
    std::vector<double> px() const;
    std::vector<double> py() const;

    double width() const { return ref_width_ * sx_; }
    double height() const { return ref_height_ * sy_; }
    double scale_x() const { return sx_; }
    double scale_y() const { return sy_; }

    friend GroundStructure scale_structure(const GroundStructure& g, double sx, double sy);

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct Slot {
        std::size_t free = npos;
        std::size_t fixed = npos;
    };

    std::vector<Point> ref_nodes_;
    std::vector<Member> members_;
    std::vector<Support> supports_;
    std::vector<Load> loads_;
    std::vector<NodeId> free_;
    std::vector<NodeId> fixed_;
    std::vector<bool> is_fixed_;
    std::vector<Slot> slot_;
    double ref_width_ = 0.0;
    double ref_height_ = 0.0;
    double sx_ = 1.0;
    double sy_ = 1.0;
};

/// Member count of a generated nx-by-ny grid with crossing diagonals.
constexpr std::size_t grid_member_count(std::size_t nx, std::size_t ny) {
    return nx * (ny + 1) + ny * (nx + 1) + 2 * nx * ny;
}

/// Grid node numbering: column-major, bottom to top within a column, columns
/// left to right. Node (i, j) with 0 <= i <= nx, 0 <= j <= ny has index
/// i * (ny + 1) + j. On the 3x2 grid node 10 is the right-edge mid-height node.
constexpr NodeId grid_node(std::size_t i, std::size_t j, std::size_t ny) {
    return NodeId{i * (ny + 1) + j};
}

/// Node coordinates and member connectivity of a uniform grid. Members are
/// listed as horizontal edges, then vertical edges, then the two diagonals
/// of each cell. Crossing diagonals share no node.
struct GridLayout {
    std::vector<Point> nodes;
    std::vector<Member> members;
};

GridLayout grid_layout(std::size_t nx, std::size_t ny, double width, double height);

/// Cantilever ground structure: every left-edge node is a pin support and a
/// load of `load_y` acts at the right-edge node closest to mid-height.
GroundStructure generate_grid(std::size_t nx, std::size_t ny, double width, double height,
                              double load_y = -1.0);

GroundStructure scale_structure(const GroundStructure& g, double sx, double sy);

/// True if every node is reachable through members.
bool is_connected(const GroundStructure& g);

} // namespace fdtruss
