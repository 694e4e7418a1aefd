#include "de/refiner.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace de {
namespace {

// Stored displacement of `child_id`'s channel read at `at`, or nullopt
// when the channel is absent, the pixel is off-grid, or the read lands
// outside the encoded disk (exact zero vector).
std::optional<Vec2> read_edge(const FieldStack& stack, int child_id, Vec2 at) {
    const auto id = static_cast<std::size_t>(child_id);
    const Grid& gx = stack.disp_x[id];
    const Grid& gy = stack.disp_y[id];
    if (gx.empty() || gy.empty()) return std::nullopt;
    const int px = static_cast<int>(std::llround(at.x));
    const int py = static_cast<int>(std::llround(at.y));
    if (!gx.in_bounds(px, py)) return std::nullopt;
    const double dx = gx.at(px, py);
    const double dy = gy.at(px, py);
    if (dx == 0.0 && dy == 0.0) return std::nullopt;
    return Vec2{dx, dy};
}

}  // namespace

PersonPose refine_pose(const PersonPose& pose, const FieldStack& stack,
                       const SkeletonSpec& skeleton, double conf_threshold) {
    PersonPose out = pose;
    const double z = stack.diag();
    const int center = skeleton.center_id();

    // Neighbors joined to `id` by an encoded displacement edge. Each pair
    // lists the channel owner (the child side) so the read direction is known.
    struct Edge {
        int neighbor;
        int channel_owner;
    };
    const auto edges_of = [&](int id) {
        std::vector<Edge> edges;
        if (const auto parent = skeleton.hierarchy_parent(id))
            edges.push_back({*parent, id});
        for (int child : skeleton.hierarchy_children(id)) edges.push_back({child, child});
        if (skeleton.group(id) == JointGroup::Facial) edges.push_back({center, id});
        if (id == center)
            for (int f : skeleton.facial_ids()) edges.push_back({f, f});
        return edges;
    };

    std::vector<int> order;
    for (JointGroup g : {JointGroup::Root, JointGroup::AdjacencyLevel1,
                         JointGroup::AdjacencyLevel2, JointGroup::Facial})
        for (int id : skeleton.ids_in_group(g)) order.push_back(id);

    for (int id : order) {
        Keypoint& own = out.joints[static_cast<std::size_t>(id)];
        if (!own.visible) continue;

        struct Participant {
            double conf;
            Vec2 estimate;
        };
        std::vector<Participant> participants;
        bool dominates = false;
        for (const Edge& edge : edges_of(id)) {
            const Keypoint& nb = out.joints[static_cast<std::size_t>(edge.neighbor)];
            if (!(nb.confidence > conf_threshold)) continue;
            // Propagate the neighbor through the edge field: the stored
            // vector points child -> parent, so negate when the channel
            // lives on the joint being refined.
            const bool stored_here = edge.channel_owner == id;
            const Vec2 read_at = stored_here
                                     ? own.pos()
                                     : out.joints[static_cast<std::size_t>(edge.neighbor)].pos();
            const auto disp = read_edge(stack, edge.channel_owner, read_at);
            if (!disp) continue;
            const double sign = stored_here ? -1.0 : 1.0;
            participants.push_back({nb.confidence, nb.pos() + *disp * (sign * z)});
            dominates = dominates || nb.confidence > own.confidence;
        }
        if (participants.empty() || !dominates) continue;

        double q = own.confidence;
        Vec2 sum = own.pos() * own.confidence;
        for (const Participant& p : participants) {
            q += p.conf;
            sum = sum + p.estimate * p.conf;
        }
        own.x = sum.x / q;
        own.y = sum.y / q;
    }
    return out;
}

}  // namespace de
