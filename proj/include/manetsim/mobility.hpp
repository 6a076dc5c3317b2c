// Node motion: Random Waypoint, Reference Point Group, and Manhattan grid
// generators, piecewise-linear path evaluation, ns-2 trace import/export,
// and the link-change mobility metric.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manetsim/geom.hpp"
#include "manetsim/rng.hpp"

namespace manet {

// One motion leg: straight-line travel start_pos -> dest_pos at `speed`,
// then hold at dest_pos for pause_after seconds. speed == 0 encodes a
// stationary leg whose extent is pause_after.
struct WaypointSegment {
    double start_time = 0.0;
    Vec2 start_pos;
    Vec2 dest_pos;
    double speed = 0.0;
    double pause_after = 0.0;

    double travel_time() const {
        return speed > 0.0 ? distance(start_pos, dest_pos) / speed : 0.0;
    }
    double end_time() const { return start_time + travel_time() + pause_after; }
};

class MobilityPath {
public:
    MobilityPath() = default;
    MobilityPath(int node, std::vector<WaypointSegment> segments, double duration);

    int node() const { return node_; }
    double duration() const { return duration_; }
    const std::vector<WaypointSegment>& segments() const { return segments_; }

    // Exact piecewise-linear interpolation; throws OutOfRangeTime outside
    // [0, duration].
    Vec2 position_at(double t) const;

private:
    int node_ = 0;
    std::vector<WaypointSegment> segments_;
    double duration_ = 0.0;
};

struct RwpParams {
    double v_min = 1.0;
    double v_max = 10.0;
    double pause = 2.0;

    void validate() const;
};

struct RpgmParams {
    int group_count = 5;
    int nodes_per_group = 10;
    double max_deviation = 50.0;
    double group_v_min = 1.0;
    double group_v_max = 10.0;
    double group_pause = 2.0;
    double member_speed_ratio = 0.5;

    void validate(int nodes) const;
};

struct ManhattanParams {
    int h_streets = 5;
    int v_streets = 5;
    double v_min = 1.0;
    double v_max = 10.0;
    double p_left = 0.25;
    double p_right = 0.25;
    double p_straight = 0.5;

    void validate() const;
};

std::vector<MobilityPath> generate_rwp(const RwpParams& params, const Area& area, int nodes,
                                       double duration, uint64_t seed);

// RPGM with generator internals exposed so cohesion checks can compare a
// member against its (clipped) reference point.
struct RpgmDetail {
    std::vector<MobilityPath> members;
    std::vector<MobilityPath> centers; // one per group
    std::vector<Vec2> offsets;         // per member, relative to group center
    std::vector<int> group_of;         // per member
};

RpgmDetail generate_rpgm_detail(const RpgmParams& params, const Area& area, int nodes,
                                double duration, uint64_t seed);

std::vector<MobilityPath> generate_rpgm(const RpgmParams& params, const Area& area, int nodes,
                                        double duration, uint64_t seed);

std::vector<MobilityPath> generate_manhattan(const ManhattanParams& params, const Area& area,
                                             int nodes, double duration, uint64_t seed);

// ns-2 mobility trace text:
//   $node_(i) set X_ <x>   / Y_ / Z_ 0.0       initial position
//   $ns_ at <t> "$node_(i) setdest <x> <y> <speed>"
std::string export_ns2(const std::vector<MobilityPath>& paths);
std::vector<MobilityPath> import_ns2(const std::string& text);

// Counts connectivity up/down transitions between consecutive samples over
// all unordered pairs, sampling every sample_dt seconds.
long link_changes(const std::vector<MobilityPath>& paths, double range, double sample_dt);

} // namespace manet
