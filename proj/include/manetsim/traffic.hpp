// Multicast session planning and constant-bit-rate traffic.
#pragma once

#include <string>
#include <vector>

#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"

namespace manet {

struct GroupSpec {
    GroupId id = 0;
    std::vector<NodeId> members;
    std::vector<NodeId> sources;
};

struct GroupPlan {
    std::vector<GroupSpec> groups;

    bool is_member(GroupId g, NodeId n) const;
    // Receivers of a flow from `origin`: members excluding the origin itself.
    int receiver_count(GroupId g, NodeId origin) const;
    void validate(int node_count) const;
};

// Uniform sampling without replacement within each group; a node may belong
// to several groups. Sources are drawn from the group's members.
GroupPlan build_group_plan(int nodes, int group_count, int members_per_group,
                           int sources_per_group, RngStream& rng);

// Group membership aligned with mobility groups: multicast group g gets the
// nodes of mobility group (g mod mobility_group_count).
GroupPlan build_aligned_group_plan(int group_count, int sources_per_group,
                                   const std::vector<int>& mobility_group_of, RngStream& rng);

struct CbrFlow {
    int flow_id = 0;
    NodeId source = kNoNode;
    GroupId group = 0;
    int packet_size = 512;
    double interval = 0.25;
    double start_at = 0.0;
    double stop_at = 0.0;
};

// Ticks at start_at, start_at + k*interval, ... strictly before stop_at.
long expected_tick_count(const CbrFlow& flow);

// One flow per (group, source) pair of the plan, start times staggered
// uniformly over [start_min, start_max].
std::vector<CbrFlow> build_flows(const GroupPlan& plan, int packet_size, double interval,
                                 double start_min, double start_max, double stop_at,
                                 RngStream& rng);

// Plain-text table: flow_id source group size interval start stop
std::string serialize_traffic_plan(const std::vector<CbrFlow>& flows);
std::vector<CbrFlow> parse_traffic_plan(const std::string& text);

} // namespace manet
