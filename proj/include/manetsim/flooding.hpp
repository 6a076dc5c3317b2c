// Flooding baseline: every node rebroadcasts each unseen data packet. Serves
// as the delivery ceiling against the graph-reachability oracle.
#pragma once

#include <set>

#include "manetsim/protocol.hpp"

namespace manet {

class FloodingNode : public ProtocolNode {
public:
    FloodingNode(NodeContext& ctx, const ProtocolConfig& cfg)
        : ProtocolNode(ctx, cfg), dup_(cfg.dup_horizon) {}

    void join(GroupId group) override { memberships_.insert(group); }
    void leave(GroupId group) override { memberships_.erase(group); }

    void on_app_data(GroupId group, int payload_size, uint32_t seq) override;
    void on_packet(const Packet& p, NodeId from) override;
    void on_timer(int) override {}
    void on_link_break(NodeId, const Packet&) override {}

    bool is_member(GroupId g) const { return memberships_.count(g) != 0; }

private:
    DuplicateCache dup_;
    std::set<GroupId> memberships_;
};

} // namespace manet
