// Mesh-based multicast: sources flood periodic JOIN QUERY messages while a
// flow is active, members answer with JOIN REPLY along the stored reverse
// path, and reply forwarders hold soft forwarding-group state that expires
// unless renewed.
#pragma once

#include <map>
#include <set>

#include "manetsim/protocol.hpp"

namespace manet {

class OdmrpNode : public ProtocolNode {
public:
    OdmrpNode(NodeContext& ctx, const ProtocolConfig& cfg)
        : ProtocolNode(ctx, cfg), dup_(cfg.dup_horizon) {}

    void join(GroupId group) override { memberships_.insert(group); }
    void leave(GroupId group) override { memberships_.erase(group); }
    void on_app_data(GroupId group, int payload_size, uint32_t seq) override;
    void on_packet(const Packet& p, NodeId from) override;
    void on_timer(int key) override;
    void on_link_break(NodeId, const Packet&) override {} // next query heals

    // state inspection
    bool is_member(GroupId g) const { return memberships_.count(g) != 0; }
    bool forwarding_enabled(GroupId g) const;
    NodeId reverse_hop(NodeId source, GroupId g) const;

private:
    struct QueryCacheEntry {
        uint32_t query_seq = 0;
        NodeId previous_hop = kNoNode;
        double received_at = -1.0;
    };
    struct ForwardingState {
        bool enabled = false;
        double refreshed_at = 0.0;
        double expires_at = 0.0;
    };
    struct SourceFlow {
        bool active = false;
        double last_app = 0.0;
        uint32_t query_seq = 0;
        bool timer_running = false;
    };

    void handle_query(const Packet& p, NodeId from);
    void handle_reply(const Packet& p, NodeId from);
    void handle_data(const Packet& p, NodeId from);
    void send_query(GroupId g, SourceFlow& flow);
    void send_reply(NodeId source, GroupId g, uint32_t query_seq, NodeId to);

    int timer_key(GroupId g) const { return g; }

    DuplicateCache dup_;
    std::set<GroupId> memberships_;
    std::map<std::pair<NodeId, GroupId>, QueryCacheEntry> query_cache_;
    std::map<GroupId, ForwardingState> forwarding_;
    std::map<GroupId, SourceFlow> flows_;
    // last query round whose reply this node already forwarded, per source
    std::map<std::pair<NodeId, GroupId>, uint32_t> reply_forwarded_;
};

} // namespace manet
