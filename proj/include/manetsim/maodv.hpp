// Tree-based multicast: on-demand route discovery (RREQ/RREP), MACT tree
// activation, group leadership with Group Hello floods, downstream-initiated
// link repair, pruning, and partition merge keyed on leader id.
#pragma once

#include <deque>
#include <map>
#include <set>
#include <vector>

#include "manetsim/protocol.hpp"

namespace manet {

class MaodvNode : public ProtocolNode {
public:
    MaodvNode(NodeContext& ctx, const ProtocolConfig& cfg)
        : ProtocolNode(ctx, cfg), dup_(cfg.dup_horizon) {}

    void join(GroupId group) override;
    void leave(GroupId group) override;
    void on_app_data(GroupId group, int payload_size, uint32_t seq) override;
    void on_packet(const Packet& p, NodeId from) override;
    void on_timer(int key) override;
    void on_link_break(NodeId next_hop, const Packet& p) override;

    // state inspection
    bool is_member(GroupId g) const;
    bool on_tree(GroupId g) const;
    bool is_leader(GroupId g) const;
    NodeId leader_of(GroupId g) const;
    NodeId upstream_of(GroupId g) const;
    std::vector<NodeId> activated_neighbors(GroupId g) const;
    std::vector<NodeId> downstream_of(GroupId g) const;
    uint32_t group_seq_of(GroupId g) const;
    int depth_of(GroupId g) const;

private:
    struct RouteEntry {
        NodeId next_hop = kNoNode;
        int hop_count = 0;
        double expires = 0.0;
    };

    struct TreeEdge {
        bool downstream = false; // direction relative to the leader
    };

    struct GroupState {
        bool member = false;
        bool on_tree = false;
        bool leader = false;
        NodeId known_leader = kNoNode;
        uint32_t seq = 0;
        int depth = 0; // hops to leader along the activated path
        NodeId upstream = kNoNode;
        std::map<NodeId, TreeEdge> next_hops; // activated edges only
        double upstream_refreshed = 0.0;
        bool liveness_running = false;

        // pending discovery
        bool discovering = false;
        bool repair = false;
        bool merging = false;
        NodeId merge_target = kNoNode;
        int attempts = 0;
        uint32_t rreq_id = 0;
        bool have_reply = false;
        uint32_t best_seq = 0;
        int best_hops = 0;
        NodeId best_from = kNoNode;
        uint16_t best_leader_hops = 0;
        NodeId best_leader = kNoNode;
        EventHandle deadline;
        EventHandle holdoff;
        EventHandle merge_timer;
        NodeId pending_merge_leader = kNoNode;

        std::deque<Packet> buffer; // data awaiting a route
    };

    // best RREP relayed per (requester, rreq_id); consumed when MACT passes
    struct RelayCandidate {
        uint32_t seq = 0;
        int hops = 0;
        NodeId from = kNoNode;
        uint16_t leader_hops = 0;
        NodeId leader = kNoNode;
        double expires = 0.0;
    };

    GroupState& group(GroupId g) { return groups_[g]; }
    const GroupState* find_group(GroupId g) const;

    void originate_rreq(GroupId g, bool join_flag);
    void send_rreq(GroupId g, GroupState& st, int ttl);
    void handle_rreq(const Packet& p, NodeId from);
    void handle_rrep(const Packet& p, NodeId from);
    void handle_mact(const Packet& p, NodeId from);
    void handle_group_hello(const Packet& p, NodeId from);
    void handle_data(const Packet& p, NodeId from);

    void on_discovery_deadline(GroupId g);
    void attach_via_best(GroupId g, GroupState& st);
    void become_leader(GroupId g, GroupState& st);
    void start_repair(GroupId g, GroupState& st);
    void dissolve(GroupId g, GroupState& st);
    void leaf_collapse_check(GroupId g, GroupState& st);
    void send_mact(GroupId g, NodeId to, MactType type, NodeId requester, uint32_t rreq_id);
    void forward_data_on_tree(const Packet& p, NodeId except);
    void flush_buffer(GroupId g, GroupState& st);
    void update_route(NodeId dest, NodeId next_hop, int hops);
    RouteEntry* fresh_route(NodeId dest);
    void ensure_liveness_timer(GroupId g, GroupState& st);
    void clear_tree_state(GroupState& st);

    // timer key encoding: kind * 1024 + group
    enum TimerKind { kHello = 1, kLiveness = 2, kDeadline = 3, kHoldoff = 4, kMerge = 5 };
    int timer_key(TimerKind k, GroupId g) const { return k * 1024 + g; }

    DuplicateCache dup_;
    std::map<GroupId, GroupState> groups_;
    std::map<NodeId, RouteEntry> routes_;
    std::map<std::pair<NodeId, uint32_t>, RelayCandidate> relay_;
    uint32_t next_rreq_id_ = 0;
};

} // namespace manet
