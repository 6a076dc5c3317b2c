// Adaptive demand-driven multicast: source-specific trees built from receiver
// joins (MULTICAST SOLICITATION / KEEP-ALIVE / RECEIVER JOIN), low-rate
// RECEIVER DISCOVERY floods, traffic-rate monitoring with hop-limited
// RECONNECT repair, passive/explicit acknowledgements, and a per-flow switch
// to network flooding under sustained loss.
#pragma once

#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "manetsim/protocol.hpp"

namespace manet {

class AdmrNode : public ProtocolNode {
public:
    AdmrNode(NodeContext& ctx, const ProtocolConfig& cfg)
        : ProtocolNode(ctx, cfg), dup_(cfg.dup_horizon) {}

    void join(GroupId group) override;
    void leave(GroupId group) override;
    void on_app_data(GroupId group, int payload_size, uint32_t seq) override;
    void on_packet(const Packet& p, NodeId from) override;
    void on_timer(int key) override;
    void on_link_break(NodeId, const Packet&) override {} // tree heals via monitors

    // state inspection
    bool is_member(GroupId g) const { return memberships_.count(g) != 0; }
    bool has_state(NodeId source, GroupId g) const { return trees_.count({source, g}) != 0; }
    bool is_forwarder(NodeId source, GroupId g) const;
    bool is_connected_receiver(NodeId source, GroupId g) const;
    NodeId upstream_of(NodeId source, GroupId g) const;
    std::vector<NodeId> downstream_of(NodeId source, GroupId g) const;
    bool flood_mode(GroupId g) const; // source side
    bool fallback_requested(NodeId source, GroupId g) const;

private:
    using Key = std::pair<NodeId, GroupId>; // (source, group)

    struct AckRec {
        bool pending = false;
        int missed = 0;
    };

    struct TreeState {
        bool is_source = false;
        bool is_receiver = false;
        bool is_forwarder = false;
        bool connected = false;
        NodeId upstream = kNoNode;
        std::map<NodeId, AckRec> downstream;
        double last_data = -1e18;
        double interval = 0.0; // EWMA of observed inter-packet gaps
        int missed = 0;
        bool repairing = false;
        uint32_t repair_seq = 0;
        double last_notify_fwd = -1e18;
        int epoch = 0; // bumps invalidate pending repair timers
        bool monitor_running = false;

        // receiver loss window for the flood fallback
        std::deque<uint8_t> window;
        int window_sum = 0;
        int arrivals_since_tick = 0;
        bool fallback_requested = false;

        // source side
        bool flow_active = false;
        double last_app = -1e18;
        uint32_t discovery_seq = 0;
        bool discovery_timer = false;
        std::set<NodeId> flood_requesters;
    };

    struct RevEntry {
        uint32_t seq = 0;
        NodeId prev = kNoNode;
        double at = -1.0;
    };

    enum TimerKind { kMonitor = 1, kDiscovery, kNotifyWait, kReconnectWait, kKeepaliveWait };

    TreeState* find_state(NodeId source, GroupId g);
    const TreeState* find_state(NodeId source, GroupId g) const;
    void arm(double delay, TimerKind kind, const Key& k, int epoch);
    void ensure_monitor(const Key& k, TreeState& st);
    double effective_interval(const TreeState& st) const;
    bool flow_live(const TreeState& st) const;

    void solicit(GroupId g, bool want_flood);
    void send_discovery(const Key& k, TreeState& st);
    void begin_repair(const Key& k, TreeState& st);
    void send_reconnect(const Key& k, TreeState& st);
    void request_flood(const Key& k, TreeState& st, bool enable);
    void pre_send_ack_accounting(const Key& k, TreeState& st);
    void monitor_fire(const Key& k);
    void erase_state(const Key& k);

    void handle_data(const Packet& p, NodeId from);
    void handle_solicitation(const Packet& p, NodeId from);
    void handle_keepalive(const Packet& p, NodeId from);
    void handle_receiver_join(const Packet& p, NodeId from);
    void handle_discovery(const Packet& p, NodeId from);
    void handle_repair_notification(const Packet& p, NodeId from);
    void handle_reconnect(const Packet& p, NodeId from);
    void handle_reconnect_reply(const Packet& p, NodeId from);
    void handle_explicit_ack(const Packet& p, NodeId from);
    void handle_flood_request(const Packet& p, NodeId from);

    DuplicateCache dup_;
    std::set<GroupId> memberships_;
    std::map<Key, TreeState> trees_;
    uint32_t solicit_seq_ = 0;

    std::map<Key, RevEntry> solicit_rev_;   // keyed by (receiver, group)
    std::map<Key, RevEntry> discovery_rev_; // keyed by (source, group)
    std::map<std::tuple<NodeId, GroupId, NodeId>, RevEntry> keepalive_rev_; // +receiver
    std::map<std::tuple<NodeId, GroupId, NodeId>, RevEntry> reconnect_rev_; // +repairer
    std::set<std::tuple<NodeId, GroupId, NodeId, uint32_t>> reconnect_up_seen_;

    std::map<int, std::tuple<int, Key, int>> timers_; // token -> kind, key, epoch
    int next_token_ = 1;
};

} // namespace manet
