// Protocol-facing contract. A protocol node sees only its own events
// (application data, packet arrivals, timers, link breaks, join/leave) and
// emits only transmissions, timers, and application deliveries through its
// NodeContext. It never reads positions or other nodes' tables.
#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>

#include "manetsim/kernel.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"

namespace manet {

struct MaodvConfig {
    double group_hello_period = 5.0;
    double rrep_wait = 1.0;
    int rreq_retries = 2;
    double route_lifetime = 10.0;
    int buffer_n = 64;
    // tree upstream declared dead after this many hello periods without any
    // overheard refresh from the upstream neighbor
    double liveness_factor = 2.5;
    double leader_holdoff = 2.0;
    double merge_delay_min = 0.5;
    double merge_delay_max = 1.5;
};

struct OdmrpConfig {
    double query_period = 3.0;
    double fg_timeout = 9.0;   // 3 x query_period
    double flow_idle = 6.0;    // 2 x query_period of silence ends a flow
    double reply_jitter = 0.025;
};

struct AdmrConfig {
    int repair_threshold = 3;
    int reconnect_hop_limit = 3;
    double discovery_period = 30.0;
    int ack_miss_limit = 5;
    double fallback_pdr = 0.5;
    double fallback_exit = 0.8;
    int fallback_window = 20;
    double ewma_weight = 0.25;
    double notify_wait = 0.25;    // grace for a repair notification from upstream
    double reconnect_wait = 1.5;  // give up on an unanswered reconnect
    double keepalive_wait = 2.0;  // solicitation round-trip allowance
    double interval_slack = 1.5;  // a gap counts as missed beyond slack x interval
};

struct ProtocolConfig {
    int data_ttl = 32;
    int control_ttl = 32;
    double rebroadcast_jitter = 0.010;
    double dup_horizon = 30.0;
    MaodvConfig maodv;
    OdmrpConfig odmrp;
    AdmrConfig admr;
};

class NodeContext {
public:
    virtual ~NodeContext() = default;

    virtual NodeId self() const = 0;
    virtual double now() const = 0;
    virtual RngStream& rng() = 0;
    virtual uint64_t new_uid() = 0;
    virtual uint32_t next_data_seq() = 0;

    virtual void broadcast(const Packet& p) = 0;
    virtual void unicast(NodeId next_hop, const Packet& p) = 0;
    virtual void broadcast_after(double delay, const Packet& p) = 0;
    virtual void unicast_after(double delay, NodeId next_hop, const Packet& p) = 0;

    virtual EventHandle schedule_timer(double delay, int key) = 0;
    virtual bool cancel_timer(EventHandle& h) = 0;

    virtual void deliver_to_app(const Packet& p) = 0;
};

class ProtocolNode {
public:
    ProtocolNode(NodeContext& ctx, const ProtocolConfig& cfg) : ctx_(ctx), cfg_(cfg) {}
    virtual ~ProtocolNode() = default;

    virtual void join(GroupId group) = 0;
    virtual void leave(GroupId group) = 0;
    virtual void on_app_data(GroupId group, int payload_size, uint32_t seq) = 0;
    virtual void on_packet(const Packet& p, NodeId from) = 0;
    virtual void on_timer(int key) = 0;
    virtual void on_link_break(NodeId next_hop, const Packet& p) = 0;

protected:
    NodeContext& ctx_;
    ProtocolConfig cfg_;
};

// Seen-uid window with a fixed expiry horizon; a cached uid is never
// re-forwarded.
class DuplicateCache {
public:
    explicit DuplicateCache(double horizon) : horizon_(horizon) {}

    // True when the uid was not seen within the horizon (and is now cached).
    bool check_and_insert(uint64_t uid, double now) {
        while (!order_.empty() && order_.front().first <= now) {
            seen_.erase(order_.front().second);
            order_.pop_front();
        }
        if (!seen_.insert(uid).second) return false;
        order_.emplace_back(now + horizon_, uid);
        return true;
    }

    bool seen(uint64_t uid) const { return seen_.count(uid) != 0; }

private:
    double horizon_;
    std::unordered_set<uint64_t> seen_;
    std::deque<std::pair<double, uint64_t>> order_;
};

using ProtocolFactory =
    std::function<std::unique_ptr<ProtocolNode>(NodeContext&, const ProtocolConfig&)>;

// name in {flooding, maodv, odmrp, admr}, case-insensitive.
// Throws UnknownProtocol otherwise.
ProtocolFactory find_protocol(const std::string& name);
std::string canonical_protocol_name(const std::string& name);

} // namespace manet
