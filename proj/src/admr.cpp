#include "manetsim/admr.hpp"

#include <algorithm>

namespace manet {

/* ====================================================================
   Inspection
   ==================================================================== */

AdmrNode::TreeState* AdmrNode::find_state(NodeId source, GroupId g) {
    auto it = trees_.find({source, g});
    return it == trees_.end() ? nullptr : &it->second;
}
const AdmrNode::TreeState* AdmrNode::find_state(NodeId source, GroupId g) const {
    auto it = trees_.find({source, g});
    return it == trees_.end() ? nullptr : &it->second;
}

bool AdmrNode::is_forwarder(NodeId source, GroupId g) const {
    const TreeState* st = find_state(source, g);
    return st && st->is_forwarder && st->connected;
}
bool AdmrNode::is_connected_receiver(NodeId source, GroupId g) const {
    const TreeState* st = find_state(source, g);
    return st && st->is_receiver && st->connected;
}
NodeId AdmrNode::upstream_of(NodeId source, GroupId g) const {
    const TreeState* st = find_state(source, g);
    return st ? st->upstream : kNoNode;
}
std::vector<NodeId> AdmrNode::downstream_of(NodeId source, GroupId g) const {
    std::vector<NodeId> out;
    if (const TreeState* st = find_state(source, g))
        for (const auto& [nb, rec] : st->downstream) out.push_back(nb);
    return out;
}
bool AdmrNode::flood_mode(GroupId g) const {
    const TreeState* st = find_state(ctx_.self(), g);
    return st && !st->flood_requesters.empty();
}
bool AdmrNode::fallback_requested(NodeId source, GroupId g) const {
    const TreeState* st = find_state(source, g);
    return st && st->fallback_requested;
}

/* ====================================================================
   Timers
   ==================================================================== */

void AdmrNode::arm(double delay, TimerKind kind, const Key& k, int epoch) {
    int tok = next_token_++;
    timers_[tok] = {kind, k, epoch};
    ctx_.schedule_timer(delay, tok);
}

double AdmrNode::effective_interval(const TreeState& st) const {
    return st.interval > 0.0 ? st.interval : 0.5;
}

bool AdmrNode::flow_live(const TreeState& st) const {
    return st.is_source && ctx_.now() - st.last_app <= 2.0;
}

void AdmrNode::ensure_monitor(const Key& k, TreeState& st) {
    st.last_data = std::max(st.last_data, ctx_.now());
    if (st.monitor_running) return;
    st.monitor_running = true;
    arm(effective_interval(st), kMonitor, k, 0);
}

void AdmrNode::erase_state(const Key& k) { trees_.erase(k); }

void AdmrNode::on_timer(int key) {
    auto it = timers_.find(key);
    if (it == timers_.end()) return;
    auto [kind, k, epoch] = it->second;
    timers_.erase(it);

    TreeState* st = find_state(k.first, k.second);
    switch (kind) {
        case kMonitor:
            monitor_fire(k);
            return;
        case kDiscovery: {
            if (!st || !st->is_source) return;
            if (!flow_live(*st)) {
                // flow went quiet; forwarding state decays on its own
                st->flow_active = false;
                st->discovery_timer = false;
                return;
            }
            send_discovery(k, *st);
            arm(cfg_.admr.discovery_period, kDiscovery, k, 0);
            return;
        }
        case kNotifyWait: {
            if (!st || !st->repairing || st->epoch != epoch) return;
            // no REPAIR NOTIFICATION arrived: this node is the most upstream
            // disconnected one
            if (st->is_forwarder) {
                send_reconnect(k, *st);
            } else if (st->is_receiver) {
                solicit(k.second, st->fallback_requested);
                arm(cfg_.admr.keepalive_wait, kKeepaliveWait, k, st->epoch);
            }
            return;
        }
        case kReconnectWait: {
            if (!st || !st->repairing || st->epoch != epoch) return;
            if (st->is_receiver) {
                // escalate: tree repair failed, rejoin from scratch
                solicit(k.second, st->fallback_requested);
                arm(cfg_.admr.keepalive_wait, kKeepaliveWait, k, st->epoch);
            } else {
                erase_state(k); // forwarding state silently removed
            }
            return;
        }
        case kKeepaliveWait: {
            if (!st || !st->repairing || st->epoch != epoch) return;
            erase_state(k); // no live source answered
            return;
        }
        default: return;
    }
}

/* ====================================================================
   Membership / solicitations
   ==================================================================== */

void AdmrNode::join(GroupId g) {
    if (!memberships_.insert(g).second) return;
    solicit(g, false);
}

void AdmrNode::leave(GroupId g) {
    memberships_.erase(g);
    for (auto it = trees_.begin(); it != trees_.end();) {
        if (it->first.second == g && it->second.is_receiver && !it->second.is_forwarder)
            it = trees_.erase(it);
        else
            ++it;
    }
}

void AdmrNode::solicit(GroupId g, bool want_flood) {
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Control;
    p.origin = ctx_.self();
    p.group = g;
    p.ttl = cfg_.control_ttl;
    p.hdr = SolicitationHdr{++solicit_seq_, want_flood};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
}

void AdmrNode::handle_solicitation(const Packet& p, NodeId from) {
    const SolicitationHdr& h = *p.as<SolicitationHdr>();
    if (p.origin == ctx_.self()) return;
    RevEntry& rev = solicit_rev_[{p.origin, p.group}];
    if (rev.at < 0.0 || h.solicit_seq > rev.seq) {
        rev.seq = h.solicit_seq;
        rev.prev = from;
        rev.at = ctx_.now();
    }
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;

    TreeState* st = find_state(ctx_.self(), p.group);
    if (st && flow_live(*st)) {
        if (h.flood_request) st->flood_requesters.insert(p.origin);
        Packet ka;
        ka.uid = ctx_.new_uid();
        ka.kind = PacketKind::Control;
        ka.origin = ctx_.self();
        ka.group = p.group;
        ka.ttl = cfg_.control_ttl;
        ka.hdr = KeepAliveHdr{p.origin, h.solicit_seq};
        ctx_.unicast(rev.prev, ka);
    }
    if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

void AdmrNode::handle_keepalive(const Packet& p, NodeId from) {
    const KeepAliveHdr& h = *p.as<KeepAliveHdr>();
    if (h.receiver == ctx_.self()) {
        Key k{p.origin, p.group};
        TreeState& st = trees_[k];
        st.is_receiver = true;
        st.upstream = from;
        st.connected = true;
        st.repairing = false;
        st.missed = 0;
        ++st.epoch;
        ensure_monitor(k, st);
        Packet rj;
        rj.uid = ctx_.new_uid();
        rj.kind = PacketKind::Control;
        rj.origin = ctx_.self();
        rj.group = p.group;
        rj.ttl = cfg_.control_ttl;
        rj.hdr = ReceiverJoinHdr{p.origin, ctx_.self(), h.solicit_seq, false};
        ctx_.unicast(from, rj);
        return;
    }
    RevEntry& kv = keepalive_rev_[{p.origin, p.group, h.receiver}];
    kv.seq = h.solicit_seq;
    kv.prev = from; // toward the source
    kv.at = ctx_.now();
    auto sit = solicit_rev_.find({h.receiver, p.group});
    if (sit == solicit_rev_.end() || p.ttl <= 1) return;
    Packet copy = p;
    copy.ttl = p.ttl - 1;
    ctx_.unicast(sit->second.prev, copy);
}

void AdmrNode::handle_receiver_join(const Packet& p, NodeId from) {
    const ReceiverJoinHdr& h = *p.as<ReceiverJoinHdr>();
    Key k{h.source, p.group};
    if (h.source == ctx_.self()) {
        TreeState* st = find_state(h.source, p.group);
        if (!st || !st->is_source) return;
        st->downstream[from]; // new or refreshed branch
        return;
    }
    NodeId next = kNoNode;
    if (h.via_discovery) {
        auto it = discovery_rev_.find({h.source, p.group});
        if (it != discovery_rev_.end()) next = it->second.prev;
    } else {
        auto it = keepalive_rev_.find({h.source, p.group, h.receiver});
        if (it != keepalive_rev_.end()) next = it->second.prev;
    }
    if (next == kNoNode || p.ttl <= 1) return;
    TreeState& st = trees_[k];
    st.is_forwarder = true;
    st.connected = true;
    st.upstream = next;
    st.downstream[from];
    st.repairing = false;
    ++st.epoch;
    ensure_monitor(k, st);
    Packet copy = p;
    copy.ttl = p.ttl - 1;
    ctx_.unicast(next, copy);
}

/* ====================================================================
   Receiver discovery
   ==================================================================== */

void AdmrNode::send_discovery(const Key& k, TreeState& st) {
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Control;
    p.origin = ctx_.self();
    p.group = k.second;
    p.ttl = cfg_.control_ttl;
    p.hdr = ReceiverDiscoveryHdr{++st.discovery_seq};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
}

void AdmrNode::handle_discovery(const Packet& p, NodeId from) {
    const ReceiverDiscoveryHdr& h = *p.as<ReceiverDiscoveryHdr>();
    if (p.origin == ctx_.self()) return;
    RevEntry& rev = discovery_rev_[{p.origin, p.group}];
    if (rev.at < 0.0 || h.discovery_seq > rev.seq) {
        rev.seq = h.discovery_seq;
        rev.prev = from;
        rev.at = ctx_.now();
    }
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;

    if (is_member(p.group)) {
        TreeState* st = find_state(p.origin, p.group);
        bool connected = st && st->connected && !st->repairing;
        if (!connected) {
            Key k{p.origin, p.group};
            TreeState& ns = trees_[k];
            ns.is_receiver = true;
            ns.upstream = rev.prev;
            ns.connected = true;
            ns.repairing = false;
            ++ns.epoch;
            ensure_monitor(k, ns);
            Packet rj;
            rj.uid = ctx_.new_uid();
            rj.kind = PacketKind::Control;
            rj.origin = ctx_.self();
            rj.group = p.group;
            rj.ttl = cfg_.control_ttl;
            rj.hdr = ReceiverJoinHdr{p.origin, ctx_.self(), h.discovery_seq, true};
            ctx_.unicast(rev.prev, rj);
        }
    }
    if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

/* ====================================================================
   Data path and acknowledgements
   ==================================================================== */

void AdmrNode::pre_send_ack_accounting(const Key& k, TreeState& st) {
    for (auto it = st.downstream.begin(); it != st.downstream.end();) {
        AckRec& rec = it->second;
        if (rec.pending) {
            if (++rec.missed >= cfg_.admr.ack_miss_limit) {
                it = st.downstream.erase(it); // branch pruned
                continue;
            }
        } else {
            rec.missed = 0;
        }
        rec.pending = true;
        ++it;
    }
    if (st.downstream.empty() && st.is_forwarder && !st.is_receiver && !st.is_source)
        erase_state(k); // nothing left to serve
}

void AdmrNode::on_app_data(GroupId g, int payload_size, uint32_t seq) {
    Key k{ctx_.self(), g};
    TreeState& st = trees_[k];
    bool fresh_flow = !st.is_source || !st.flow_active;
    st.is_source = true;
    st.flow_active = true;
    st.last_app = ctx_.now();
    if (fresh_flow && !st.discovery_timer) {
        st.discovery_timer = true;
        send_discovery(k, st);
        arm(cfg_.admr.discovery_period, kDiscovery, k, 0);
    }
    pre_send_ack_accounting(k, st);

    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Data;
    p.origin = ctx_.self();
    p.group = g;
    p.seq = seq;
    p.ttl = cfg_.data_ttl;
    p.payload_size = payload_size;
    p.hdr = DataHdr{!st.flood_requesters.empty()};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
}

void AdmrNode::handle_data(const Packet& p, NodeId from) {
    const DataHdr& dh = *p.as<DataHdr>();
    Key k{p.origin, p.group};
    TreeState* st = find_state(p.origin, p.group);

    // an overheard forward from a downstream child is its passive ack,
    // duplicates included
    if (st) {
        auto d = st->downstream.find(from);
        if (d != st->downstream.end()) d->second.pending = false;
    }
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;

    if (st) {
        if (st->last_data > -1e17) {
            double gap = ctx_.now() - st->last_data;
            if (gap < 10.0)
                st->interval = st->interval <= 0.0
                                   ? gap
                                   : (1.0 - cfg_.admr.ewma_weight) * st->interval +
                                         cfg_.admr.ewma_weight * gap;
        }
        st->last_data = ctx_.now();
        st->missed = 0;
        ++st->arrivals_since_tick;
        if (st->repairing) {
            st->repairing = false; // traffic resumed on its own
            ++st->epoch;
        }
    }

    if (is_member(p.group) && p.origin != ctx_.self()) {
        ctx_.deliver_to_app(p);
        if (st && st->connected && st->is_receiver && !st->is_forwarder &&
            st->upstream != kNoNode) {
            Packet ack;
            ack.uid = ctx_.new_uid();
            ack.kind = PacketKind::Control;
            ack.origin = ctx_.self();
            ack.group = p.group;
            ack.ttl = 1;
            ack.hdr = ExplicitAckHdr{p.origin, p.seq};
            ctx_.unicast(st->upstream, ack);
        }
    }

    if (p.ttl <= 1) return;
    if (dh.flood) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    } else if (st && st->is_forwarder && st->connected && !st->repairing) {
        pre_send_ack_accounting(k, *st);
        if (find_state(p.origin, p.group)) { // accounting may have erased us
            Packet copy = p;
            copy.ttl = p.ttl - 1;
            ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
        }
    }
}

void AdmrNode::handle_explicit_ack(const Packet& p, NodeId from) {
    const ExplicitAckHdr& h = *p.as<ExplicitAckHdr>();
    TreeState* st = find_state(h.source, p.group);
    if (!st) return;
    AckRec& rec = st->downstream[from];
    rec.pending = false;
    rec.missed = 0;
}

/* ====================================================================
   Monitoring and repair
   ==================================================================== */

void AdmrNode::monitor_fire(const Key& k) {
    TreeState* st = find_state(k.first, k.second);
    if (!st || (!st->is_receiver && !st->is_forwarder)) {
        if (st) st->monitor_running = false;
        return;
    }
    double eff = effective_interval(*st);
    arm(eff, kMonitor, k, 0);

    double gap = ctx_.now() - st->last_data;
    if (gap > cfg_.admr.interval_slack * eff) ++st->missed;

    if (st->is_receiver) {
        uint8_t got = st->arrivals_since_tick > 0 ? 1 : 0;
        st->arrivals_since_tick = 0;
        st->window.push_back(got);
        st->window_sum += got;
        if (static_cast<int>(st->window.size()) > cfg_.admr.fallback_window) {
            st->window_sum -= st->window.front();
            st->window.pop_front();
        }
        if (static_cast<int>(st->window.size()) == cfg_.admr.fallback_window) {
            double ratio =
                static_cast<double>(st->window_sum) / cfg_.admr.fallback_window;
            if (!st->fallback_requested && ratio < cfg_.admr.fallback_pdr) {
                request_flood(k, *st, true);
            } else if (st->fallback_requested && ratio >= cfg_.admr.fallback_exit) {
                request_flood(k, *st, false);
            }
        }
    }

    if (st->missed >= cfg_.admr.repair_threshold && !st->repairing && st->connected)
        begin_repair(k, *st);
}

void AdmrNode::begin_repair(const Key& k, TreeState& st) {
    st.repairing = true;
    ++st.epoch;
    st.missed = 0;
    if (st.is_forwarder) {
        // cancel downstream repairs; the break is above us
        st.last_notify_fwd = ctx_.now();
        for (const auto& [nb, rec] : st.downstream) {
            Packet rn;
            rn.uid = ctx_.new_uid();
            rn.kind = PacketKind::Control;
            rn.origin = ctx_.self();
            rn.group = k.second;
            rn.ttl = 1;
            rn.hdr = RepairNotificationHdr{k.first};
            ctx_.unicast(nb, rn);
        }
    }
    arm(cfg_.admr.notify_wait + ctx_.rng().uniform(0.0, 0.05), kNotifyWait, k, st.epoch);
}

void AdmrNode::handle_repair_notification(const Packet& p, NodeId from) {
    const RepairNotificationHdr& h = *p.as<RepairNotificationHdr>();
    TreeState* st = find_state(h.source, p.group);
    if (!st) return;
    // upstream owns the repair: stand down and give it time
    st->repairing = false;
    ++st->epoch;
    st->missed = 0;
    st->last_data = ctx_.now();
    // propagate down the subtree at most once per repair window; stale
    // downstream links can otherwise echo notifications back and forth
    if (ctx_.now() - st->last_notify_fwd < cfg_.admr.notify_wait) return;
    st->last_notify_fwd = ctx_.now();
    for (const auto& [nb, rec] : st->downstream) {
        if (nb == from) continue;
        Packet rn;
        rn.uid = ctx_.new_uid();
        rn.kind = PacketKind::Control;
        rn.origin = ctx_.self();
        rn.group = p.group;
        rn.ttl = 1;
        rn.hdr = RepairNotificationHdr{h.source};
        ctx_.unicast(nb, rn);
    }
}

void AdmrNode::send_reconnect(const Key& k, TreeState& st) {
    ++st.repair_seq;
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Control;
    p.origin = ctx_.self();
    p.group = k.second;
    p.ttl = cfg_.admr.reconnect_hop_limit;
    p.hdr = ReconnectHdr{k.first, ctx_.self(), st.repair_seq};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
    arm(cfg_.admr.reconnect_wait, kReconnectWait, k, st.epoch);
}

void AdmrNode::handle_reconnect(const Packet& p, NodeId from) {
    const ReconnectHdr& h = *p.as<ReconnectHdr>();
    if (h.repairer == ctx_.self()) return;
    RevEntry& rev = reconnect_rev_[{h.source, p.group, h.repairer}];
    if (rev.at < 0.0 || h.repair_seq > rev.seq) {
        rev.seq = h.repair_seq;
        rev.prev = from;
        rev.at = ctx_.now();
    }
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;

    TreeState* st = find_state(h.source, p.group);
    bool on_live_tree =
        st && st->connected && !st->repairing && (st->is_forwarder || st->is_source);
    if (h.source == ctx_.self() && st && flow_live(*st)) {
        // answer along the recorded reconnect path
        Packet rr;
        rr.uid = ctx_.new_uid();
        rr.kind = PacketKind::Control;
        rr.origin = ctx_.self();
        rr.group = p.group;
        rr.ttl = cfg_.control_ttl;
        rr.hdr = ReconnectReplyHdr{h.source, h.repairer, h.repair_seq};
        ctx_.unicast(rev.prev, rr);
        return;
    }
    if (on_live_tree && st->upstream != kNoNode) {
        // forward up the multicast tree, once per repair round
        if (reconnect_up_seen_.insert({h.source, p.group, h.repairer, h.repair_seq}).second) {
            Packet up;
            up.uid = ctx_.new_uid();
            up.kind = PacketKind::Control;
            up.origin = p.origin;
            up.group = p.group;
            up.ttl = cfg_.control_ttl;
            up.hdr = h;
            ctx_.unicast(st->upstream, up);
        }
        return;
    }
    if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

void AdmrNode::handle_reconnect_reply(const Packet& p, NodeId from) {
    const ReconnectReplyHdr& h = *p.as<ReconnectReplyHdr>();
    Key k{h.source, p.group};
    if (h.repairer == ctx_.self()) {
        TreeState* st = find_state(h.source, p.group);
        if (!st) return;
        st->upstream = from;
        st->connected = true;
        st->repairing = false;
        st->missed = 0;
        ++st->epoch;
        ensure_monitor(k, *st);
        return;
    }
    auto it = reconnect_rev_.find({h.source, p.group, h.repairer});
    if (it == reconnect_rev_.end() || it->second.seq != h.repair_seq || p.ttl <= 1) return;
    TreeState& st = trees_[k];
    st.is_forwarder = true;
    st.connected = true;
    st.upstream = from;
    st.downstream[it->second.prev];
    st.repairing = false;
    ++st.epoch;
    ensure_monitor(k, st);
    Packet copy = p;
    copy.ttl = p.ttl - 1;
    ctx_.unicast(it->second.prev, copy);
}

/* ====================================================================
   Flood fallback
   ==================================================================== */

void AdmrNode::request_flood(const Key& k, TreeState& st, bool enable) {
    st.fallback_requested = enable;
    if (st.upstream != kNoNode && st.connected) {
        Packet p;
        p.uid = ctx_.new_uid();
        p.kind = PacketKind::Control;
        p.origin = ctx_.self();
        p.group = k.second;
        p.ttl = cfg_.control_ttl;
        p.hdr = FloodRequestHdr{k.first, ctx_.self(), enable};
        ctx_.unicast(st.upstream, p);
    } else if (enable) {
        solicit(k.second, true); // piggyback on a fresh solicitation
    }
}

void AdmrNode::handle_flood_request(const Packet& p, NodeId from) {
    (void)from;
    const FloodRequestHdr& h = *p.as<FloodRequestHdr>();
    if (h.source == ctx_.self()) {
        TreeState* st = find_state(h.source, p.group);
        if (!st || !st->is_source) return;
        if (h.enable)
            st->flood_requesters.insert(h.receiver);
        else
            st->flood_requesters.erase(h.receiver);
        return;
    }
    TreeState* st = find_state(h.source, p.group);
    if (st && st->is_forwarder && st->upstream != kNoNode && p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.unicast(st->upstream, copy);
    }
}

/* ====================================================================
   Dispatch
   ==================================================================== */

void AdmrNode::on_packet(const Packet& p, NodeId from) {
    if (p.as<DataHdr>())
        handle_data(p, from);
    else if (p.as<SolicitationHdr>())
        handle_solicitation(p, from);
    else if (p.as<KeepAliveHdr>())
        handle_keepalive(p, from);
    else if (p.as<ReceiverJoinHdr>())
        handle_receiver_join(p, from);
    else if (p.as<ReceiverDiscoveryHdr>())
        handle_discovery(p, from);
    else if (p.as<RepairNotificationHdr>())
        handle_repair_notification(p, from);
    else if (p.as<ReconnectHdr>())
        handle_reconnect(p, from);
    else if (p.as<ReconnectReplyHdr>())
        handle_reconnect_reply(p, from);
    else if (p.as<ExplicitAckHdr>())
        handle_explicit_ack(p, from);
    else if (p.as<FloodRequestHdr>())
        handle_flood_request(p, from);
}

} // namespace manet
