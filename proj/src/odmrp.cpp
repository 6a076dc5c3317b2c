#include "manetsim/odmrp.hpp"

namespace manet {

bool OdmrpNode::forwarding_enabled(GroupId g) const {
    auto it = forwarding_.find(g);
    return it != forwarding_.end() && it->second.enabled && ctx_.now() < it->second.expires_at;
}

NodeId OdmrpNode::reverse_hop(NodeId source, GroupId g) const {
    auto it = query_cache_.find({source, g});
    return it == query_cache_.end() ? kNoNode : it->second.previous_hop;
}

/* ====================================================================
   Source side
   ==================================================================== */

void OdmrpNode::send_query(GroupId g, SourceFlow& flow) {
    flow.query_seq += 1;
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Control;
    p.origin = ctx_.self();
    p.group = g;
    p.ttl = cfg_.control_ttl;
    p.hdr = JoinQueryHdr{flow.query_seq};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
}

void OdmrpNode::on_app_data(GroupId g, int payload_size, uint32_t seq) {
    SourceFlow& flow = flows_[g];
    flow.active = true;
    flow.last_app = ctx_.now();
    if (!flow.timer_running) {
        flow.timer_running = true;
        send_query(g, flow);
        ctx_.schedule_timer(cfg_.odmrp.query_period, timer_key(g));
    }
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Data;
    p.origin = ctx_.self();
    p.group = g;
    p.seq = seq;
    p.ttl = cfg_.data_ttl;
    p.payload_size = payload_size;
    p.hdr = DataHdr{};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
}

void OdmrpNode::on_timer(int key) {
    GroupId g = key;
    auto it = flows_.find(g);
    if (it == flows_.end()) return;
    SourceFlow& flow = it->second;
    if (ctx_.now() - flow.last_app > cfg_.odmrp.flow_idle) {
        flow.active = false;
        flow.timer_running = false; // re-armed by the next app packet
        return;
    }
    send_query(g, flow);
    ctx_.schedule_timer(cfg_.odmrp.query_period, timer_key(g));
}

/* ====================================================================
   Query / reply
   ==================================================================== */

void OdmrpNode::handle_query(const Packet& p, NodeId from) {
    const JoinQueryHdr& h = *p.as<JoinQueryHdr>();
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return; // previous_hop unchanged
    if (p.origin == ctx_.self()) return;

    QueryCacheEntry& qc = query_cache_[{p.origin, p.group}];
    if (h.query_seq > qc.query_seq || qc.received_at < 0.0) {
        qc.query_seq = h.query_seq;
        qc.previous_hop = from;
        qc.received_at = ctx_.now();
    }
    if (is_member(p.group)) {
        // answer after a short stagger so the flood front settles
        NodeId prev = qc.previous_hop;
        uint32_t seq = h.query_seq;
        Packet rep;
        rep.uid = ctx_.new_uid();
        rep.kind = PacketKind::Control;
        rep.origin = ctx_.self();
        rep.group = p.group;
        rep.ttl = cfg_.control_ttl;
        rep.hdr = JoinReplyHdr{p.origin, seq};
        ctx_.unicast_after(ctx_.rng().uniform(0.0, cfg_.odmrp.reply_jitter), prev, rep);
    }
    if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

void OdmrpNode::send_reply(NodeId source, GroupId g, uint32_t query_seq, NodeId to) {
    Packet rep;
    rep.uid = ctx_.new_uid();
    rep.kind = PacketKind::Control;
    rep.origin = ctx_.self();
    rep.group = g;
    rep.ttl = cfg_.control_ttl;
    rep.hdr = JoinReplyHdr{source, query_seq};
    ctx_.unicast(to, rep);
}

void OdmrpNode::handle_reply(const Packet& p, NodeId from) {
    (void)from;
    const JoinReplyHdr& h = *p.as<JoinReplyHdr>();
    if (h.source == ctx_.self()) return; // mesh established back at the source

    auto qit = query_cache_.find({h.source, p.group});
    if (qit == query_cache_.end() || qit->second.query_seq != h.query_seq) return; // stale

    ForwardingState& fg = forwarding_[p.group];
    fg.enabled = true;
    fg.refreshed_at = ctx_.now();
    fg.expires_at = ctx_.now() + cfg_.odmrp.fg_timeout;

    uint32_t& last = reply_forwarded_[{h.source, p.group}];
    if (last >= h.query_seq && last != 0) return; // suppressed: already sent this round
    last = h.query_seq;
    send_reply(h.source, p.group, h.query_seq, qit->second.previous_hop);
}

/* ====================================================================
   Data path
   ==================================================================== */

void OdmrpNode::handle_data(const Packet& p, NodeId from) {
    (void)from;
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;
    if (is_member(p.group)) ctx_.deliver_to_app(p);
    if (forwarding_enabled(p.group) && p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

void OdmrpNode::on_packet(const Packet& p, NodeId from) {
    if (p.as<DataHdr>()) {
        handle_data(p, from);
    } else if (p.as<JoinQueryHdr>()) {
        handle_query(p, from);
    } else if (p.as<JoinReplyHdr>()) {
        handle_reply(p, from);
    }
}

} // namespace manet
