#include "manetsim/flooding.hpp"

namespace manet {

void FloodingNode::on_app_data(GroupId group, int payload_size, uint32_t seq) {
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Data;
    p.origin = ctx_.self();
    p.group = group;
    p.seq = seq;
    p.ttl = cfg_.data_ttl;
    p.payload_size = payload_size;
    p.hdr = DataHdr{};
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
}

void FloodingNode::on_packet(const Packet& p, NodeId) {
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;
    if (p.kind == PacketKind::Data && is_member(p.group)) ctx_.deliver_to_app(p);
    if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

} // namespace manet
