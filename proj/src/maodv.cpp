#include "manetsim/maodv.hpp"

#include <algorithm>

namespace manet {

/* ====================================================================
   Inspection
   ==================================================================== */

const MaodvNode::GroupState* MaodvNode::find_group(GroupId g) const {
    auto it = groups_.find(g);
    return it == groups_.end() ? nullptr : &it->second;
}

bool MaodvNode::is_member(GroupId g) const {
    const GroupState* st = find_group(g);
    return st && st->member;
}
bool MaodvNode::on_tree(GroupId g) const {
    const GroupState* st = find_group(g);
    return st && st->on_tree;
}
bool MaodvNode::is_leader(GroupId g) const {
    const GroupState* st = find_group(g);
    return st && st->leader;
}
NodeId MaodvNode::leader_of(GroupId g) const {
    const GroupState* st = find_group(g);
    return st ? st->known_leader : kNoNode;
}
NodeId MaodvNode::upstream_of(GroupId g) const {
    const GroupState* st = find_group(g);
    return st ? st->upstream : kNoNode;
}
std::vector<NodeId> MaodvNode::activated_neighbors(GroupId g) const {
    std::vector<NodeId> out;
    if (const GroupState* st = find_group(g))
        for (const auto& [nb, edge] : st->next_hops) out.push_back(nb);
    return out;
}
std::vector<NodeId> MaodvNode::downstream_of(GroupId g) const {
    std::vector<NodeId> out;
    if (const GroupState* st = find_group(g))
        for (const auto& [nb, edge] : st->next_hops)
            if (edge.downstream) out.push_back(nb);
    return out;
}
uint32_t MaodvNode::group_seq_of(GroupId g) const {
    const GroupState* st = find_group(g);
    return st ? st->seq : 0;
}
int MaodvNode::depth_of(GroupId g) const {
    const GroupState* st = find_group(g);
    return st ? st->depth : 0;
}

/* ====================================================================
   Route table (reverse routes for RREP/MACT relaying)
   ==================================================================== */

void MaodvNode::update_route(NodeId dest, NodeId next_hop, int hops) {
    RouteEntry& rt = routes_[dest];
    double now = ctx_.now();
    if (rt.next_hop == kNoNode || rt.expires <= now || hops <= rt.hop_count) {
        rt.next_hop = next_hop;
        rt.hop_count = hops;
    }
    rt.expires = now + cfg_.maodv.route_lifetime;
}

MaodvNode::RouteEntry* MaodvNode::fresh_route(NodeId dest) {
    auto it = routes_.find(dest);
    if (it == routes_.end() || it->second.expires <= ctx_.now()) return nullptr;
    return &it->second;
}

/* ====================================================================
   Membership
   ==================================================================== */

void MaodvNode::join(GroupId g) {
    GroupState& st = group(g);
    st.member = true;
    if (st.on_tree || st.discovering) return;
    originate_rreq(g, true);
}

void MaodvNode::leave(GroupId g) {
    auto it = groups_.find(g);
    if (it == groups_.end()) return;
    GroupState& st = it->second;
    st.member = false;
    if (!st.on_tree) {
        if (!st.discovering) groups_.erase(it);
        return;
    }
    if (st.leader) return; // a leaving leader keeps serving the tree
    leaf_collapse_check(g, st);
}

/* ====================================================================
   Discovery
   ==================================================================== */

void MaodvNode::originate_rreq(GroupId g, bool join_flag) {
    GroupState& st = group(g);
    st.discovering = true;
    st.attempts = 0;
    st.have_reply = false;
    if (!join_flag) st.repair = false;
    (void)join_flag;
    send_rreq(g, st, cfg_.control_ttl);
}

void MaodvNode::send_rreq(GroupId g, GroupState& st, int ttl) {
    st.rreq_id = ++next_rreq_id_;
    st.have_reply = false;
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Control;
    p.origin = ctx_.self();
    p.group = g;
    p.ttl = ttl;
    RreqHdr h;
    h.rreq_id = st.rreq_id;
    h.group_seq = st.merging ? 0 : st.seq;
    h.hop_count = 0;
    h.join = st.member || st.repair || st.merging;
    h.repair = st.repair;
    h.merge = st.merging;
    h.target_leader = st.merge_target;
    h.repairer_depth = static_cast<uint16_t>(std::max(st.depth, 1));
    p.hdr = h;
    dup_.check_and_insert(p.uid, ctx_.now());
    ctx_.broadcast(p);
    ctx_.cancel_timer(st.deadline);
    st.deadline = ctx_.schedule_timer(cfg_.maodv.rrep_wait, timer_key(kDeadline, g));
}

void MaodvNode::handle_rreq(const Packet& p, NodeId from) {
    const RreqHdr& h = *p.as<RreqHdr>();
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;
    if (p.origin == ctx_.self()) return;
    update_route(p.origin, from, h.hop_count + 1);

    GroupState* st = nullptr;
    auto it = groups_.find(p.group);
    if (it != groups_.end()) st = &it->second;

    bool eligible = st && st->on_tree && st->seq >= h.group_seq && !st->discovering;
    if (h.merge) eligible = eligible && st->known_leader == h.target_leader;
    if (h.repair) eligible = eligible && st->depth < h.repairer_depth;

    if (eligible) {
        Packet rep;
        rep.uid = ctx_.new_uid();
        rep.kind = PacketKind::Control;
        rep.origin = ctx_.self();
        rep.group = p.group;
        rep.ttl = cfg_.control_ttl;
        RrepHdr rh;
        rh.requester = p.origin;
        rh.rreq_id = h.rreq_id;
        rh.group_seq = st->seq;
        rh.hop_count = 0;
        rh.leader_hops = static_cast<uint16_t>(st->depth);
        rh.leader = st->known_leader;
        rep.hdr = rh;
        ctx_.unicast(from, rep);
    } else if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        RreqHdr ch = h;
        ch.hop_count = static_cast<uint8_t>(h.hop_count + 1);
        copy.hdr = ch;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

void MaodvNode::handle_rrep(const Packet& p, NodeId from) {
    const RrepHdr& h = *p.as<RrepHdr>();
    auto better = [](uint32_t seq, int hops, NodeId nh, uint32_t bseq, int bhops, NodeId bnh) {
        if (seq != bseq) return seq > bseq;
        if (hops != bhops) return hops < bhops;
        return nh < bnh;
    };

    if (h.requester == ctx_.self()) {
        GroupState& st = group(p.group);
        if (!st.discovering || h.rreq_id != st.rreq_id) return; // stale reply
        int hops = h.hop_count + 1;
        if (!st.have_reply ||
            better(h.group_seq, hops, from, st.best_seq, st.best_hops, st.best_from)) {
            st.have_reply = true;
            st.best_seq = h.group_seq;
            st.best_hops = hops;
            st.best_from = from;
            st.best_leader_hops = h.leader_hops;
            st.best_leader = h.leader;
        }
        return;
    }

    // relay toward the requester, remembering the best upstream candidate
    if (relay_.size() > 256) {
        for (auto rit = relay_.begin(); rit != relay_.end();)
            rit = rit->second.expires <= ctx_.now() ? relay_.erase(rit) : std::next(rit);
    }
    auto key = std::make_pair(h.requester, h.rreq_id);
    RelayCandidate& c = relay_[key];
    int hops = h.hop_count + 1;
    bool improved = c.from == kNoNode || c.expires <= ctx_.now() ||
                    better(h.group_seq, hops, from, c.seq, c.hops, c.from);
    if (improved) {
        c.seq = h.group_seq;
        c.hops = hops;
        c.from = from;
        c.leader_hops = h.leader_hops;
        c.leader = h.leader;
        c.expires = ctx_.now() + 2.0 * cfg_.maodv.rrep_wait;
    }
    RouteEntry* rt = fresh_route(h.requester);
    if (!rt) return;
    Packet copy = p;
    copy.ttl = p.ttl - 1;
    if (copy.ttl <= 0) return;
    RrepHdr ch = h;
    ch.hop_count = static_cast<uint8_t>(h.hop_count + 1);
    copy.hdr = ch;
    ctx_.unicast(rt->next_hop, copy);
}

void MaodvNode::on_discovery_deadline(GroupId g) {
    auto it = groups_.find(g);
    if (it == groups_.end()) return;
    GroupState& st = it->second;
    if (!st.discovering) return;

    if (st.have_reply) {
        attach_via_best(g, st);
        return;
    }
    ++st.attempts;
    if (st.attempts <= cfg_.maodv.rreq_retries) {
        send_rreq(g, st, cfg_.control_ttl);
        return;
    }

    // discovery failed
    st.discovering = false;
    bool was_repair = st.repair;
    st.repair = false;
    st.merging = false;
    st.merge_target = kNoNode;

    if (was_repair) {
        if (st.member) {
            become_leader(g, st); // isolated member leads its partition
        } else if (!st.next_hops.empty()) {
            dissolve(g, st);
        } else {
            clear_tree_state(st);
        }
        return;
    }
    if (st.member) {
        if (st.known_leader != kNoNode) {
            // a tree exists somewhere; back off and retry
            ctx_.cancel_timer(st.holdoff);
            st.holdoff = ctx_.schedule_timer(cfg_.maodv.leader_holdoff, timer_key(kHoldoff, g));
        } else {
            // listen for a Group Hello before declaring leadership
            ctx_.cancel_timer(st.holdoff);
            st.holdoff = ctx_.schedule_timer(cfg_.maodv.leader_holdoff, timer_key(kHoldoff, g));
        }
    }
    // non-member sender: buffered data retries on the next app packet
}

void MaodvNode::attach_via_best(GroupId g, GroupState& st) {
    bool was_merge = st.merging;
    st.discovering = false;
    st.repair = false;
    st.merging = false;
    st.merge_target = kNoNode;

    if (was_merge && st.upstream != kNoNode) {
        // leave the old partition's tree before re-hanging
        send_mact(g, st.upstream, MactType::Prune, ctx_.self(), st.rreq_id);
        st.next_hops.erase(st.upstream);
        st.upstream = kNoNode;
    }
    if (st.upstream != kNoNode) st.next_hops.erase(st.upstream);

    st.on_tree = true;
    st.upstream = st.best_from;
    st.next_hops[st.best_from] = TreeEdge{false};
    st.depth = static_cast<int>(st.best_leader_hops) + st.best_hops;
    st.known_leader = st.best_leader;
    st.seq = std::max(st.seq, st.best_seq);
    st.upstream_refreshed = ctx_.now();
    if (st.leader) {
        // merged under another partition's leader
        st.leader = false;
    }
    send_mact(g, st.best_from, MactType::Activate, ctx_.self(), st.rreq_id);
    ensure_liveness_timer(g, st);
    flush_buffer(g, st);
}

void MaodvNode::become_leader(GroupId g, GroupState& st) {
    st.leader = true;
    st.on_tree = true;
    st.known_leader = ctx_.self();
    st.upstream = kNoNode;
    st.depth = 0;
    st.seq += 1;
    st.discovering = false;
    ctx_.cancel_timer(st.holdoff);
    // announce immediately, then periodically
    on_timer(timer_key(kHello, g));
    flush_buffer(g, st);
}

/* ====================================================================
   Tree activation and pruning
   ==================================================================== */

void MaodvNode::send_mact(GroupId g, NodeId to, MactType type, NodeId requester,
                          uint32_t rreq_id) {
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Control;
    p.origin = ctx_.self();
    p.group = g;
    p.ttl = cfg_.control_ttl;
    MactHdr h;
    h.type = type;
    h.requester = requester;
    h.rreq_id = rreq_id;
    p.hdr = h;
    ctx_.unicast(to, p);
}

void MaodvNode::handle_mact(const Packet& p, NodeId from) {
    const MactHdr& h = *p.as<MactHdr>();
    GroupState& st = group(p.group);

    if (h.type == MactType::Prune) {
        st.next_hops.erase(from);
        if (from == st.upstream) {
            // cut loose from above: try to rejoin
            st.upstream = kNoNode;
            if (st.on_tree && !st.discovering) start_repair(p.group, st);
        } else {
            leaf_collapse_check(p.group, st);
        }
        return;
    }

    // Activate: `from` becomes an activated downstream edge
    st.next_hops[from] = TreeEdge{true};
    if (st.on_tree) {
        auto it = relay_.find({h.requester, h.rreq_id});
        if (it == relay_.end() || it->second.expires <= ctx_.now()) {
            // attachment point reached; activation stops here
            flush_buffer(p.group, st);
            return;
        }
        RelayCandidate c = it->second;
        relay_.erase(it);
        if (st.upstream == c.from) return; // already hanging off that branch
        if (st.upstream != kNoNode) {
            send_mact(p.group, st.upstream, MactType::Prune, h.requester, h.rreq_id);
            st.next_hops.erase(st.upstream);
        }
        st.upstream = c.from;
        st.next_hops[c.from] = TreeEdge{false};
        st.depth = static_cast<int>(c.leader_hops) + c.hops;
        st.known_leader = c.leader;
        st.seq = std::max(st.seq, c.seq);
        st.leader = false;
        st.upstream_refreshed = ctx_.now();
        send_mact(p.group, c.from, MactType::Activate, h.requester, h.rreq_id);
        return;
    }

    auto it = relay_.find({h.requester, h.rreq_id});
    if (it == relay_.end() || it->second.expires <= ctx_.now()) {
        // no stored path upstream; give up and let downstream repair
        st.next_hops.erase(from);
        if (st.next_hops.empty() && !st.member) groups_.erase(p.group);
        return;
    }
    RelayCandidate c = it->second;
    relay_.erase(it);
    st.on_tree = true;
    st.upstream = c.from;
    st.next_hops[c.from] = TreeEdge{false};
    st.depth = static_cast<int>(c.leader_hops) + c.hops;
    st.known_leader = c.leader;
    st.seq = std::max(st.seq, c.seq);
    st.upstream_refreshed = ctx_.now();
    ensure_liveness_timer(p.group, st);
    send_mact(p.group, c.from, MactType::Activate, h.requester, h.rreq_id);
}

void MaodvNode::leaf_collapse_check(GroupId g, GroupState& st) {
    if (st.member || st.leader || !st.on_tree) return;
    if (st.next_hops.size() == 1 && st.upstream != kNoNode &&
        st.next_hops.begin()->first == st.upstream) {
        // pure relay with no children left: prune self upward
        send_mact(g, st.upstream, MactType::Prune, ctx_.self(), 0);
        clear_tree_state(st);
        groups_.erase(g);
    } else if (st.next_hops.empty()) {
        clear_tree_state(st);
        groups_.erase(g);
    }
}

void MaodvNode::clear_tree_state(GroupState& st) {
    st.on_tree = false;
    st.leader = false;
    st.upstream = kNoNode;
    st.next_hops.clear();
    st.depth = 0;
}

void MaodvNode::dissolve(GroupId g, GroupState& st) {
    // orphaned relay that cannot rejoin: release the subtree, children
    // re-resolve on their own
    for (const auto& [nb, edge] : st.next_hops)
        if (edge.downstream) send_mact(g, nb, MactType::Prune, ctx_.self(), 0);
    clear_tree_state(st);
    if (!st.member) groups_.erase(g);
}

/* ====================================================================
   Repair
   ==================================================================== */

void MaodvNode::start_repair(GroupId g, GroupState& st) {
    if (st.discovering) return;
    st.discovering = true;
    st.repair = true;
    st.merging = false;
    st.attempts = 0;
    st.have_reply = false;
    // expanding search: first attempt scoped near the leader, retries go wide
    int ttl = std::min(cfg_.control_ttl, std::max(st.depth + 2, 3));
    send_rreq(g, st, ttl);
}

void MaodvNode::on_link_break(NodeId next_hop, const Packet& p) {
    auto it = groups_.find(p.group);
    if (it != groups_.end()) {
        GroupState& st = it->second;
        if (st.on_tree && st.next_hops.count(next_hop)) {
            bool was_upstream = next_hop == st.upstream;
            st.next_hops.erase(next_hop);
            if (was_upstream) {
                st.upstream = kNoNode;
                if (!st.discovering) start_repair(p.group, st);
            } else {
                // the downstream side of the break repairs; we only shed the edge
                leaf_collapse_check(p.group, st);
            }
        }
    }
    for (auto rit = routes_.begin(); rit != routes_.end();) {
        if (rit->second.next_hop == next_hop)
            rit = routes_.erase(rit);
        else
            ++rit;
    }
}

/* ====================================================================
   Group Hello
   ==================================================================== */

void MaodvNode::handle_group_hello(const Packet& p, NodeId from) {
    const GroupHelloHdr& h = *p.as<GroupHelloHdr>();
    bool first_copy = dup_.check_and_insert(p.uid, ctx_.now());
    GroupState& st = group(p.group);

    // every copy heard from the tree upstream refreshes liveness and carries
    // leader authority down the tree
    if (st.on_tree && from == st.upstream) {
        st.upstream_refreshed = ctx_.now();
        st.known_leader = h.leader;
        st.seq = std::max(st.seq, h.group_seq);
        st.depth = h.hop_count + 1;
        if (st.pending_merge_leader == h.leader) {
            ctx_.cancel_timer(st.merge_timer);
            st.pending_merge_leader = kNoNode;
        }
    }
    if (!first_copy) return;
    if (p.origin == ctx_.self() || h.leader == ctx_.self()) {
        // own flood returning
    } else if (st.on_tree) {
        if (h.leader == st.known_leader) {
            st.seq = std::max(st.seq, h.group_seq);
        } else if (st.member && !st.discovering && !st.merging &&
                   st.known_leader != kNoNode && st.known_leader < h.leader &&
                   st.pending_merge_leader == kNoNode) {
            // partition with the lower leader id initiates reconnection
            st.pending_merge_leader = h.leader;
            ctx_.cancel_timer(st.merge_timer);
            st.merge_timer = ctx_.schedule_timer(
                ctx_.rng().uniform(cfg_.maodv.merge_delay_min, cfg_.maodv.merge_delay_max),
                timer_key(kMerge, p.group));
        }
    } else {
        // cached group info for future discoveries
        if (st.known_leader == kNoNode || h.group_seq >= st.seq) st.known_leader = h.leader;
        st.seq = std::max(st.seq, h.group_seq);
        if (st.member && !st.discovering) {
            ctx_.cancel_timer(st.holdoff);
            originate_rreq(p.group, true);
        } else if (!st.member && !st.discovering && st.next_hops.empty() && st.buffer.empty()) {
            // plain cache entry; nothing else to do
        }
    }

    if (p.ttl > 1) {
        Packet copy = p;
        copy.ttl = p.ttl - 1;
        GroupHelloHdr ch = h;
        ch.hop_count = static_cast<uint8_t>(h.hop_count + 1);
        copy.hdr = ch;
        ctx_.broadcast_after(ctx_.rng().uniform(0.0, cfg_.rebroadcast_jitter), copy);
    }
}

/* ====================================================================
   Data path
   ==================================================================== */

void MaodvNode::forward_data_on_tree(const Packet& p, NodeId except) {
    auto it = groups_.find(p.group);
    if (it == groups_.end() || !it->second.on_tree) return;
    if (p.ttl <= 1) return;
    Packet copy = p;
    copy.ttl = p.ttl - 1;
    for (const auto& [nb, edge] : it->second.next_hops)
        if (nb != except) ctx_.unicast(nb, copy);
}

void MaodvNode::handle_data(const Packet& p, NodeId from) {
    GroupState* st = nullptr;
    auto it = groups_.find(p.group);
    if (it != groups_.end()) st = &it->second;
    if (st && st->on_tree && from == st->upstream) st->upstream_refreshed = ctx_.now();
    if (!dup_.check_and_insert(p.uid, ctx_.now())) return;
    if (st && st->member) ctx_.deliver_to_app(p);
    forward_data_on_tree(p, from);
}

void MaodvNode::on_app_data(GroupId g, int payload_size, uint32_t seq) {
    GroupState& st = group(g);
    Packet p;
    p.uid = ctx_.new_uid();
    p.kind = PacketKind::Data;
    p.origin = ctx_.self();
    p.group = g;
    p.seq = seq;
    p.ttl = cfg_.data_ttl;
    p.payload_size = payload_size;
    p.hdr = DataHdr{};

    if (st.on_tree) {
        dup_.check_and_insert(p.uid, ctx_.now());
        forward_data_on_tree(p, kNoNode);
        return;
    }
    st.buffer.push_back(p);
    while (st.buffer.size() > static_cast<size_t>(cfg_.maodv.buffer_n)) st.buffer.pop_front();
    if (!st.discovering) originate_rreq(g, st.member);
}

void MaodvNode::flush_buffer(GroupId g, GroupState& st) {
    (void)g;
    while (!st.buffer.empty() && st.on_tree) {
        Packet p = st.buffer.front();
        st.buffer.pop_front();
        dup_.check_and_insert(p.uid, ctx_.now());
        forward_data_on_tree(p, kNoNode);
    }
}

/* ====================================================================
   Timers and dispatch
   ==================================================================== */

void MaodvNode::ensure_liveness_timer(GroupId g, GroupState& st) {
    if (st.liveness_running) return;
    st.liveness_running = true;
    ctx_.schedule_timer(cfg_.maodv.group_hello_period, timer_key(kLiveness, g));
}

void MaodvNode::on_timer(int key) {
    int kind = key / 1024;
    GroupId g = key % 1024;
    auto it = groups_.find(g);
    if (it == groups_.end()) return;
    GroupState& st = it->second;

    switch (kind) {
        case kHello: {
            if (!st.leader) return;
            st.seq += 1;
            Packet p;
            p.uid = ctx_.new_uid();
            p.kind = PacketKind::Control;
            p.origin = ctx_.self();
            p.group = g;
            p.ttl = cfg_.control_ttl;
            GroupHelloHdr h;
            h.leader = ctx_.self();
            h.group_seq = st.seq;
            h.hop_count = 0;
            p.hdr = h;
            dup_.check_and_insert(p.uid, ctx_.now());
            ctx_.broadcast(p);
            ctx_.schedule_timer(cfg_.maodv.group_hello_period, timer_key(kHello, g));
            return;
        }
        case kLiveness: {
            if (!st.on_tree || st.leader) {
                st.liveness_running = st.on_tree && !st.leader;
                if (st.liveness_running)
                    ctx_.schedule_timer(cfg_.maodv.group_hello_period, timer_key(kLiveness, g));
                return;
            }
            double horizon = cfg_.maodv.liveness_factor * cfg_.maodv.group_hello_period;
            if (st.upstream != kNoNode && ctx_.now() - st.upstream_refreshed > horizon &&
                !st.discovering) {
                st.next_hops.erase(st.upstream);
                st.upstream = kNoNode;
                start_repair(g, st);
            } else if (st.upstream == kNoNode && !st.discovering) {
                start_repair(g, st);
            }
            ctx_.schedule_timer(cfg_.maodv.group_hello_period, timer_key(kLiveness, g));
            return;
        }
        case kDeadline:
            on_discovery_deadline(g);
            return;
        case kHoldoff: {
            if (st.on_tree || st.discovering || !st.member) return;
            if (st.known_leader != kNoNode) {
                originate_rreq(g, true);
            } else {
                become_leader(g, st);
            }
            return;
        }
        case kMerge: {
            NodeId target = st.pending_merge_leader;
            st.pending_merge_leader = kNoNode;
            if (target == kNoNode || !st.on_tree || st.discovering) return;
            if (st.known_leader == target) return; // already rehomed via the tree
            st.merging = true;
            st.merge_target = target;
            st.repair = false;
            st.attempts = 0;
            send_rreq(g, st, cfg_.control_ttl);
            return;
        }
        default: return;
    }
}

void MaodvNode::on_packet(const Packet& p, NodeId from) {
    switch (p.hdr.index()) {
        case 0: handle_data(p, from); return;
        case 1: handle_rreq(p, from); return;
        case 2: handle_rrep(p, from); return;
        case 3: handle_mact(p, from); return;
        case 4: handle_group_hello(p, from); return;
        default: return; // not a MAODV packet
    }
}

} // namespace manet
