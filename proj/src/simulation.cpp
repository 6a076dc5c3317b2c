#include "manetsim/simulation.hpp"

#include <algorithm>
#include <deque>

namespace manet {

/* ====================================================================
   Per-node context: the only surface a protocol can act through
   ==================================================================== */

class Simulation::Ctx : public NodeContext {
public:
    Ctx(Simulation* sim, NodeId id, uint64_t seed)
        : sim_(sim), id_(id), rng_(seed, "proto", static_cast<uint64_t>(id)) {}

    NodeId self() const override { return id_; }
    double now() const override { return sim_->kernel_.now().to_seconds(); }
    RngStream& rng() override { return rng_; }
    uint64_t new_uid() override { return sim_->next_uid_++; }
    uint32_t next_data_seq() override { return data_seq_++; }

    void broadcast(const Packet& p) override {
        sim_->medium_->broadcast(id_, std::make_shared<Packet>(p));
    }
    void unicast(NodeId next_hop, const Packet& p) override {
        sim_->medium_->unicast(id_, next_hop, std::make_shared<Packet>(p));
    }
    void broadcast_after(double delay, const Packet& p) override { defer(delay, kNoNode, p); }
    void unicast_after(double delay, NodeId next_hop, const Packet& p) override {
        defer(delay, next_hop, p);
    }

    EventHandle schedule_timer(double delay, int key) override {
        return sim_->kernel_.schedule(sim_->kernel_.now() + SimTime::seconds(delay),
                                      TimerFire{id_, key});
    }
    bool cancel_timer(EventHandle& h) override { return sim_->kernel_.cancel(h); }

    void deliver_to_app(const Packet& p) override { sim_->ledger_->count_delivery(p, id_); }

    // internal timer keys (negative) carry deferred sends and link breaks
    void handle_internal(int key) {
        if (key == kLinkBreakKey) {
            if (breaks_.empty()) return;
            auto [nh, pkt] = std::move(breaks_.front());
            breaks_.pop_front();
            sim_->nodes_[static_cast<size_t>(id_)]->on_link_break(nh, *pkt);
            return;
        }
        auto it = pending_.find(key);
        if (it == pending_.end()) return;
        PendingTx tx = std::move(it->second);
        pending_.erase(it);
        if (tx.next_hop == kNoNode)
            sim_->medium_->broadcast(id_, tx.packet);
        else
            sim_->medium_->unicast(id_, tx.next_hop, tx.packet);
    }

    void queue_link_break(NodeId next_hop, std::shared_ptr<const Packet> p) {
        breaks_.emplace_back(next_hop, std::move(p));
        schedule_timer(0.0, kLinkBreakKey);
    }

private:
    static constexpr int kLinkBreakKey = -1;

    struct PendingTx {
        NodeId next_hop = kNoNode;
        std::shared_ptr<const Packet> packet;
    };

    void defer(double delay, NodeId next_hop, const Packet& p) {
        int key = next_pending_--;
        pending_[key] = PendingTx{next_hop, std::make_shared<Packet>(p)};
        schedule_timer(delay, key);
    }

    Simulation* sim_;
    NodeId id_;
    RngStream rng_;
    uint32_t data_seq_ = 0;
    int next_pending_ = -2;
    std::map<int, PendingTx> pending_;
    std::deque<std::pair<NodeId, std::shared_ptr<const Packet>>> breaks_;
};

/* ====================================================================
   Setup
   ==================================================================== */

std::vector<MobilityPath> generate_mobility(const Scenario& s, std::vector<int>* group_of) {
    switch (s.mobility.model) {
        case MobilityModel::Rwp: {
            RwpParams p{s.mobility.v_min, s.mobility.v_max, s.mobility.pause};
            return generate_rwp(p, s.area, s.nodes, s.duration, s.seed);
        }
        case MobilityModel::Rpgm: {
            RpgmParams p;
            p.group_count = s.mobility.rpgm_groups;
            p.nodes_per_group = s.nodes / s.mobility.rpgm_groups;
            p.max_deviation = s.mobility.rpgm_max_deviation;
            p.group_v_min = s.mobility.v_min;
            p.group_v_max = s.mobility.v_max;
            p.group_pause = s.mobility.pause;
            p.member_speed_ratio = s.mobility.rpgm_member_speed_ratio;
            RpgmDetail d = generate_rpgm_detail(p, s.area, s.nodes, s.duration, s.seed);
            if (group_of) *group_of = d.group_of;
            return std::move(d.members);
        }
        default: {
            ManhattanParams p;
            p.h_streets = s.mobility.h_streets;
            p.v_streets = s.mobility.v_streets;
            p.v_min = s.mobility.v_min;
            p.v_max = s.mobility.v_max;
            p.p_left = s.mobility.turn_left;
            p.p_right = s.mobility.turn_right;
            p.p_straight = s.mobility.turn_straight;
            return generate_manhattan(p, s.area, s.nodes, s.duration, s.seed);
        }
    }
}

Simulation::Simulation(const Scenario& s) : scenario_(s) {
    scenario_.validate();
    std::vector<int> group_of;
    std::vector<MobilityPath> paths = generate_mobility(scenario_, &group_of);
    mobility_group_of_ = group_of;

    RngStream plan_rng(s.seed, "plan");
    GroupPlan plan;
    if (s.mobility.model == MobilityModel::Rpgm && s.traffic.align_rpgm_groups)
        plan = build_aligned_group_plan(s.traffic.groups, s.traffic.sources_per_group, group_of,
                                        plan_rng);
    else
        plan = build_group_plan(s.nodes, s.traffic.groups, s.traffic.members_per_group,
                                s.traffic.sources_per_group, plan_rng);

    RngStream traffic_rng(s.seed, "traffic");
    std::vector<CbrFlow> flows =
        build_flows(plan, s.traffic.packet_size, s.traffic.interval, s.traffic.start_min,
                    s.traffic.start_max, s.duration - s.traffic.stop_margin, traffic_rng);
    setup(std::move(paths), std::move(plan), std::move(flows));
}

Simulation::Simulation(const Scenario& s, std::vector<MobilityPath> paths, GroupPlan plan,
                       std::vector<CbrFlow> flows)
    : scenario_(s) {
    setup(std::move(paths), std::move(plan), std::move(flows));
}

Simulation::~Simulation() = default;

void Simulation::setup(std::vector<MobilityPath> paths, GroupPlan plan,
                       std::vector<CbrFlow> flows) {
    paths_ = std::move(paths);
    plan_ = std::move(plan);
    flows_ = std::move(flows);
    plan_.validate(static_cast<int>(paths_.size()));

    ledger_ = std::make_unique<MetricsLedger>(plan_);
    medium_ = std::make_unique<Medium>(&paths_, scenario_.radio, &kernel_, ledger_.get(),
                                       RngStream(scenario_.seed, "radio"));
    medium_->set_link_break_handler(
        [this](NodeId sender, NodeId nh, std::shared_ptr<const Packet> p) {
            ctxs_[static_cast<size_t>(sender)]->queue_link_break(nh, std::move(p));
        });

    ProtocolFactory factory = find_protocol(scenario_.protocol);
    const int n = static_cast<int>(paths_.size());
    for (int i = 0; i < n; ++i) {
        ctxs_.push_back(std::make_unique<Ctx>(this, i, scenario_.seed));
        nodes_.push_back(factory(*ctxs_.back(), scenario_.protocol_config));
    }

    kernel_.set_dispatcher([this](const Event& e) { dispatch(e); });

    // memberships: joins staggered over the join window
    RngStream join_rng(scenario_.seed, "join");
    for (const auto& spec : plan_.groups) {
        if (!scenario_.auto_join) break;
        for (NodeId m : spec.members) {
            double at = scenario_.join_window > 0.0 ? join_rng.uniform(0.0, scenario_.join_window)
                                                    : 0.0;
            GroupId g = spec.id;
            NodeId node_id = m;
            schedule_call(at, [this, node_id, g] { nodes_[static_cast<size_t>(node_id)]->join(g); });
        }
    }

    // traffic
    flow_ticks_done_.assign(flows_.size(), 0);
    flow_ticks_expected_.reserve(flows_.size());
    for (const auto& f : flows_) flow_ticks_expected_.push_back(expected_tick_count(f));
    for (size_t i = 0; i < flows_.size(); ++i)
        if (flow_ticks_expected_[i] > 0)
            kernel_.schedule(SimTime::seconds(flows_[i].start_at),
                             TrafficTick{static_cast<int>(i)});

    kernel_.schedule(SimTime::seconds(scenario_.duration), SimEnd{});
}

/* ====================================================================
   Dispatch
   ==================================================================== */

void Simulation::log_event(const Event& e) {
    std::ostream& os = *event_log_;
    os << format_metric(e.fire_at.to_seconds()) << '\t';
    if (const auto* a = std::get_if<PacketArrival>(&e.payload)) {
        os << a->node << '\t' << "PacketArrival" << '\t' << a->packet->type_name()
           << " from=" << a->from << " origin=" << a->packet->origin
           << " group=" << a->packet->group << " seq=" << a->packet->seq
           << " uid=" << a->packet->uid << '\n';
    } else if (const auto* t = std::get_if<TimerFire>(&e.payload)) {
        os << t->node << '\t' << "TimerFire" << '\t' << "key=" << t->key << '\n';
    } else if (const auto* f = std::get_if<TrafficTick>(&e.payload)) {
        os << flows_[static_cast<size_t>(f->flow)].source << '\t' << "TrafficTick" << '\t'
           << "flow=" << f->flow << '\n';
    } else if (const auto* m = std::get_if<MetricsSample>(&e.payload)) {
        os << -1 << '\t' << "MetricsSample" << '\t' << "id=" << m->id << '\n';
    } else {
        os << -1 << '\t' << "SimEnd" << '\t' << '\n';
    }
}

void Simulation::dispatch(const Event& e) {
    if (event_log_) log_event(e);
    if (const auto* a = std::get_if<PacketArrival>(&e.payload)) {
        nodes_[static_cast<size_t>(a->node)]->on_packet(*a->packet, a->from);
    } else if (const auto* t = std::get_if<TimerFire>(&e.payload)) {
        if (t->key < 0)
            ctxs_[static_cast<size_t>(t->node)]->handle_internal(t->key);
        else
            nodes_[static_cast<size_t>(t->node)]->on_timer(t->key);
    } else if (const auto* f = std::get_if<TrafficTick>(&e.payload)) {
        traffic_tick(f->flow);
    } else if (const auto* m = std::get_if<MetricsSample>(&e.payload)) {
        auto it = calls_.find(m->id);
        if (it != calls_.end()) {
            auto fn = std::move(it->second);
            calls_.erase(it);
            fn();
        }
    }
    // SimEnd: marker only
}

void Simulation::traffic_tick(int flow_index) {
    const CbrFlow& f = flows_[static_cast<size_t>(flow_index)];
    long& done = flow_ticks_done_[static_cast<size_t>(flow_index)];
    uint32_t seq = ctxs_[static_cast<size_t>(f.source)]->next_data_seq();
    ledger_->count_origination(f.flow_id, f.source, seq, f.group,
                               kernel_.now().to_seconds());
    nodes_[static_cast<size_t>(f.source)]->on_app_data(f.group, f.packet_size, seq);
    ++done;
    if (done < flow_ticks_expected_[static_cast<size_t>(flow_index)])
        kernel_.schedule(SimTime::seconds(f.start_at + static_cast<double>(done) * f.interval),
                         TrafficTick{flow_index});
}

void Simulation::schedule_call(double t, std::function<void()> fn) {
    int id = next_call_id_++;
    calls_[id] = std::move(fn);
    kernel_.schedule(SimTime::seconds(t), MetricsSample{id});
}

void Simulation::inject_app_data(double t, NodeId source, GroupId group, int size, int flow_id) {
    schedule_call(t, [this, source, group, size, flow_id] {
        uint32_t seq = ctxs_[static_cast<size_t>(source)]->next_data_seq();
        ledger_->count_origination(flow_id, source, seq, group, kernel_.now().to_seconds());
        nodes_[static_cast<size_t>(source)]->on_app_data(group, size, seq);
    });
}

/* ====================================================================
   Results
   ==================================================================== */

void Simulation::run_until(double t) { kernel_.run(SimTime::seconds(t)); }

RunResult Simulation::run() {
    run_until(scenario_.duration);
    RunResult r;
    r.protocol = canonical_protocol_name(scenario_.protocol);
    r.mobility = mobility_model_name(scenario_.mobility.model);
    r.max_speed = scenario_.mobility.v_max;
    r.seed = scenario_.seed;
    try {
        r.pdr = ledger_->pdr(0.0);
    } catch (const SimError&) {
        r.pdr = 0.0;
    }
    try {
        r.pdr_post_stab = ledger_->pdr(scenario_.post_stabilization);
    } catch (const SimError&) {
        r.pdr_post_stab = 0.0;
    }
    r.nro = ledger_->nro();
    r.link_changes =
        link_changes(paths_, scenario_.radio.range, scenario_.link_change_dt);
    r.control_tx = ledger_->control_tx();
    r.data_tx = ledger_->data_tx();
    r.delivered = ledger_->unique_deliveries();
    r.originated = ledger_->originated_total();
    return r;
}

} // namespace manet
