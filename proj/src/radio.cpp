#include "manetsim/radio.hpp"

#include <algorithm>

namespace manet {

Vec2 Medium::position_of(NodeId n, double t) const {
    return (*paths_)[static_cast<size_t>(n)].position_at(t);
}

std::vector<NodeId> Medium::neighbors(NodeId node, double t) const {
    std::vector<NodeId> out;
    Vec2 p = position_of(node, t);
    for (size_t j = 0; j < paths_->size(); ++j) {
        NodeId other = static_cast<NodeId>(j);
        if (other == node) continue;
        if (distance(p, position_of(other, t)) <= params_.range) out.push_back(other);
    }
    return out;
}

void Medium::deliver(NodeId to, NodeId from, const std::shared_ptr<const Packet>& p) {
    double delay = params_.hop_delay_base;
    if (params_.hop_delay_jitter > 0.0) delay += rng_.uniform(0.0, params_.hop_delay_jitter);
    if (params_.loss_prob > 0.0 && rng_.bernoulli(params_.loss_prob)) return;
    kernel_->schedule(kernel_->now() + SimTime::seconds(delay), PacketArrival{to, from, p});
}

void Medium::broadcast(NodeId sender, std::shared_ptr<const Packet> p) {
    ledger_->count_transmission(*p);
    double t = kernel_->now().to_seconds();
    for (NodeId nb : neighbors(sender, t)) deliver(nb, sender, p);
}

void Medium::unicast(NodeId sender, NodeId next_hop, std::shared_ptr<const Packet> p) {
    ledger_->count_transmission(*p);
    double t = kernel_->now().to_seconds();
    if (next_hop < 0 || static_cast<size_t>(next_hop) >= paths_->size())
        throw SimError("unicast to unknown node " + std::to_string(next_hop));
    if (distance(position_of(sender, t), position_of(next_hop, t)) <= params_.range) {
        deliver(next_hop, sender, p);
    } else if (on_link_break_) {
        on_link_break_(sender, next_hop, std::move(p));
    }
}

std::vector<int> Medium::component_labels(double t) const {
    const int n = static_cast<int>(paths_->size());
    std::vector<Vec2> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = position_of(i, t);
    std::vector<int> label(n, -1);
    for (int start = 0; start < n; ++start) {
        if (label[start] >= 0) continue;
        std::vector<int> stack{start};
        label[start] = start;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (label[v] >= 0 || v == u) continue;
                if (distance(pos[u], pos[v]) <= params_.range) {
                    label[v] = start;
                    stack.push_back(v);
                }
            }
        }
    }
    return label;
}

} // namespace manet
