#include "manetsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "manetsim/errors.hpp"

namespace manet {

bool GroupPlan::is_member(GroupId g, NodeId n) const {
    for (const auto& spec : groups)
        if (spec.id == g)
            return std::find(spec.members.begin(), spec.members.end(), n) != spec.members.end();
    return false;
}

int GroupPlan::receiver_count(GroupId g, NodeId origin) const {
    for (const auto& spec : groups)
        if (spec.id == g) {
            int n = static_cast<int>(spec.members.size());
            if (std::find(spec.members.begin(), spec.members.end(), origin) != spec.members.end())
                --n;
            return n;
        }
    return 0;
}

void GroupPlan::validate(int node_count) const {
    for (const auto& spec : groups) {
        for (NodeId m : spec.members)
            if (m < 0 || m >= node_count)
                throw InvalidParams("group member id out of range");
        for (NodeId s : spec.sources)
            if (s < 0 || s >= node_count)
                throw InvalidParams("group source id out of range");
    }
}

static std::vector<NodeId> sample_without_replacement(int population, int k, RngStream& rng) {
    std::vector<NodeId> pool(population);
    for (int i = 0; i < population; ++i) pool[i] = i;
    // partial Fisher-Yates
    for (int i = 0; i < k; ++i) {
        int j = rng.uniform_int(i, population - 1);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

GroupPlan build_group_plan(int nodes, int group_count, int members_per_group,
                           int sources_per_group, RngStream& rng) {
    if (members_per_group > nodes)
        throw InvalidParams("members_per_group exceeds node count");
    if (group_count < 1 || members_per_group < 1 || sources_per_group < 1)
        throw InvalidParams("group plan counts must be positive");
    if (sources_per_group > members_per_group)
        throw InvalidParams("sources_per_group exceeds members_per_group");

    GroupPlan plan;
    for (int g = 0; g < group_count; ++g) {
        GroupSpec spec;
        spec.id = g;
        spec.members = sample_without_replacement(nodes, members_per_group, rng);
        std::vector<NodeId> shuffled = spec.members;
        for (size_t i = 0; i + 1 < shuffled.size(); ++i) {
            int j = rng.uniform_int(static_cast<int>(i), static_cast<int>(shuffled.size()) - 1);
            std::swap(shuffled[i], shuffled[j]);
        }
        spec.sources.assign(shuffled.begin(), shuffled.begin() + sources_per_group);
        std::sort(spec.sources.begin(), spec.sources.end());
        plan.groups.push_back(std::move(spec));
    }
    return plan;
}

GroupPlan build_aligned_group_plan(int group_count, int sources_per_group,
                                   const std::vector<int>& mobility_group_of, RngStream& rng) {
    int mob_groups = 0;
    for (int g : mobility_group_of) mob_groups = std::max(mob_groups, g + 1);
    if (mob_groups == 0) throw InvalidParams("aligned plan needs mobility groups");

    GroupPlan plan;
    for (int g = 0; g < group_count; ++g) {
        GroupSpec spec;
        spec.id = g;
        int mg = g % mob_groups;
        for (size_t n = 0; n < mobility_group_of.size(); ++n)
            if (mobility_group_of[n] == mg) spec.members.push_back(static_cast<NodeId>(n));
        if (spec.members.empty()) throw InvalidParams("empty mobility group in aligned plan");
        std::vector<NodeId> shuffled = spec.members;
        for (size_t i = 0; i + 1 < shuffled.size(); ++i) {
            int j = rng.uniform_int(static_cast<int>(i), static_cast<int>(shuffled.size()) - 1);
            std::swap(shuffled[i], shuffled[j]);
        }
        int k = std::min<int>(sources_per_group, static_cast<int>(shuffled.size()));
        spec.sources.assign(shuffled.begin(), shuffled.begin() + k);
        std::sort(spec.sources.begin(), spec.sources.end());
        plan.groups.push_back(std::move(spec));
    }
    return plan;
}

long expected_tick_count(const CbrFlow& flow) {
    if (flow.stop_at <= flow.start_at) return 0;
    return static_cast<long>(std::ceil((flow.stop_at - flow.start_at) / flow.interval - 1e-9));
}

std::vector<CbrFlow> build_flows(const GroupPlan& plan, int packet_size, double interval,
                                 double start_min, double start_max, double stop_at,
                                 RngStream& rng) {
    if (!(interval > 0.0)) throw InvalidParams("traffic interval must be > 0");
    std::vector<CbrFlow> flows;
    int id = 0;
    for (const auto& spec : plan.groups) {
        for (NodeId s : spec.sources) {
            CbrFlow f;
            f.flow_id = id++;
            f.source = s;
            f.group = spec.id;
            f.packet_size = packet_size;
            f.interval = interval;
            f.start_at = rng.uniform(start_min, start_max);
            f.stop_at = stop_at;
            if (f.stop_at <= f.start_at)
                throw InvalidParams("flow stop time precedes its start");
            flows.push_back(f);
        }
    }
    return flows;
}

std::string serialize_traffic_plan(const std::vector<CbrFlow>& flows) {
    std::ostringstream os;
    os << "# flow_id source group size interval start stop\n";
    for (const auto& f : flows)
        os << f.flow_id << " " << f.source << " " << f.group << " " << f.packet_size << " "
           << f.interval << " " << f.start_at << " " << f.stop_at << "\n";
    return os.str();
}

std::vector<CbrFlow> parse_traffic_plan(const std::string& text) {
    std::vector<CbrFlow> flows;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        CbrFlow f;
        if (!(ls >> f.flow_id >> f.source >> f.group >> f.packet_size >> f.interval >>
              f.start_at >> f.stop_at))
            throw ParseError(lineno, "malformed traffic plan row");
        flows.push_back(f);
    }
    return flows;
}

} // namespace manet
