#include "manetsim/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace manet {

using nlohmann::json;

const char* mobility_model_name(MobilityModel m) {
    switch (m) {
        case MobilityModel::Rwp: return "rwp";
        case MobilityModel::Rpgm: return "rpgm";
        default: return "manhattan";
    }
}

MobilityModel mobility_model_from_name(const std::string& name) {
    if (name == "rwp") return MobilityModel::Rwp;
    if (name == "rpgm") return MobilityModel::Rpgm;
    if (name == "manhattan") return MobilityModel::Manhattan;
    throw ValidationError("mobility.model", "unknown model '" + name + "'");
}

void Scenario::validate() const {
    if (nodes < 2) throw ValidationError("nodes", "must be >= 2");
    if (!(area.width > 0.0)) throw ValidationError("area.width", "must be > 0");
    if (!(area.height > 0.0)) throw ValidationError("area.height", "must be > 0");
    radio.validate();
    if (!(duration > 0.0)) throw ValidationError("duration", "must be > 0");
    if (!(post_stabilization >= 0.0))
        throw ValidationError("post_stabilization", "must be >= 0");
    if (!(link_change_dt > 0.0)) throw ValidationError("link_change_dt", "must be > 0");
    if (!(join_window >= 0.0)) throw ValidationError("join_window", "must be >= 0");

    try {
        canonical_protocol_name(protocol);
    } catch (const UnknownProtocol&) {
        throw ValidationError("protocol", "unknown protocol '" + protocol + "'");
    }

    try {
        switch (mobility.model) {
            case MobilityModel::Rwp: {
                RwpParams p{mobility.v_min, mobility.v_max, mobility.pause};
                p.validate();
                break;
            }
            case MobilityModel::Rpgm: {
                if (mobility.rpgm_groups < 1 || nodes % mobility.rpgm_groups != 0)
                    throw InvalidParams("rpgm_groups must divide the node count");
                RpgmParams p;
                p.group_count = mobility.rpgm_groups;
                p.nodes_per_group = nodes / mobility.rpgm_groups;
                p.max_deviation = mobility.rpgm_max_deviation;
                p.group_v_min = mobility.v_min;
                p.group_v_max = mobility.v_max;
                p.group_pause = mobility.pause;
                p.member_speed_ratio = mobility.rpgm_member_speed_ratio;
                p.validate(nodes);
                break;
            }
            case MobilityModel::Manhattan: {
                ManhattanParams p;
                p.h_streets = mobility.h_streets;
                p.v_streets = mobility.v_streets;
                p.v_min = mobility.v_min;
                p.v_max = mobility.v_max;
                p.p_left = mobility.turn_left;
                p.p_right = mobility.turn_right;
                p.p_straight = mobility.turn_straight;
                p.validate();
                break;
            }
        }
    } catch (const InvalidParams& e) {
        throw ValidationError("mobility", e.what());
    }

    if (traffic.groups < 1) throw ValidationError("traffic.groups", "must be >= 1");
    if (traffic.members_per_group < 1 || traffic.members_per_group > nodes)
        throw ValidationError("traffic.members_per_group", "must be in [1, nodes]");
    if (traffic.sources_per_group < 1 ||
        traffic.sources_per_group > traffic.members_per_group)
        throw ValidationError("traffic.sources_per_group",
                              "must be in [1, members_per_group]");
    if (!(traffic.interval > 0.0)) throw ValidationError("traffic.interval", "must be > 0");
    if (traffic.packet_size < 1) throw ValidationError("traffic.packet_size", "must be >= 1");
    if (!(traffic.start_min >= 0.0) || traffic.start_max < traffic.start_min)
        throw ValidationError("traffic.start", "need 0 <= start_min <= start_max");
    if (!(traffic.stop_margin >= 0.0))
        throw ValidationError("traffic.stop_margin", "must be >= 0");
    if (traffic.start_max + traffic.stop_margin >= duration)
        throw ValidationError("traffic", "start window plus stop margin exceeds duration");
}

/* ====================================================================
   JSON round-trip
   ==================================================================== */

template <typename T>
static void get_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(static_cast<int>(e.byte), std::string("config: ") + e.what());
    }
    Scenario s;
    get_opt(j, "nodes", s.nodes);
    get_opt(j, "duration", s.duration);
    get_opt(j, "seed", s.seed);
    get_opt(j, "protocol", s.protocol);
    get_opt(j, "post_stabilization", s.post_stabilization);
    get_opt(j, "link_change_dt", s.link_change_dt);
    get_opt(j, "join_window", s.join_window);
    if (j.contains("area")) {
        get_opt(j["area"], "width", s.area.width);
        get_opt(j["area"], "height", s.area.height);
    }
    if (j.contains("radio")) {
        const json& r = j["radio"];
        get_opt(r, "range", s.radio.range);
        get_opt(r, "hop_delay_base", s.radio.hop_delay_base);
        get_opt(r, "hop_delay_jitter", s.radio.hop_delay_jitter);
        get_opt(r, "loss_prob", s.radio.loss_prob);
    }
    if (j.contains("mobility")) {
        const json& m = j["mobility"];
        std::string model = mobility_model_name(s.mobility.model);
        get_opt(m, "model", model);
        s.mobility.model = mobility_model_from_name(model);
        get_opt(m, "v_min", s.mobility.v_min);
        get_opt(m, "v_max", s.mobility.v_max);
        get_opt(m, "pause", s.mobility.pause);
        get_opt(m, "rpgm_groups", s.mobility.rpgm_groups);
        get_opt(m, "rpgm_max_deviation", s.mobility.rpgm_max_deviation);
        get_opt(m, "rpgm_member_speed_ratio", s.mobility.rpgm_member_speed_ratio);
        get_opt(m, "h_streets", s.mobility.h_streets);
        get_opt(m, "v_streets", s.mobility.v_streets);
        get_opt(m, "turn_left", s.mobility.turn_left);
        get_opt(m, "turn_right", s.mobility.turn_right);
        get_opt(m, "turn_straight", s.mobility.turn_straight);
    }
    if (j.contains("traffic")) {
        const json& t = j["traffic"];
        get_opt(t, "groups", s.traffic.groups);
        get_opt(t, "members_per_group", s.traffic.members_per_group);
        get_opt(t, "sources_per_group", s.traffic.sources_per_group);
        get_opt(t, "packet_size", s.traffic.packet_size);
        get_opt(t, "interval", s.traffic.interval);
        get_opt(t, "start_min", s.traffic.start_min);
        get_opt(t, "start_max", s.traffic.start_max);
        get_opt(t, "stop_margin", s.traffic.stop_margin);
        get_opt(t, "align_rpgm_groups", s.traffic.align_rpgm_groups);
    }
    if (j.contains("protocol_config")) {
        const json& pc = j["protocol_config"];
        ProtocolConfig& c = s.protocol_config;
        get_opt(pc, "data_ttl", c.data_ttl);
        get_opt(pc, "control_ttl", c.control_ttl);
        get_opt(pc, "rebroadcast_jitter", c.rebroadcast_jitter);
        get_opt(pc, "dup_horizon", c.dup_horizon);
        if (pc.contains("maodv")) {
            const json& m = pc["maodv"];
            get_opt(m, "group_hello_period", c.maodv.group_hello_period);
            get_opt(m, "rrep_wait", c.maodv.rrep_wait);
            get_opt(m, "rreq_retries", c.maodv.rreq_retries);
            get_opt(m, "route_lifetime", c.maodv.route_lifetime);
            get_opt(m, "buffer_n", c.maodv.buffer_n);
            get_opt(m, "liveness_factor", c.maodv.liveness_factor);
            get_opt(m, "leader_holdoff", c.maodv.leader_holdoff);
        }
        if (pc.contains("odmrp")) {
            const json& o = pc["odmrp"];
            get_opt(o, "query_period", c.odmrp.query_period);
            get_opt(o, "fg_timeout", c.odmrp.fg_timeout);
            get_opt(o, "flow_idle", c.odmrp.flow_idle);
            get_opt(o, "reply_jitter", c.odmrp.reply_jitter);
        }
        if (pc.contains("admr")) {
            const json& a = pc["admr"];
            get_opt(a, "repair_threshold", c.admr.repair_threshold);
            get_opt(a, "reconnect_hop_limit", c.admr.reconnect_hop_limit);
            get_opt(a, "discovery_period", c.admr.discovery_period);
            get_opt(a, "ack_miss_limit", c.admr.ack_miss_limit);
            get_opt(a, "fallback_pdr", c.admr.fallback_pdr);
            get_opt(a, "fallback_exit", c.admr.fallback_exit);
            get_opt(a, "fallback_window", c.admr.fallback_window);
        }
    }
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["nodes"] = s.nodes;
    j["duration"] = s.duration;
    j["seed"] = s.seed;
    j["protocol"] = s.protocol;
    j["post_stabilization"] = s.post_stabilization;
    j["link_change_dt"] = s.link_change_dt;
    j["join_window"] = s.join_window;
    j["area"] = {{"width", s.area.width}, {"height", s.area.height}};
    j["radio"] = {{"range", s.radio.range},
                  {"hop_delay_base", s.radio.hop_delay_base},
                  {"hop_delay_jitter", s.radio.hop_delay_jitter},
                  {"loss_prob", s.radio.loss_prob}};
    j["mobility"] = {{"model", mobility_model_name(s.mobility.model)},
                     {"v_min", s.mobility.v_min},
                     {"v_max", s.mobility.v_max},
                     {"pause", s.mobility.pause},
                     {"rpgm_groups", s.mobility.rpgm_groups},
                     {"rpgm_max_deviation", s.mobility.rpgm_max_deviation},
                     {"rpgm_member_speed_ratio", s.mobility.rpgm_member_speed_ratio},
                     {"h_streets", s.mobility.h_streets},
                     {"v_streets", s.mobility.v_streets},
                     {"turn_left", s.mobility.turn_left},
                     {"turn_right", s.mobility.turn_right},
                     {"turn_straight", s.mobility.turn_straight}};
    j["traffic"] = {{"groups", s.traffic.groups},
                    {"members_per_group", s.traffic.members_per_group},
                    {"sources_per_group", s.traffic.sources_per_group},
                    {"packet_size", s.traffic.packet_size},
                    {"interval", s.traffic.interval},
                    {"start_min", s.traffic.start_min},
                    {"start_max", s.traffic.start_max},
                    {"stop_margin", s.traffic.stop_margin},
                    {"align_rpgm_groups", s.traffic.align_rpgm_groups}};
    return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write config file: " + path);
    out << scenario_to_json(s);
}

} // namespace manet
