// Scenario description and JSON config round-trip. A Scenario is everything
// one run needs: area, nodes, radio, mobility model, traffic plan parameters,
// protocol, and seed.
#pragma once

#include <optional>
#include <string>

#include "manetsim/geom.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/protocol.hpp"
#include "manetsim/radio.hpp"

namespace manet {

enum class MobilityModel { Rwp, Rpgm, Manhattan };

const char* mobility_model_name(MobilityModel m);
MobilityModel mobility_model_from_name(const std::string& name);

struct MobilitySpec {
    MobilityModel model = MobilityModel::Rwp;
    double v_min = 1.0;
    double v_max = 10.0;
    double pause = 2.0;
    // rpgm
    int rpgm_groups = 5;
    double rpgm_max_deviation = 50.0;
    double rpgm_member_speed_ratio = 0.5;
    // manhattan
    int h_streets = 5;
    int v_streets = 5;
    double turn_left = 0.25;
    double turn_right = 0.25;
    double turn_straight = 0.5;
};

struct TrafficSpec {
    int groups = 10;
    int members_per_group = 10;
    int sources_per_group = 1;
    int packet_size = 512;
    double interval = 0.25;
    double start_min = 5.0;
    double start_max = 15.0;
    double stop_margin = 10.0; // flows end this long before the run does
    bool align_rpgm_groups = true;
};

struct Scenario {
    int nodes = 50;
    Area area;                 // 1000 x 700 default
    RadioParams radio;         // 150 m range default
    double duration = 200.0;
    MobilitySpec mobility;
    TrafficSpec traffic;
    std::string protocol = "maodv";
    uint64_t seed = 1;
    double post_stabilization = 20.0; // origin-time floor for the lenient PDR
    double link_change_dt = 0.1;
    double join_window = 2.0;  // member joins stagger over [0, join_window]
    bool auto_join = true;     // scripted runs may drive join/leave themselves
    ProtocolConfig protocol_config;

    void validate() const; // throws ValidationError naming the field
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

} // namespace manet
