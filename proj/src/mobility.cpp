#include "manetsim/mobility.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

namespace manet {

/* ====================================================================
   Path evaluation
   ==================================================================== */

MobilityPath::MobilityPath(int node, std::vector<WaypointSegment> segments, double duration)
    : node_(node), segments_(std::move(segments)), duration_(duration) {
    if (segments_.empty())
        throw InvalidParams("MobilityPath: no segments");
}

Vec2 MobilityPath::position_at(double t) const {
    if (t < 0.0 || t > duration_)
        throw OutOfRangeTime("position_at t=" + std::to_string(t));
    // last segment whose start_time <= t
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const WaypointSegment& s) { return v < s.start_time; });
    if (it != segments_.begin()) --it;
    const WaypointSegment& s = *it;
    double dt = t - s.start_time;
    double travel = s.travel_time();
    if (dt >= travel || travel <= 0.0) return s.dest_pos;
    double f = dt / travel;
    return s.start_pos + (s.dest_pos - s.start_pos) * f;
}

/* ====================================================================
   Parameter validation
   ==================================================================== */

static void validate_speed_band(double v_min, double v_max) {
    if (!(v_min >= 0.0) || !(v_max >= v_min))
        throw InvalidParams("speed band requires 0 <= v_min <= v_max");
    if (v_max > 0.0 && !(v_min > 0.0))
        throw InvalidParams("v_min must be > 0 when v_max > 0");
}

void RwpParams::validate() const {
    validate_speed_band(v_min, v_max);
    if (!(pause >= 0.0)) throw InvalidParams("pause must be >= 0");
}

void RpgmParams::validate(int nodes) const {
    if (group_count < 1 || nodes_per_group < 1)
        throw InvalidParams("rpgm group_count and nodes_per_group must be positive");
    if (group_count * nodes_per_group != nodes)
        throw InvalidParams("rpgm group_count * nodes_per_group must equal node count");
    if (!(max_deviation >= 0.0)) throw InvalidParams("rpgm max_deviation must be >= 0");
    if (!(member_speed_ratio >= 0.0)) throw InvalidParams("rpgm member_speed_ratio must be >= 0");
    validate_speed_band(group_v_min, group_v_max);
    if (!(group_pause >= 0.0)) throw InvalidParams("rpgm group_pause must be >= 0");
}

void ManhattanParams::validate() const {
    if (h_streets < 2 || v_streets < 2)
        throw InvalidParams("manhattan grid needs at least 2x2 streets");
    validate_speed_band(v_min, v_max);
    if (!(v_max > 0.0)) throw InvalidParams("manhattan requires v_max > 0");
    if (p_left < 0.0 || p_right < 0.0 || p_straight < 0.0 ||
        std::fabs(p_left + p_right + p_straight - 1.0) > 1e-9)
        throw InvalidParams("turn probabilities must be non-negative and sum to 1");
}

/* ====================================================================
   Random Waypoint
   ==================================================================== */

static std::vector<WaypointSegment> rwp_one(const Area& area, double v_min, double v_max,
                                            double pause, double duration, RngStream& rng) {
    std::vector<WaypointSegment> segs;
    double t = 0.0;
    Vec2 pos{rng.uniform(0.0, area.width), rng.uniform(0.0, area.height)};

    if (v_max <= 0.0) {
        segs.push_back({0.0, pos, pos, 0.0, duration});
        return segs;
    }
    if (pause > 0.0) {
        segs.push_back({t, pos, pos, 0.0, pause});
        t += pause;
    }
    while (t < duration) {
        Vec2 dest{rng.uniform(0.0, area.width), rng.uniform(0.0, area.height)};
        double speed = rng.uniform(v_min, v_max);
        double dist = distance(pos, dest);
        if (dist < 1e-9) continue;
        segs.push_back({t, pos, dest, speed, pause});
        t += dist / speed + pause;
        pos = dest;
    }
    return segs;
}

std::vector<MobilityPath> generate_rwp(const RwpParams& params, const Area& area, int nodes,
                                       double duration, uint64_t seed) {
    params.validate();
    area.validate();
    if (nodes < 1 || !(duration > 0.0)) throw InvalidParams("nodes >= 1 and duration > 0 required");
    std::vector<MobilityPath> paths;
    paths.reserve(nodes);
    for (int n = 0; n < nodes; ++n) {
        RngStream rng(seed, "mobility.rwp", static_cast<uint64_t>(n));
        paths.emplace_back(n, rwp_one(area, params.v_min, params.v_max, params.pause, duration, rng),
                           duration);
    }
    return paths;
}

/* ====================================================================
   Reference Point Group
   ==================================================================== */

using Knot = std::pair<double, Vec2>;

// Linear interpolation over knot list (times strictly increasing).
static Vec2 knot_eval(const std::vector<Knot>& k, double t) {
    auto it = std::upper_bound(k.begin(), k.end(), t,
                               [](double v, const Knot& kn) { return v < kn.first; });
    if (it == k.begin()) return k.front().second;
    if (it == k.end()) return k.back().second;
    const Knot& b = *it;
    const Knot& a = *(it - 1);
    double f = (t - a.first) / (b.first - a.first);
    return a.second + (b.second - a.second) * f;
}

static std::vector<Knot> segments_to_knots(const std::vector<WaypointSegment>& segs,
                                           double duration) {
    std::vector<Knot> k;
    for (const auto& s : segs) {
        if (k.empty() || s.start_time > k.back().first + 1e-12)
            k.emplace_back(s.start_time, s.start_pos);
        double arrive = s.start_time + s.travel_time();
        if (arrive > k.back().first + 1e-12) k.emplace_back(arrive, s.dest_pos);
        double end = s.end_time();
        if (end > k.back().first + 1e-12) k.emplace_back(end, s.dest_pos);
    }
    if (k.back().first < duration) k.emplace_back(duration, k.back().second);
    return k;
}

static Vec2 uniform_in_disk(double radius, RngStream& rng) {
    double r = radius * std::sqrt(rng.uniform());
    double th = rng.uniform(0.0, 2.0 * M_PI);
    return {r * std::cos(th), r * std::sin(th)};
}

// Bounded waypoint walk (local coordinates) synchronized with the group
// legs: the member drifts inside the deviation disk at ratio * group speed
// while the group moves, and freezes while the group pauses.
static std::vector<Knot> member_walk_knots(const std::vector<WaypointSegment>& center_segs,
                                           double duration, double radius, double ratio,
                                           RngStream& rng) {
    std::vector<Knot> k;
    Vec2 l = radius > 0.0 ? uniform_in_disk(radius, rng) : Vec2{0.0, 0.0};
    k.emplace_back(0.0, l);
    if (radius <= 0.0 || ratio <= 0.0) {
        k.emplace_back(duration, l);
        return k;
    }
    for (const auto& s : center_segs) {
        double move_start = s.start_time;
        double move_end = s.start_time + s.travel_time();
        double w = ratio * s.speed;
        double t = move_start;
        while (s.speed > 0.0 && w > 0.0 && t < move_end && t < duration) {
            Vec2 target = uniform_in_disk(radius, rng);
            double dist = distance(l, target);
            if (dist < 1e-9) continue;
            double tt = dist / w;
            if (t + tt > move_end) {
                double f = (move_end - t) / tt;
                l = l + (target - l) * f;
                t = move_end;
            } else {
                l = target;
                t += tt;
            }
            k.emplace_back(t, l);
        }
        double end = s.end_time();
        if (end > k.back().first + 1e-12) k.emplace_back(std::min(end, duration), l);
    }
    if (k.back().first < duration) k.emplace_back(duration, l);
    return k;
}

// Subdivides each linear piece at area-boundary crossings, then clamps.
// Clamping is per-coordinate, so every sub-piece stays linear.
static std::vector<Knot> clip_knots(const std::vector<Knot>& in, const Area& area) {
    std::vector<Knot> out;
    out.reserve(in.size());
    out.emplace_back(in.front().first, area.clamp(in.front().second));
    for (size_t i = 1; i < in.size(); ++i) {
        const auto& [t0, p0] = in[i - 1];
        const auto& [t1, p1] = in[i];
        double span = t1 - t0;
        if (span <= 0.0) continue;
        double cuts[4];
        int nc = 0;
        auto add_cut = [&](double coord0, double coord1, double bound) {
            double d = coord1 - coord0;
            if (std::fabs(d) < 1e-15) return;
            double f = (bound - coord0) / d;
            if (f > 1e-9 && f < 1.0 - 1e-9) cuts[nc++] = t0 + f * span;
        };
        add_cut(p0.x, p1.x, 0.0);
        add_cut(p0.x, p1.x, area.width);
        add_cut(p0.y, p1.y, 0.0);
        add_cut(p0.y, p1.y, area.height);
        std::sort(cuts, cuts + nc);
        for (int c = 0; c < nc; ++c) {
            double f = (cuts[c] - t0) / span;
            Vec2 p = p0 + (p1 - p0) * f;
            if (cuts[c] > out.back().first + 1e-12) out.emplace_back(cuts[c], area.clamp(p));
        }
        if (t1 > out.back().first + 1e-12) out.emplace_back(t1, area.clamp(p1));
    }
    return out;
}

static std::vector<WaypointSegment> knots_to_segments(const std::vector<Knot>& k) {
    std::vector<WaypointSegment> segs;
    for (size_t i = 1; i < k.size(); ++i) {
        double t0 = k[i - 1].first, t1 = k[i].first;
        if (t1 - t0 <= 0.0) continue;
        Vec2 p0 = k[i - 1].second, p1 = k[i].second;
        double dist = distance(p0, p1);
        if (dist < 1e-12) {
            if (!segs.empty() && segs.back().speed == 0.0 &&
                distance(segs.back().dest_pos, p0) < 1e-12) {
                segs.back().pause_after += t1 - t0;
            } else {
                segs.push_back({t0, p0, p0, 0.0, t1 - t0});
            }
        } else {
            segs.push_back({t0, p0, p1, dist / (t1 - t0), 0.0});
        }
    }
    if (segs.empty() && !k.empty())
        segs.push_back({k.front().first, k.front().second, k.front().second, 0.0,
                        k.back().first - k.front().first});
    return segs;
}

RpgmDetail generate_rpgm_detail(const RpgmParams& params, const Area& area, int nodes,
                                double duration, uint64_t seed) {
    params.validate(nodes);
    area.validate();
    if (!(duration > 0.0)) throw InvalidParams("duration > 0 required");

    RpgmDetail out;
    out.members.reserve(nodes);
    out.offsets.reserve(nodes);
    out.group_of.reserve(nodes);

    std::vector<std::vector<WaypointSegment>> center_segs(params.group_count);
    for (int g = 0; g < params.group_count; ++g) {
        RngStream grng(seed, "mobility.rpgm.center", static_cast<uint64_t>(g));
        center_segs[g] = rwp_one(area, params.group_v_min, params.group_v_max, params.group_pause,
                                 duration, grng);
        out.centers.emplace_back(g, center_segs[g], duration);
    }

    for (int n = 0; n < nodes; ++n) {
        int g = n / params.nodes_per_group;
        RngStream mrng(seed, "mobility.rpgm.member", static_cast<uint64_t>(n));
        Vec2 offset = params.max_deviation > 0.0 ? uniform_in_disk(params.max_deviation, mrng)
                                                 : Vec2{0.0, 0.0};
        std::vector<Knot> ck = segments_to_knots(center_segs[g], duration);
        std::vector<Knot> wk = member_walk_knots(center_segs[g], duration, params.max_deviation,
                                                 params.member_speed_ratio, mrng);
        // union of breakpoint times; both functions are linear in between
        std::vector<double> times;
        times.reserve(ck.size() + wk.size());
        for (const auto& kn : ck) times.push_back(kn.first);
        for (const auto& kn : wk) times.push_back(kn.first);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end(),
                                [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                    times.end());
        std::vector<Knot> raw;
        raw.reserve(times.size());
        for (double t : times) raw.emplace_back(t, knot_eval(ck, t) + offset + knot_eval(wk, t));
        std::vector<Knot> clipped = clip_knots(raw, area);
        out.members.emplace_back(n, knots_to_segments(clipped), duration);
        out.offsets.push_back(offset);
        out.group_of.push_back(g);
    }
    return out;
}

std::vector<MobilityPath> generate_rpgm(const RpgmParams& params, const Area& area, int nodes,
                                        double duration, uint64_t seed) {
    return generate_rpgm_detail(params, area, nodes, duration, seed).members;
}

/* ====================================================================
   Manhattan grid
   ==================================================================== */

namespace {

enum Dir { East = 0, West = 1, North = 2, South = 3 };

constexpr Dir left_of(Dir d) {
    switch (d) {
        case East: return North;
        case North: return West;
        case West: return South;
        default: return East;
    }
}
constexpr Dir right_of(Dir d) {
    switch (d) {
        case East: return South;
        case South: return West;
        case West: return North;
        default: return East;
    }
}

} // namespace

std::vector<MobilityPath> generate_manhattan(const ManhattanParams& params, const Area& area,
                                             int nodes, double duration, uint64_t seed) {
    params.validate();
    area.validate();
    if (nodes < 1 || !(duration > 0.0)) throw InvalidParams("nodes >= 1 and duration > 0 required");

    const int hn = params.h_streets, vn = params.v_streets;
    std::vector<double> xs(vn), ys(hn);
    for (int j = 0; j < vn; ++j) xs[j] = area.width * j / (vn - 1);
    for (int i = 0; i < hn; ++i) ys[i] = area.height * i / (hn - 1);

    auto possible = [&](Dir d, int i, int j) {
        switch (d) {
            case East: return j < vn - 1;
            case West: return j > 0;
            case North: return i < hn - 1;
            default: return i > 0;
        }
    };
    auto step = [&](Dir d, int& i, int& j) {
        switch (d) {
            case East: ++j; break;
            case West: --j; break;
            case North: ++i; break;
            default: --i; break;
        }
    };

    std::vector<MobilityPath> paths;
    paths.reserve(nodes);
    for (int n = 0; n < nodes; ++n) {
        RngStream rng(seed, "mobility.manhattan", static_cast<uint64_t>(n));
        std::vector<WaypointSegment> segs;

        // uniform point on a uniform street, heading toward some intersection
        int s = rng.uniform_int(0, hn + vn - 1);
        bool horizontal = s < hn;
        Vec2 pos;
        Dir dir;
        int ci, cj; // intersection indices reached by the first leg
        if (horizontal) {
            ci = s;
            pos = {rng.uniform(0.0, area.width), ys[ci]};
            int ahead = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), pos.x + 1e-9) -
                                         xs.begin());
            bool can_e = ahead < vn;
            bool can_w = pos.x - 1e-9 > xs.front();
            dir = (can_e && can_w) ? (rng.uniform() < 0.5 ? East : West) : (can_e ? East : West);
            cj = dir == East
                     ? ahead
                     : static_cast<int>(std::lower_bound(xs.begin(), xs.end(), pos.x - 1e-9) -
                                        xs.begin()) -
                           1;
        } else {
            cj = s - hn;
            pos = {xs[cj], rng.uniform(0.0, area.height)};
            int ahead = static_cast<int>(std::upper_bound(ys.begin(), ys.end(), pos.y + 1e-9) -
                                         ys.begin());
            bool can_n = ahead < hn;
            bool can_s = pos.y - 1e-9 > ys.front();
            dir = (can_n && can_s) ? (rng.uniform() < 0.5 ? North : South) : (can_n ? North : South);
            ci = dir == North
                     ? ahead
                     : static_cast<int>(std::lower_bound(ys.begin(), ys.end(), pos.y - 1e-9) -
                                        ys.begin()) -
                           1;
        }

        double t = 0.0;
        bool first_leg = true;
        while (t < duration) {
            if (!first_leg) {
                // turn decision at intersection (ci, cj)
                Dir options[3] = {left_of(dir), right_of(dir), dir};
                double base[3] = {params.p_left, params.p_right, params.p_straight};
                double mass = 0.0;
                bool ok[3];
                int nok = 0;
                for (int o = 0; o < 3; ++o) {
                    ok[o] = possible(options[o], ci, cj);
                    if (ok[o]) {
                        mass += base[o];
                        ++nok;
                    }
                }
                double u = rng.uniform();
                int chosen = -1;
                if (mass > 1e-12) {
                    double acc = 0.0;
                    for (int o = 0; o < 3; ++o) {
                        if (!ok[o]) continue;
                        acc += base[o] / mass;
                        if (u < acc || o == 2) {
                            chosen = o;
                            break;
                        }
                    }
                    if (chosen < 0 || !ok[chosen])
                        for (int o = 2; o >= 0; --o)
                            if (ok[o]) {
                                chosen = o;
                                break;
                            }
                } else {
                    // all permitted turns have zero base probability: uniform
                    int pick = std::min(static_cast<int>(u * nok), nok - 1);
                    for (int o = 0; o < 3; ++o) {
                        if (!ok[o]) continue;
                        if (pick-- == 0) {
                            chosen = o;
                            break;
                        }
                    }
                }
                dir = options[chosen];
                step(dir, ci, cj);
            }
            first_leg = false;
            Vec2 target{xs[cj], ys[ci]};
            double speed = rng.uniform(params.v_min, params.v_max);
            double dist = distance(pos, target);
            if (dist < 1e-9) continue;
            segs.push_back({t, pos, target, speed, 0.0});
            t += dist / speed;
            pos = target;
        }
        paths.emplace_back(n, std::move(segs), duration);
    }
    return paths;
}

/* ====================================================================
   ns-2 trace import/export
   ==================================================================== */

static std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
}

std::string export_ns2(const std::vector<MobilityPath>& paths) {
    std::vector<const MobilityPath*> sorted;
    sorted.reserve(paths.size());
    for (const auto& p : paths) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const MobilityPath* a, const MobilityPath* b) { return a->node() < b->node(); });

    std::ostringstream os;
    for (const MobilityPath* p : sorted) {
        Vec2 p0 = p->segments().front().start_pos;
        os << "$node_(" << p->node() << ") set X_ " << fmt_double(p0.x) << "\n";
        os << "$node_(" << p->node() << ") set Y_ " << fmt_double(p0.y) << "\n";
        os << "$node_(" << p->node() << ") set Z_ 0.0\n";
    }
    for (const MobilityPath* p : sorted) {
        for (const auto& s : p->segments()) {
            if (s.speed <= 0.0 || s.travel_time() <= 0.0) continue;
            os << "$ns_ at " << fmt_double(s.start_time) << " \"$node_(" << p->node()
               << ") setdest " << fmt_double(s.dest_pos.x) << " " << fmt_double(s.dest_pos.y)
               << " " << fmt_double(s.speed) << "\"\n";
        }
    }
    return os.str();
}

namespace {

struct Setdest {
    double t;
    Vec2 dest;
    double speed;
};

struct NodeTrace {
    bool has_x = false, has_y = false;
    Vec2 initial;
    std::vector<Setdest> moves;
    int first_line = 0;
};

double parse_num(const std::string& tok, int line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError(line, "bad number '" + tok + "'");
    return v;
}

int parse_node_ref(const std::string& tok, int line) {
    // $node_(N) possibly with trailing ')'-adjacent text already split off
    const std::string prefix = "$node_(";
    if (tok.rfind(prefix, 0) != 0)
        throw ParseError(line, "expected $node_(i), got '" + tok + "'");
    size_t close = tok.find(')', prefix.size());
    if (close == std::string::npos) throw ParseError(line, "unterminated node reference");
    int id = 0;
    auto res = std::from_chars(tok.data() + prefix.size(), tok.data() + close, id);
    if (res.ec != std::errc() || res.ptr != tok.data() + close || id < 0)
        throw ParseError(line, "bad node id in '" + tok + "'");
    return id;
}

} // namespace

std::vector<MobilityPath> import_ns2(const std::string& text) {
    std::map<int, NodeTrace> traces;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::vector<std::string> tok;
        std::istringstream ls(line);
        std::string w;
        while (ls >> w) tok.push_back(w);
        if (tok.empty() || tok[0][0] == '#') continue;

        if (tok[0].rfind("$node_(", 0) == 0) {
            if (tok.size() != 4 || tok[1] != "set")
                throw ParseError(lineno, "malformed initial-position line");
            int id = parse_node_ref(tok[0], lineno);
            double v = parse_num(tok[3], lineno);
            NodeTrace& nt = traces[id];
            if (nt.first_line == 0) nt.first_line = lineno;
            if (tok[2] == "X_") {
                nt.initial.x = v;
                nt.has_x = true;
            } else if (tok[2] == "Y_") {
                nt.initial.y = v;
                nt.has_y = true;
            } else if (tok[2] == "Z_") {
                // flat field; value ignored
            } else {
                throw ParseError(lineno, "unknown coordinate '" + tok[2] + "'");
            }
        } else if (tok[0] == "$ns_") {
            if (tok.size() != 8 || tok[1] != "at")
                throw ParseError(lineno, "malformed setdest line");
            double t = parse_num(tok[2], lineno);
            std::string nref = tok[3];
            if (nref.size() < 2 || nref[0] != '"')
                throw ParseError(lineno, "expected quoted command");
            nref.erase(0, 1);
            int id = parse_node_ref(nref, lineno);
            if (tok[4] != "setdest") throw ParseError(lineno, "expected setdest command");
            std::string sp = tok[7];
            if (sp.empty() || sp.back() != '"')
                throw ParseError(lineno, "unterminated quoted command");
            sp.pop_back();
            double x = parse_num(tok[5], lineno);
            double y = parse_num(tok[6], lineno);
            double speed = parse_num(sp, lineno);
            if (!(speed > 0.0)) throw ParseError(lineno, "setdest speed must be > 0");
            if (!(t >= 0.0)) throw ParseError(lineno, "setdest time must be >= 0");
            NodeTrace& nt = traces[id];
            if (nt.first_line == 0) nt.first_line = lineno;
            nt.moves.push_back({t, {x, y}, speed});
        } else {
            throw ParseError(lineno, "unrecognized directive '" + tok[0] + "'");
        }
    }

    std::vector<MobilityPath> paths;
    for (auto& [id, nt] : traces) {
        if (!nt.has_x || !nt.has_y)
            throw ParseError(nt.first_line, "node " + std::to_string(id) +
                                                " missing initial X_/Y_ position");
        std::stable_sort(nt.moves.begin(), nt.moves.end(),
                         [](const Setdest& a, const Setdest& b) { return a.t < b.t; });
        std::vector<WaypointSegment> segs;
        Vec2 pos = nt.initial;
        double free_at = 0.0; // arrival time of the pending leg
        for (const Setdest& m : nt.moves) {
            if (!segs.empty() && m.t < free_at - 1e-12) {
                // preempted mid-flight: truncate the previous leg
                WaypointSegment& prev = segs.back();
                double dt = m.t - prev.start_time;
                double travel = prev.travel_time();
                double f = travel > 0.0 ? std::min(dt / travel, 1.0) : 1.0;
                prev.dest_pos = prev.start_pos + (prev.dest_pos - prev.start_pos) * f;
                pos = prev.dest_pos;
            } else if (m.t > free_at + 1e-12) {
                if (segs.empty()) {
                    segs.push_back({0.0, pos, pos, 0.0, m.t});
                } else {
                    segs.back().pause_after = m.t - free_at;
                }
            }
            segs.push_back({m.t, pos, m.dest, m.speed, 0.0});
            free_at = m.t + segs.back().travel_time();
            pos = m.dest;
        }
        if (segs.empty()) segs.push_back({0.0, pos, pos, 0.0, 0.0});
        paths.emplace_back(id, std::move(segs), std::numeric_limits<double>::infinity());
    }
    return paths;
}

/* ====================================================================
   Link-change metric
   ==================================================================== */

long link_changes(const std::vector<MobilityPath>& paths, double range, double sample_dt) {
    if (!(sample_dt > 0.0)) throw InvalidParams("sample_dt must be > 0");
    if (paths.size() < 2) return 0;
    double duration = paths.front().duration();
    for (const auto& p : paths) duration = std::min(duration, p.duration());

    const size_t n = paths.size();
    std::vector<Vec2> pos(n);
    std::vector<uint8_t> up(n * n, 0);
    long changes = 0;
    bool first = true;
    for (double t = 0.0; t <= duration + 1e-9; t += sample_dt) {
        double tc = std::min(t, duration);
        for (size_t i = 0; i < n; ++i) pos[i] = paths[i].position_at(tc);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                uint8_t now = distance(pos[i], pos[j]) <= range ? 1 : 0;
                if (!first && now != up[i * n + j]) ++changes;
                up[i * n + j] = now;
            }
        }
        first = false;
    }
    return changes;
}

} // namespace manet
