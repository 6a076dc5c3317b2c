// manetsim CLI: single runs, experiment sweeps, mobility trace generation,
// and trace analysis.
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "manetsim/simulation.hpp"
#include "manetsim/sweep.hpp"

using namespace manet;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& config, const std::string& protocol, uint64_t seed,
            bool seed_set, double speed, const std::string& event_log,
            const std::string& out_csv) {
    Scenario s = config.empty() ? Scenario{} : load_scenario(config);
    if (!protocol.empty()) s.protocol = protocol;
    if (seed_set) s.seed = seed;
    if (speed > 0.0) {
        s.mobility.v_max = speed;
        s.mobility.v_min = std::min(s.mobility.v_min, speed);
    }
    s.validate();

    Simulation sim(s);
    std::ofstream log_stream;
    if (!event_log.empty()) {
        log_stream.open(event_log);
        if (!log_stream) throw SimError("cannot write event log: " + event_log);
        sim.set_event_log(&log_stream);
    }
    RunResult r = sim.run();
    std::string csv = run_csv_header() + "\n" + run_csv_row(r) + "\n";
    std::cout << csv;
    if (!out_csv.empty()) {
        std::ofstream out(out_csv);
        out << csv;
    }
    return 0;
}

int cmd_sweep(const std::string& config, const SweepSpec& spec, const std::string& out_dir,
              int workers) {
    Scenario base = config.empty() ? Scenario{} : load_scenario(config);
    base.validate();
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 4;

    SweepOutcome outcome = run_sweep(base, spec, workers);
    write_sweep_outputs(outcome, out_dir);
    std::cout << outcome.results.size() << " runs completed, " << outcome.failures.size()
              << " failed; outputs in " << out_dir << "\n";
    return outcome.failures.empty() ? 0 : 2;
}

int cmd_mobgen(const std::string& model, const std::string& out, int nodes, double duration,
               uint64_t seed, const MobilitySpec& mspec, const Area& area) {
    Scenario s;
    s.nodes = nodes;
    s.duration = duration;
    s.seed = seed;
    s.area = area;
    s.mobility = mspec;
    s.mobility.model = mobility_model_from_name(model);

    std::vector<MobilityPath> paths = generate_mobility(s, nullptr);
    std::ofstream f(out);
    if (!f) throw SimError("cannot write trace: " + out);
    f << export_ns2(paths);
    std::cout << "wrote " << paths.size() << " node paths to " << out << "\n";
    return 0;
}

int cmd_analyze(const std::string& trace, double range, double dt, double horizon,
                const std::string& series_path) {
    std::vector<MobilityPath> paths = import_ns2(read_file(trace));
    if (paths.empty()) throw SimError("trace has no nodes");

    double duration = horizon;
    if (duration <= 0.0) {
        // defaults to the last arrival time found in the trace
        for (const auto& p : paths)
            for (const auto& seg : p.segments())
                duration = std::max(duration, seg.start_time + seg.travel_time());
        if (duration <= 0.0) duration = 1.0;
    }

    // clamp to a common finite horizon for sampling
    std::vector<MobilityPath> bounded;
    bounded.reserve(paths.size());
    for (const auto& p : paths) bounded.emplace_back(p.node(), p.segments(), duration);

    long changes = link_changes(bounded, range, dt);

    const int n = static_cast<int>(bounded.size());
    double degree_sum = 0.0;
    double partition_sum = 0.0;
    long samples = 0;
    long max_partitions = 0;
    std::ofstream series;
    if (!series_path.empty()) {
        series.open(series_path);
        series << "t\tmean_degree\tpartitions\n";
    }
    for (double t = 0.0; t <= duration + 1e-9; t += dt) {
        double tc = std::min(t, duration);
        std::vector<Vec2> pos(n);
        for (int i = 0; i < n; ++i) pos[i] = bounded[i].position_at(tc);
        long links = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (distance(pos[i], pos[j]) <= range) ++links;
        // connected components
        std::vector<int> label(n, -1);
        int comps = 0;
        for (int s0 = 0; s0 < n; ++s0) {
            if (label[s0] >= 0) continue;
            ++comps;
            std::vector<int> stack{s0};
            label[s0] = s0;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (int v = 0; v < n; ++v)
                    if (label[v] < 0 && distance(pos[u], pos[v]) <= range) {
                        label[v] = s0;
                        stack.push_back(v);
                    }
            }
        }
        double mean_degree = n > 0 ? 2.0 * static_cast<double>(links) / n : 0.0;
        degree_sum += mean_degree;
        partition_sum += comps;
        max_partitions = std::max(max_partitions, static_cast<long>(comps));
        ++samples;
        if (series.is_open())
            series << format_metric(tc) << '\t' << format_metric(mean_degree) << '\t' << comps
                   << '\n';
    }
    std::cout << "nodes " << n << "\n";
    std::cout << "link_changes " << changes << "\n";
    std::cout << "mean_degree " << format_metric(degree_sum / samples) << "\n";
    std::cout << "mean_partitions " << format_metric(partition_sum / samples) << "\n";
    std::cout << "max_partitions " << max_partitions << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MANET multicast routing simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute one scenario");
    std::string run_config, run_protocol, run_event_log, run_out;
    uint64_t run_seed = 0;
    double run_speed = 0.0;
    run->add_option("--config", run_config, "scenario config (JSON)");
    run->add_option("--protocol", run_protocol, "protocol override");
    auto* seed_opt = run->add_option("--seed", run_seed, "seed override");
    run->add_option("--speed", run_speed, "max speed override (m/s)");
    run->add_option("--event-log", run_event_log, "write per-event TSV log");
    run->add_option("--out", run_out, "also write the CSV to this file");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run the experiment grid");
    std::string sweep_config, sweep_out = "sweep_out";
    SweepSpec spec;
    int workers = 0;
    sweep->add_option("--config", sweep_config, "base scenario config (JSON)");
    sweep->add_option("--protocols", spec.protocols, "protocols to sweep")->delimiter(',');
    sweep->add_option("--models", spec.models, "mobility models to sweep")->delimiter(',');
    sweep->add_option("--speeds", spec.speeds, "max speeds (m/s)")->delimiter(',');
    sweep->add_option("--seeds", spec.seeds, "seeds")->delimiter(',');
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--workers", workers, "worker threads (default: hardware)");

    // mobgen
    auto* mobgen = app.add_subcommand("mobgen", "generate an ns-2 mobility trace");
    std::string mg_model = "rwp", mg_out = "trace.tcl";
    int mg_nodes = 50;
    double mg_duration = 200.0;
    uint64_t mg_seed = 1;
    MobilitySpec mspec;
    Area area;
    mobgen->add_option("--model", mg_model, "rwp|rpgm|manhattan")->required();
    mobgen->add_option("--out", mg_out, "output trace file")->required();
    mobgen->add_option("--nodes", mg_nodes, "node count");
    mobgen->add_option("--duration", mg_duration, "seconds");
    mobgen->add_option("--seed", mg_seed, "seed");
    mobgen->add_option("--v-min", mspec.v_min, "m/s");
    mobgen->add_option("--v-max", mspec.v_max, "m/s");
    mobgen->add_option("--pause", mspec.pause, "seconds");
    mobgen->add_option("--area-width", area.width, "meters");
    mobgen->add_option("--area-height", area.height, "meters");
    mobgen->add_option("--rpgm-groups", mspec.rpgm_groups, "group count");
    mobgen->add_option("--rpgm-max-deviation", mspec.rpgm_max_deviation, "meters");
    mobgen->add_option("--rpgm-member-speed-ratio", mspec.rpgm_member_speed_ratio, "ratio");
    mobgen->add_option("--h-streets", mspec.h_streets, "horizontal streets");
    mobgen->add_option("--v-streets", mspec.v_streets, "vertical streets");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "mobility metrics from an ns-2 trace");
    std::string an_trace, an_series;
    double an_range = 150.0, an_dt = 0.1, an_duration = 0.0;
    analyze->add_option("--trace", an_trace, "ns-2 trace file")->required();
    analyze->add_option("--range", an_range, "radio range (m)");
    analyze->add_option("--dt", an_dt, "sampling step (s)");
    analyze->add_option("--duration", an_duration, "horizon (defaults to last arrival)");
    analyze->add_option("--series", an_series, "write per-sample TSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_config, run_protocol, run_seed, seed_opt->count() > 0, run_speed,
                           run_event_log, run_out);
        if (sweep->parsed()) return cmd_sweep(sweep_config, spec, sweep_out, workers);
        if (mobgen->parsed())
            return cmd_mobgen(mg_model, mg_out, mg_nodes, mg_duration, mg_seed, mspec, area);
        if (analyze->parsed())
            return cmd_analyze(an_trace, an_range, an_dt, an_duration, an_series);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
