#include "manetsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "manetsim/simulation.hpp"

namespace manet {

void SweepSpec::validate() const {
    if (protocols.empty() || models.empty() || speeds.empty() || seeds.empty())
        throw ValidationError("sweep", "all sweep axes must be non-empty");
    for (const auto& p : protocols) canonical_protocol_name(p);
    for (const auto& m : models) mobility_model_from_name(m);
    for (double v : speeds)
        if (!(v > 0.0)) throw ValidationError("sweep.speeds", "speeds must be > 0");
}

Scenario cell_scenario(const Scenario& base, const std::string& protocol,
                       const std::string& model, double speed, uint64_t seed) {
    Scenario s = base;
    s.protocol = canonical_protocol_name(protocol);
    s.mobility.model = mobility_model_from_name(model);
    s.mobility.v_max = speed;
    s.mobility.v_min = std::min(base.mobility.v_min, speed);
    s.seed = seed;
    return s;
}

SweepOutcome run_sweep(const Scenario& base, const SweepSpec& spec, int workers) {
    spec.validate();
    base.validate();

    struct Cell {
        std::string protocol, model;
        double speed;
        uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& p : spec.protocols)
        for (const auto& m : spec.models)
            for (double v : spec.speeds)
                for (uint64_t sd : spec.seeds) cells.push_back({p, m, v, sd});

    std::vector<RunResult> slots(cells.size());
    std::vector<uint8_t> ok(cells.size(), 0);
    std::vector<std::string> failures(cells.size());
    std::atomic<size_t> next{0};

    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            try {
                Scenario s = cell_scenario(base, c.protocol, c.model, c.speed, c.seed);
                Simulation sim(s);
                slots[i] = sim.run();
                ok[i] = 1;
            } catch (const std::exception& e) {
                failures[i] = c.protocol + "," + c.model + "," + format_metric(c.speed) + "," +
                              std::to_string(c.seed) + ": " + e.what();
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    SweepOutcome out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (ok[i])
            out.results.push_back(std::move(slots[i]));
        else if (!failures[i].empty())
            out.failures.push_back(std::move(failures[i]));
    }
    return out;
}

void write_sweep_outputs(const SweepOutcome& outcome, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream runs(fs::path(out_dir) / "runs.csv");
        runs << run_csv_header() << "\n";
        for (const auto& r : outcome.results) runs << run_csv_row(r) << "\n";
    }
    if (!outcome.results.empty()) {
        std::vector<AggregateCell> agg = aggregate(outcome.results);
        std::ofstream af(fs::path(out_dir) / "aggregate.csv");
        af << aggregate_csv_header() << "\n";
        for (const auto& c : agg) af << aggregate_csv_row(c) << "\n";

        // per-(protocol, model) speed series, the plot-ready view
        std::map<std::pair<std::string, std::string>, std::vector<const AggregateCell*>> series;
        for (const auto& c : agg) series[{c.protocol, c.mobility}].push_back(&c);
        for (auto& [key, cells] : series) {
            std::sort(cells.begin(), cells.end(), [](const AggregateCell* a,
                                                     const AggregateCell* b) {
                return a->max_speed < b->max_speed;
            });
            std::ofstream sf(fs::path(out_dir) /
                             ("series_" + key.first + "_" + key.second + ".csv"));
            sf << "max_speed,mean_pdr,std_pdr,mean_nro,std_nro,n\n";
            for (const AggregateCell* c : cells)
                sf << format_metric(c->max_speed) << ',' << format_metric(c->mean_pdr) << ','
                   << format_metric(c->std_pdr) << ',' << format_metric(c->mean_nro) << ','
                   << format_metric(c->std_nro) << ',' << c->n << "\n";
        }
    }
    if (!outcome.failures.empty()) {
        std::ofstream ff(fs::path(out_dir) / "failures.txt");
        for (const auto& f : outcome.failures) ff << f << "\n";
    }
}

} // namespace manet
