#include "reflexsim/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <thread>

#include "reflexsim/metrics.hpp"

namespace reflexsim {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_or_inf(const std::optional<double>& v) {
  return v ? fmt(*v) : "inf";
}

std::string size_str(uint64_t size_bytes) {
  return size_bytes == kSizeUnbounded ? "inf" : std::to_string(size_bytes);
}

// "weighted:9:1" is not a friendly directory name.
std::string sanitize_tag(const std::string& tag) {
  std::string out = tag;
  for (char& c : out)
    if (c == ':') c = '_';
  return out;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

// Deterministic worker pool: run all jobs in fixed-size batches, then let
// the caller write results in order.
void run_jobs(std::vector<std::function<void()>>& jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  size_t batch = std::clamp<size_t>(hw ? hw : 4, 1, 8);
  for (size_t start = 0; start < jobs.size(); start += batch) {
    size_t end = std::min(start + batch, jobs.size());
    std::vector<std::future<void>> futures;
    for (size_t j = start; j < end; ++j)
      futures.push_back(std::async(std::launch::async, jobs[j]));
    for (auto& f : futures) f.get();
  }
}

// Scalar metrics of one run, used by compare.csv and sweep results.csv.
// The speedup entries are relative to the same-seed baseline run.
std::vector<std::pair<std::string, double>> run_metrics(
    const RunSummary& s, const std::vector<FlowRecord>& records,
    const SpeedupJoin* join) {
  std::vector<std::pair<std::string, double>> m;
  m.emplace_back("flows_finished", (double)s.flows_finished);
  m.emplace_back("regular.fct_mean_s", s.regular_all.fct_mean_s);
  m.emplace_back("regular.fct_p99_s", s.regular_all.fct_p99_s);
  m.emplace_back("regular.mean_rate_mean_bps",
                 s.regular_all.mean_rate_mean_bps);
  m.emplace_back("flexible.fct_mean_s", s.flexible_all.fct_mean_s);
  m.emplace_back("flexible.mean_rate_mean_bps",
                 s.flexible_all.mean_rate_mean_bps);
  m.emplace_back("fraction_delivered.mean", s.fraction_delivered_mean);
  if (join) {
    std::map<FlowId, FlowKind> kind;
    for (const FlowRecord& r : records) kind[r.flow_id] = r.kind;
    double sum_reg = 0.0, sum_flex = 0.0;
    int n_reg = 0, n_flex = 0;
    for (const auto& [id, speedup] : join->speedup) {
      if (kind.at(id) == FlowKind::Regular) {
        sum_reg += speedup;
        ++n_reg;
      } else {
        sum_flex += speedup;
        ++n_flex;
      }
    }
    m.emplace_back("regular.speedup_mean", n_reg ? sum_reg / n_reg : 0.0);
    m.emplace_back("flexible.speedup_mean", n_flex ? sum_flex / n_flex : 0.0);
  }
  return m;
}

void write_speedups_csv(std::ostream& out,
                        const std::vector<FlowRecord>& treated,
                        const SpeedupJoin& join) {
  std::map<FlowId, const FlowRecord*> by_id;
  for (const FlowRecord& r : treated) by_id[r.flow_id] = &r;
  out << "flow_id,kind,size_F,speedup\n";
  for (const auto& [id, speedup] : join.speedup) {
    const FlowRecord& r = *by_id.at(id);
    out << id << ',' << to_string(r.kind) << ',' << size_str(r.size_bytes)
        << ',' << fmt(speedup) << "\n";
  }
}

int guard(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

void write_flows_csv(std::ostream& out,
                     const std::vector<FlowRecord>& records) {
  out << "flow_id,kind,size_F,arrival_time,completion_time,fct,delivered,"
         "discarded,mean_rate,priority_switch_count\n";
  for (const FlowRecord& r : records) {
    out << r.flow_id << ',' << to_string(r.kind) << ','
        << size_str(r.size_bytes) << ',' << fmt(r.arrival_time_s) << ','
        << fmt_or_inf(r.completion_time_s) << ',' << fmt_or_inf(r.fct_s) << ','
        << fmt(r.delivered_bytes) << ',' << fmt(r.discarded_bytes) << ','
        << fmt(r.mean_rate_bps) << ',' << r.priority_switches << "\n";
  }
}

void write_timeseries_csv(std::ostream& out,
                          const std::vector<TimePoint>& series) {
  out << "time_s,flow_id,rate_bps,priority,B_alpha_bytes,B_r_bytes,R_fair_bps\n";
  for (const TimePoint& p : series) {
    out << fmt(p.time_s) << ',' << p.flow_id << ',' << fmt(p.rate_bps) << ','
        << to_string(p.priority) << ','
        << (p.b_alpha_bytes ? fmt(*p.b_alpha_bytes) : "") << ','
        << (p.b_r_bytes ? fmt(*p.b_r_bytes) : "") << ','
        << (p.r_fair_bps ? fmt(*p.r_fair_bps) : "") << "\n";
  }
}

int cmd_run(const fs::path& scenario_path, const fs::path& out_dir,
            const ScenarioOverrides& overrides) {
  return guard([&] {
    ScenarioDoc doc = parse_scenario_file(scenario_path);
    apply_overrides(doc, overrides);
    Scenario scen = build_scenario(doc, doc.sim.seed);

    RunOptions opts;
    opts.timeseries_decimation = doc.outputs.timeseries_decimation;
    RunResult res = run(scen, opts);

    fs::create_directories(out_dir);
    {
      std::ofstream out = open_out(out_dir / "flows.csv");
      write_flows_csv(out, res.records);
    }
    if (opts.timeseries_decimation > 0) {
      std::ofstream out = open_out(out_dir / "timeseries.csv");
      write_timeseries_csv(out, res.timeseries);
    }
    {
      std::ofstream out = open_out(out_dir / "summary.txt");
      write_summary(out, summarize(res.records, scen.sim));
    }
    for (const std::string& line : res.event_log)
      std::cerr << "note: " << line << "\n";
    std::cout << "wrote " << (out_dir / "flows.csv").string() << " ("
              << res.records.size() << " flows)\n";
  });
}

int cmd_compare(const fs::path& scenario_path,
                const std::vector<std::string>& scheme_tags,
                const fs::path& out_dir, const ScenarioOverrides& overrides,
                int n_seeds) {
  return guard([&] {
    if (n_seeds < 1) throw ScenarioError("compare: need at least one seed");
    ScenarioDoc doc = parse_scenario_file(scenario_path);
    apply_overrides(doc, overrides);

    // Baseline is always present and always first.
    std::vector<std::string> tags = {"baseline"};
    for (const std::string& t : scheme_tags)
      if (std::find(tags.begin(), tags.end(), t) == tags.end())
        tags.push_back(t);
    std::vector<Scheme> schemes;
    for (const std::string& t : tags)
      schemes.push_back(parse_scheme_tag(t, doc));

    std::vector<uint64_t> seeds;
    for (int k = 0; k < n_seeds; ++k) seeds.push_back(doc.sim.seed + (uint64_t)k);

    struct Slot {
      RunResult result;
      RunSummary summary;
      SimConfig sim;
    };
    std::vector<Slot> slots(tags.size() * seeds.size());
    auto slot_at = [&](size_t scheme_idx, size_t seed_idx) -> Slot& {
      return slots[scheme_idx * seeds.size() + seed_idx];
    };

    std::vector<std::function<void()>> jobs;
    for (size_t si = 0; si < tags.size(); ++si)
      for (size_t ki = 0; ki < seeds.size(); ++ki)
        jobs.push_back([&, si, ki] {
          ScenarioDoc local = doc;
          apply_scheme(local, schemes[si]);
          Scenario scen = build_scenario(local, seeds[ki]);
          RunOptions opts;
          opts.record_decisions = false;
          Slot& slot = slot_at(si, ki);
          slot.result = run(scen, opts);
          slot.summary = summarize(slot.result.records, scen.sim);
          slot.sim = scen.sim;
        });
    run_jobs(jobs);

    fs::create_directories(out_dir);
    // metric -> scheme -> per-seed values, in first-seen metric order
    std::vector<std::string> metric_order;
    std::map<std::string, std::map<size_t, std::vector<double>>> table;
    for (size_t si = 0; si < tags.size(); ++si) {
      for (size_t ki = 0; ki < seeds.size(); ++ki) {
        Slot& slot = slot_at(si, ki);
        fs::path dir =
            out_dir / sanitize_tag(tags[si]) / ("seed" + std::to_string(ki));
        fs::create_directories(dir);
        {
          std::ofstream out = open_out(dir / "flows.csv");
          write_flows_csv(out, slot.result.records);
        }
        {
          std::ofstream out = open_out(dir / "summary.txt");
          write_summary(out, slot.summary);
        }
        SpeedupJoin join =
            speedup_join(slot_at(0, ki).result.records, slot.result.records);
        {
          std::ofstream out = open_out(dir / "speedups.csv");
          write_speedups_csv(out, slot.result.records, join);
        }
        for (auto& [name, value] :
             run_metrics(slot.summary, slot.result.records, &join)) {
          if (!table.count(name)) metric_order.push_back(name);
          table[name][si].push_back(value);
        }
      }
    }

    std::ofstream out = open_out(out_dir / "compare.csv");
    out << "scheme,metric,min,mean,max\n";
    for (size_t si = 0; si < tags.size(); ++si)
      for (const std::string& name : metric_order) {
        const std::vector<double>& vals = table[name][si];
        double mn = vals[0], mx = vals[0], sum = 0.0;
        for (double v : vals) {
          mn = std::min(mn, v);
          mx = std::max(mx, v);
          sum += v;
        }
        out << tags[si] << ',' << name << ',' << fmt(mn) << ','
            << fmt(sum / vals.size()) << ',' << fmt(mx) << "\n";
      }
    std::cout << "wrote " << (out_dir / "compare.csv").string() << " ("
              << tags.size() << " schemes x " << seeds.size() << " seeds)\n";
  });
}

int cmd_sweep(const fs::path& scenario_path, const std::string& param_name,
              const std::vector<double>& values, const fs::path& out_dir,
              const ScenarioOverrides& overrides, int n_seeds) {
  return guard([&] {
    if (n_seeds < 1) throw ScenarioError("sweep: need at least one seed");
    if (values.empty()) throw ScenarioError("sweep: no values given");
    std::optional<SweepParam> param = sweep_param_from_string(param_name);
    if (!param)
      throw ScenarioError("sweep: unknown parameter \"" + param_name +
                          "\" (expected alpha, r, D_exploit or T_int)");

    ScenarioDoc doc = parse_scenario_file(scenario_path);
    apply_overrides(doc, overrides);
    // Surface bad sweep values before spending time on runs.
    {
      ScenarioDoc probe = doc;
      apply_sweep_param(probe, *param, values.front());
    }

    std::vector<uint64_t> seeds;
    for (int k = 0; k < n_seeds; ++k) seeds.push_back(doc.sim.seed + (uint64_t)k);

    struct Slot {
      RunResult result;
      RunSummary summary;
    };
    std::vector<Slot> base(seeds.size());
    std::vector<Slot> slots(values.size() * seeds.size());
    auto slot_at = [&](size_t vi, size_t ki) -> Slot& {
      return slots[vi * seeds.size() + ki];
    };

    std::vector<std::function<void()>> jobs;
    for (size_t ki = 0; ki < seeds.size(); ++ki)
      jobs.push_back([&, ki] {
        ScenarioDoc local = doc;
        apply_scheme(local, Scheme::baseline());
        Scenario scen = build_scenario(local, seeds[ki]);
        RunOptions opts;
        opts.record_decisions = false;
        base[ki].result = run(scen, opts);
        base[ki].summary = summarize(base[ki].result.records, scen.sim);
      });
    for (size_t vi = 0; vi < values.size(); ++vi)
      for (size_t ki = 0; ki < seeds.size(); ++ki)
        jobs.push_back([&, vi, ki] {
          ScenarioDoc local = doc;
          apply_sweep_param(local, *param, values[vi]);
          Scenario scen = build_scenario(local, seeds[ki]);
          RunOptions opts;
          opts.record_decisions = false;
          Slot& slot = slot_at(vi, ki);
          slot.result = run(scen, opts);
          slot.summary = summarize(slot.result.records, scen.sim);
        });
    run_jobs(jobs);

    fs::create_directories(out_dir);
    std::ofstream out = open_out(out_dir / "results.csv");
    out << "param,value,seed,metric,metric_value\n";
    for (size_t vi = 0; vi < values.size(); ++vi)
      for (size_t ki = 0; ki < seeds.size(); ++ki) {
        Slot& slot = slot_at(vi, ki);
        SpeedupJoin join =
            speedup_join(base[ki].result.records, slot.result.records);
        for (auto& [name, value] :
             run_metrics(slot.summary, slot.result.records, &join))
          out << to_string(*param) << ',' << fmt(values[vi]) << ',' << seeds[ki]
              << ',' << name << ',' << fmt(value) << "\n";
      }
    std::cout << "wrote " << (out_dir / "results.csv").string() << " ("
              << values.size() << " values x " << seeds.size() << " seeds)\n";
  });
}

}  // namespace reflexsim
