#include "edgesim/scenario.hpp"

#include <fstream>
#include <stdexcept>

namespace edgesim {

using nlohmann::json;

namespace {

Dist dist_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {j.at("mean").get<double>(), j.value("stddev", 0.0)};
}

json dist_to_json(const Dist& d) {
  return json{{"mean", d.mean}, {"stddev", d.stddev}};
}

Paradigm paradigm_from_string(const std::string& s) {
  if (s == "pipeline") return Paradigm::Pipeline;
  if (s == "batch") return Paradigm::Batch;
  throw std::invalid_argument("unknown paradigm: " + s);
}

ValueClass value_class_from_string(const std::string& s) {
  if (s == "high") return ValueClass::High;
  if (s == "low") return ValueClass::Low;
  if (s == "unclassified") return ValueClass::Unclassified;
  throw std::invalid_argument("unknown value_class: " + s);
}

}  // namespace

json job_to_json(const Job& j) {
  return json{{"id", j.id},
              {"arrival", j.arrival},
              {"deadline", j.deadline},
              {"utility", j.utility},
              {"input_mb", j.input_mb},
              {"output_mb", j.output_mb},
              {"compute_mflops", j.compute_mflops},
              {"max_uplink", j.max_uplink},
              {"max_downlink", j.max_downlink},
              {"value_class", to_string(j.value_class)},
              {"paradigm", to_string(j.paradigm)}};
}

Job job_from_json(const json& in) {
  Job j;
  j.id = in.at("id").get<JobId>();
  j.arrival = in.at("arrival").get<Slot>();
  j.deadline = in.at("deadline").get<Slot>();
  j.utility = in.at("utility").get<double>();
  j.input_mb = in.at("input_mb").get<double>();
  j.output_mb =
      in.contains("output_mb") ? in.at("output_mb").get<double>() : 0.0;
  j.compute_mflops = in.at("compute_mflops").get<double>();
  j.max_uplink = in.at("max_uplink").get<double>();
  j.max_downlink = in.at("max_downlink").get<double>();
  if (in.contains("value_class"))
    j.value_class = value_class_from_string(in.at("value_class"));
  if (in.contains("paradigm"))
    j.paradigm = paradigm_from_string(in.at("paradigm"));
  return j;
}

void Scenario::validate() const {
  if (clock.horizon <= 0)
    throw std::invalid_argument("scenario: horizon must be positive");
  if (clock.slot_seconds <= 0)
    throw std::invalid_argument("scenario: slot_seconds must be positive");
  auction.validate();
  if (workload.kind == WorkloadSpec::Kind::Trace && workload.trace_path.empty())
    throw std::invalid_argument("scenario: trace workload needs a trace path");
  if (workload.high_fraction < 0 || workload.high_fraction > 1)
    throw std::invalid_argument("scenario: high_fraction must be in [0,1]");
  if (servers.explicit_caps.empty() && servers.count < 0)
    throw std::invalid_argument("scenario: server count must be >= 0");
}

Scenario scenario_from_json(const json& in) {
  Scenario s;
  s.name = in.value("name", std::string("scenario"));
  s.seed = in.value("seed", std::uint64_t{1});
  if (in.contains("algorithm")) {
    const auto a = algorithm_from_string(in.at("algorithm"));
    if (!a)
      throw std::invalid_argument("unknown algorithm: " +
                                  in.at("algorithm").get<std::string>());
    s.algorithm = *a;
  }

  if (in.contains("clock")) {
    const json& c = in.at("clock");
    s.clock.slot_seconds = c.value("slot_seconds", 1.0);
    s.clock.horizon = c.value("horizon", Slot{100});
  }

  if (in.contains("servers")) {
    const json& sv = in.at("servers");
    if (sv.contains("capacities")) {
      for (const json& cap : sv.at("capacities"))
        s.servers.explicit_caps.push_back(
            {cap.at("storage").get<double>(), cap.at("compute").get<double>(),
             cap.at("uplink").get<double>(),
             cap.at("downlink").get<double>()});
      s.servers.count = static_cast<int>(s.servers.explicit_caps.size());
    } else {
      s.servers.count = sv.value("count", 8);
      if (sv.contains("storage")) s.servers.storage = dist_from_json(sv.at("storage"));
      if (sv.contains("compute")) s.servers.compute = dist_from_json(sv.at("compute"));
      if (sv.contains("uplink")) s.servers.uplink = dist_from_json(sv.at("uplink"));
      if (sv.contains("downlink")) s.servers.downlink = dist_from_json(sv.at("downlink"));
    }
  }

  if (in.contains("workload")) {
    const json& w = in.at("workload");
    WorkloadSpec& ws = s.workload;
    const std::string kind = w.value("kind", std::string("normal"));
    if (kind == "normal") {
      ws.kind = WorkloadSpec::Kind::Normal;
    } else if (kind == "bimodal") {
      ws.kind = WorkloadSpec::Kind::Bimodal;
      // table defaults for the bimodal mix
      ws.storage = {160, 10};
      ws.compute = {80, 20};
      ws.uplink = {70, 10};
      ws.downlink = {70, 10};
      ws.utility = {40, 10};
      ws.utility_high = {160, 20};
      ws.paradigm = Paradigm::Batch;
    } else if (kind == "trace") {
      ws.kind = WorkloadSpec::Kind::Trace;
      ws.paradigm = Paradigm::Batch;
    } else if (kind == "explicit") {
      ws.kind = WorkloadSpec::Kind::Explicit;
    } else {
      throw std::invalid_argument("unknown workload kind: " + kind);
    }

    if (w.contains("arrivals")) ws.arrivals = dist_from_json(w.at("arrivals"));
    if (w.contains("storage")) ws.storage = dist_from_json(w.at("storage"));
    if (w.contains("compute")) ws.compute = dist_from_json(w.at("compute"));
    if (w.contains("uplink")) ws.uplink = dist_from_json(w.at("uplink"));
    if (w.contains("downlink")) ws.downlink = dist_from_json(w.at("downlink"));
    if (w.contains("deadline")) ws.deadline = dist_from_json(w.at("deadline"));
    if (w.contains("utility")) ws.utility = dist_from_json(w.at("utility"));
    if (w.contains("utility_high"))
      ws.utility_high = dist_from_json(w.at("utility_high"));
    ws.high_fraction = w.value("high_fraction", ws.high_fraction);
    ws.output_ratio = w.value("output_ratio", ws.output_ratio);
    if (w.contains("paradigm"))
      ws.paradigm = paradigm_from_string(w.at("paradigm"));

    ws.trace_path = w.value("trace_path", std::string{});
    ws.trace_slot_seconds = w.value("trace_slot_seconds", 600.0);
    if (w.contains("deadline_cap_slots"))
      ws.deadline_cap = w.at("deadline_cap_slots").get<Slot>();
    if (w.contains("priority_utility")) {
      ws.priority_utility.clear();
      for (const auto& [key, val] : w.at("priority_utility").items())
        ws.priority_utility[key] = val.get<double>();
    }

    if (w.contains("jobs"))
      for (const json& jj : w.at("jobs"))
        ws.explicit_jobs.push_back(job_from_json(jj));
    if (w.contains("jobs_file")) {
      std::ifstream jf(w.at("jobs_file").get<std::string>());
      if (!jf)
        throw std::runtime_error("cannot open jobs file: " +
                                 w.at("jobs_file").get<std::string>());
      json arr = json::parse(jf);
      for (const json& jj : arr) ws.explicit_jobs.push_back(job_from_json(jj));
    }
  }

  if (in.contains("auction")) {
    const json& a = in.at("auction");
    s.auction.percentile_weight = a.value("percentile_weight", 0.025);
    s.auction.congestion_weight = a.value("congestion_weight", 0.025);
    s.auction.fit_discount = a.value("fit_discount", 0.10);
    s.auction.preempt_margin = a.value("preempt_margin", 0.05);
    s.auction.reject_markup = a.value("reject_markup", 0.10);
    if (a.value("margin_requires_strictly_above", false))
      s.auction.margin_mode = AuctionConfig::MarginMode::RequireAbove;
  }

  s.adjust_auction_time = in.value("adjust_auction_time", false);
  if (in.contains("auction_costs_s")) {
    const json& c = in.at("auction_costs_s");
    s.costs.kg_preempt = c.value("kg-preempt", s.costs.kg_preempt);
    s.costs.kg_retain = c.value("kg-retain", s.costs.kg_retain);
    s.costs.dk_preempt = c.value("dk-preempt", s.costs.dk_preempt);
    s.costs.dk_retain = c.value("dk-retain", s.costs.dk_retain);
  }
  s.parallel_auctions = in.value("parallel_auctions", false);
  s.emit_timeseries = in.value("emit_timeseries", false);

  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json out;
  out["name"] = s.name;
  out["seed"] = s.seed;
  out["algorithm"] = to_string(s.algorithm);
  out["clock"] = {{"slot_seconds", s.clock.slot_seconds},
                  {"horizon", s.clock.horizon}};
  if (!s.servers.explicit_caps.empty()) {
    json caps = json::array();
    for (const auto& c : s.servers.explicit_caps)
      caps.push_back({{"storage", c.storage},
                      {"compute", c.compute},
                      {"uplink", c.uplink},
                      {"downlink", c.downlink}});
    out["servers"] = {{"capacities", caps}};
  } else {
    out["servers"] = {{"count", s.servers.count},
                      {"storage", dist_to_json(s.servers.storage)},
                      {"compute", dist_to_json(s.servers.compute)},
                      {"uplink", dist_to_json(s.servers.uplink)},
                      {"downlink", dist_to_json(s.servers.downlink)}};
  }

  json w;
  switch (s.workload.kind) {
    case WorkloadSpec::Kind::Normal: w["kind"] = "normal"; break;
    case WorkloadSpec::Kind::Bimodal: w["kind"] = "bimodal"; break;
    case WorkloadSpec::Kind::Trace: w["kind"] = "trace"; break;
    case WorkloadSpec::Kind::Explicit: w["kind"] = "explicit"; break;
  }
  w["arrivals"] = dist_to_json(s.workload.arrivals);
  w["storage"] = dist_to_json(s.workload.storage);
  w["compute"] = dist_to_json(s.workload.compute);
  w["uplink"] = dist_to_json(s.workload.uplink);
  w["downlink"] = dist_to_json(s.workload.downlink);
  w["deadline"] = dist_to_json(s.workload.deadline);
  w["utility"] = dist_to_json(s.workload.utility);
  w["utility_high"] = dist_to_json(s.workload.utility_high);
  w["high_fraction"] = s.workload.high_fraction;
  w["output_ratio"] = s.workload.output_ratio;
  w["paradigm"] = to_string(s.workload.paradigm);
  if (!s.workload.trace_path.empty()) {
    w["trace_path"] = s.workload.trace_path;
    w["trace_slot_seconds"] = s.workload.trace_slot_seconds;
  }
  if (s.workload.deadline_cap) w["deadline_cap_slots"] = *s.workload.deadline_cap;
  if (!s.workload.explicit_jobs.empty()) {
    json arr = json::array();
    for (const auto& j : s.workload.explicit_jobs) arr.push_back(job_to_json(j));
    w["jobs"] = arr;
  }
  out["workload"] = w;

  out["auction"] = {
      {"percentile_weight", s.auction.percentile_weight},
      {"congestion_weight", s.auction.congestion_weight},
      {"fit_discount", s.auction.fit_discount},
      {"preempt_margin", s.auction.preempt_margin},
      {"reject_markup", s.auction.reject_markup},
      {"margin_requires_strictly_above",
       s.auction.margin_mode == AuctionConfig::MarginMode::RequireAbove}};
  out["adjust_auction_time"] = s.adjust_auction_time;
  out["auction_costs_s"] = {{"kg-preempt", s.costs.kg_preempt},
                            {"kg-retain", s.costs.kg_retain},
                            {"dk-preempt", s.costs.dk_preempt},
                            {"dk-retain", s.costs.dk_retain}};
  out["parallel_auctions"] = s.parallel_auctions;
  out["emit_timeseries"] = s.emit_timeseries;
  return out;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open scenario file: " + path.string());
  json j = json::parse(in);
  return scenario_from_json(j);
}

Scenario adjust_for_auction_time(Scenario s, const AuctionCosts& costs) {
  s.adjust_auction_time = true;
  s.costs = costs;
  return s;
}

}  // namespace edgesim
