#include "edgesim/workload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {

// Positive draw: resample a while, then clamp. Table-style sigmas make
// negatives rare but not impossible.
double draw_positive(Rng& rng, const Dist& d) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const double x = rng.normal(d.mean, d.stddev);
    if (x > 0.0) return x;
  }
  return 0.01 * d.mean;
}

Slot draw_deadline(Rng& rng, const Dist& d) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Slot x = std::llround(rng.normal(d.mean, d.stddev));
    if (x >= 3) return x;
  }
  return 3;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::vector<Job> gen_jobs(const WorkloadSpec& spec, Slot horizon,
                          std::uint64_t seed) {
  if (spec.kind == WorkloadSpec::Kind::Explicit) {
    for (const auto& j : spec.explicit_jobs) j.validate();
    return spec.explicit_jobs;
  }
  if (spec.kind == WorkloadSpec::Kind::Trace)
    return load_trace(spec.trace_path, spec, seed);

  Rng rng(derive_seed(seed, {0x6a6f6273}));  // job stream
  std::vector<Job> jobs;
  JobId next_id = 0;

  for (Slot slot = 0; slot < horizon; ++slot) {
    const long count = std::max<long>(
        0, std::lround(rng.normal(spec.arrivals.mean, spec.arrivals.stddev)));
    for (long c = 0; c < count; ++c) {
      Job j;
      j.id = next_id++;
      j.arrival = slot;
      j.input_mb = draw_positive(rng, spec.storage);
      j.compute_mflops = draw_positive(rng, spec.compute);
      j.max_uplink = draw_positive(rng, spec.uplink);
      j.max_downlink = draw_positive(rng, spec.downlink);
      j.deadline = draw_deadline(rng, spec.deadline);
      j.output_mb = spec.output_ratio * j.input_mb;
      j.paradigm = spec.paradigm;
      jobs.push_back(j);
    }
  }

  if (spec.kind == WorkloadSpec::Kind::Bimodal) {
    // exact class proportions via a seeded shuffle, then utilities per class
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(seed, {0x636c617373}));
    shuffle_rng.shuffle(order);
    const std::size_t high_count = static_cast<std::size_t>(
        std::lround(spec.high_fraction * static_cast<double>(jobs.size())));
    for (std::size_t i = 0; i < order.size(); ++i)
      jobs[order[i]].value_class =
          i < high_count ? ValueClass::High : ValueClass::Low;
    for (auto& j : jobs) {
      const Dist& d =
          j.value_class == ValueClass::High ? spec.utility_high : spec.utility;
      j.utility = draw_positive(rng, d);
    }
  } else {
    for (auto& j : jobs) j.utility = draw_positive(rng, spec.utility);
  }

  for (const auto& j : jobs) j.validate();
  return jobs;
}

std::vector<ServerState> gen_servers(const ServerSpec& spec,
                                     std::uint64_t seed) {
  std::vector<ServerState> servers;
  if (!spec.explicit_caps.empty()) {
    int id = 0;
    for (const auto& cap : spec.explicit_caps)
      servers.emplace_back(id++, cap);
    return servers;
  }
  Rng rng(derive_seed(seed, {0x73727673}));  // server stream
  for (int i = 0; i < spec.count; ++i) {
    ResourceVector cap{draw_positive(rng, spec.storage),
                       draw_positive(rng, spec.compute),
                       draw_positive(rng, spec.uplink),
                       draw_positive(rng, spec.downlink)};
    servers.emplace_back(i, cap);
  }
  return servers;
}

std::vector<Job> load_trace(const std::string& path, const WorkloadSpec& spec,
                            std::uint64_t seed) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open trace file: " + path);

  static const std::string kHeader =
      "job_id,arrival_epoch_s,storage_mb,compute_mflops,deadline_s,priority";

  std::string line;
  if (!std::getline(in, line)) return {};  // empty file -> empty job list
  // tolerate a trailing \r from CRLF files
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw std::runtime_error("trace header mismatch, expected: " + kHeader);

  Rng rng(derive_seed(seed, {0x7472616365}));
  std::vector<Job> jobs;
  std::size_t line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);

    auto fail = [&](const std::string& why) {
      throw std::runtime_error("trace line " + std::to_string(line_no) + ": " +
                               why);
    };
    if (fields.size() != 6) fail("expected 6 fields");

    Job j;
    try {
      j.id = std::stoll(fields[0]);
      const double arrival_s = std::stod(fields[1]);
      j.input_mb = std::stod(fields[2]);
      j.compute_mflops = std::stod(fields[3]);
      const double deadline_s = std::stod(fields[4]);
      if (arrival_s < 0 || deadline_s <= 0) fail("negative time field");
      j.arrival = static_cast<Slot>(arrival_s / spec.trace_slot_seconds);
      j.deadline = static_cast<Slot>(
          std::ceil(deadline_s / spec.trace_slot_seconds));
    } catch (const std::invalid_argument&) {
      fail("unparsable numeric field");
    } catch (const std::out_of_range&) {
      fail("numeric field out of range");
    }
    if (spec.deadline_cap) j.deadline = std::min(j.deadline, *spec.deadline_cap);
    j.deadline = std::max<Slot>(3, j.deadline);

    const auto it = spec.priority_utility.find(lower(fields[5]));
    if (it == spec.priority_utility.end()) fail("unknown priority '" + fields[5] + "'");
    j.utility = it->second;
    j.value_class = lower(fields[5]) == "high" ? ValueClass::High
                                               : ValueClass::Low;

    // the trace does not carry link caps or result sizes
    j.max_uplink = draw_positive(rng, spec.uplink);
    j.max_downlink = draw_positive(rng, spec.downlink);
    j.output_mb = spec.output_ratio * j.input_mb;
    j.paradigm = spec.paradigm;
    j.validate();
    jobs.push_back(j);
  }
  return jobs;
}

}  // namespace edgesim
