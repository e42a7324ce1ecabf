#include <cmath>
#include <iostream>
#include <sstream>

#include "edgesim/oracle.hpp"

namespace edgesim {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

struct Names {
  static std::string x(int i, JobId j) {
    return "x_" + std::to_string(i) + "_" + std::to_string(j);
  }
  static std::string tau(JobId j) { return "tau_" + std::to_string(j); }
  static std::string sigma(JobId j, Slot n) {
    return "sigma_" + std::to_string(j) + "_n" + std::to_string(n);
  }
  static std::string kappa(JobId j, Slot n) {
    return "kappa_" + std::to_string(j) + "_n" + std::to_string(n);
  }
  static std::string sigmap(JobId j, Slot n) {
    return "sigmap_" + std::to_string(j) + "_n" + std::to_string(n);
  }
  static std::string du(JobId j) { return "d_u_" + std::to_string(j); }
  static std::string dp(JobId j) { return "d_p_" + std::to_string(j); }
  static std::string dd(JobId j) { return "d_d_" + std::to_string(j); }
  static std::string dt(JobId j) { return "d_t_" + std::to_string(j); }
};

struct Term {
  double coef;
  std::string var;
};

std::string lin_expr(const std::vector<Term>& terms) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms) {
    const double c = t.coef;
    if (first) {
      os << num(c) << " " << t.var;
      first = false;
    } else if (c >= 0) {
      os << " + " << num(c) << " " << t.var;
    } else {
      os << " - " << num(-c) << " " << t.var;
    }
  }
  if (first) os << "0 _zero";  // empty expression guard, never emitted
  return os.str();
}

}  // namespace

OracleInstance materialize_instance(const Scenario& scenario) {
  OracleInstance inst;
  inst.jobs = gen_jobs(scenario.workload, scenario.clock.horizon, scenario.seed);
  for (const auto& s : gen_servers(scenario.servers, scenario.seed))
    inst.capacities.push_back(s.capacity());
  inst.horizon = scenario.clock.horizon;
  return inst;
}

std::string export_model(const Scenario& scenario) {
  const OracleInstance inst = materialize_instance(scenario);
  const Slot N = inst.horizon;
  const double eps = 1e-6;

  std::ostringstream out;
  out << "# assignment model export\n";
  out << "# objective: total utility of jobs assigned and run to completion\n";
  out << "# family map:\n";
  out << "#   c2/c4/c6   stream totals bounded by assignment (LIN)\n";
  out << "#   c3/c5/c7   completion forces full streams (PROD + big-M LIN)\n";
  out << "#   c8         partial results only when preempted (LIN, eps slack "
         "for the strict inequality)\n";
  out << "#   c9/c10     pipeline proportionality prefixes (LIN)\n";
  out << "#   c11..c14   phase-length ordering and minimums (LIN)\n";
  out << "#   c15        storage occupancy with theta windows (STORAGE)\n";
  out << "#   c16..c18   per-slot compute/uplink/downlink caps (CAPSUM)\n";
  out << "#   c19        at most one server per job (LIN)\n";
  out << "#   c20/c21    binary domains (VAR BIN)\n";
  out << "#   c22/c24/c26 activity windows (SUPPORT)\n";
  out << "#   c23/c25/c27 stream nonnegativity (VAR bounds)\n";
  out << "#   c28        preemption slot domain (VAR INT + LIN)\n";
  out << "#   c29/c30    preemption consistency (PROD, DIVLT + big-M LIN)\n";
  out << "# note: stream-total rows use the job's summed assignment "
         "sum_i x_i_j; a per-server copy would zero every stream on the\n";
  out << "# servers the job is NOT assigned to.\n";
  out << "# note: strict inequalities are exported with an epsilon slack of "
      << num(eps) << " so linear solvers can consume them.\n";
  out << "# note: absent solution variables default to the VAR DEFAULT "
         "value (streams and assignment to 0).\n";
  if (inst.capacities.size() > 4 || inst.jobs.size() > 25)
    out << "# WARNING: instance exceeds the size this model is expected to "
           "solve in reasonable time (4 servers / 25 jobs)\n";

  out << "EDGESIM-MODEL 1\n";
  out << "NAME " << scenario.name << "\n";
  out << "HORIZON " << N << "\n";
  out << "SERVERS " << inst.capacities.size() << "\n";
  out << "JOBS " << inst.jobs.size() << "\n";
  out << "EPSILON " << num(eps) << "\n";

  for (std::size_t i = 0; i < inst.capacities.size(); ++i) {
    const auto& c = inst.capacities[i];
    out << "SERVER " << i << " STORAGE " << num(c.storage) << " COMPUTE "
        << num(c.compute) << " UPLINK " << num(c.uplink) << " DOWNLINK "
        << num(c.downlink) << "\n";
  }
  for (const auto& j : inst.jobs)
    out << "JOB " << j.id << " ARRIVAL " << j.arrival << " DEADLINE "
        << j.deadline << " INPUT " << num(j.input_mb) << " OUTPUT "
        << num(j.output_mb) << " COMPUTE " << num(j.compute_mflops)
        << " UTILITY " << num(j.utility) << "\n";

  auto window_end = [&](const Job& j) { return std::min(N, j.expiry()); };

  // variables
  for (std::size_t i = 0; i < inst.capacities.size(); ++i)
    for (const auto& j : inst.jobs)
      out << "VAR " << Names::x(static_cast<int>(i), j.id)
          << " BIN DEFAULT 0\n";
  for (const auto& j : inst.jobs) {
    out << "VAR " << Names::tau(j.id) << " BIN DEFAULT 0\n";
    out << "VAR " << Names::du(j.id) << " INT 1 " << j.deadline
        << " DEFAULT 1\n";
    out << "VAR " << Names::dp(j.id) << " INT 1 " << j.deadline
        << " DEFAULT 1\n";
    out << "VAR " << Names::dd(j.id) << " INT 1 " << j.deadline
        << " DEFAULT 2\n";
    out << "VAR " << Names::dt(j.id) << " INT 1 " << j.deadline
        << " DEFAULT 1\n";
    for (Slot n = j.arrival; n < window_end(j); ++n)
      out << "VAR " << Names::sigma(j.id, n) << " CONT 0 inf DEFAULT 0\n";
    for (Slot n = j.arrival + 1; n < window_end(j); ++n)
      out << "VAR " << Names::kappa(j.id, n) << " CONT 0 inf DEFAULT 0\n";
    for (Slot n = j.arrival + 2; n < window_end(j); ++n)
      out << "VAR " << Names::sigmap(j.id, n) << " CONT 0 inf DEFAULT 0\n";
  }

  auto assignment_terms = [&](JobId id, double coef) {
    std::vector<Term> ts;
    for (std::size_t i = 0; i < inst.capacities.size(); ++i)
      ts.push_back({coef, Names::x(static_cast<int>(i), id)});
    return ts;
  };

  for (const auto& j : inst.jobs) {
    const JobId id = j.id;
    std::vector<Term> sig, kap, sp;
    for (Slot n = j.arrival; n < window_end(j); ++n)
      sig.push_back({1.0, Names::sigma(id, n)});
    for (Slot n = j.arrival + 1; n < window_end(j); ++n)
      kap.push_back({1.0, Names::kappa(id, n)});
    for (Slot n = j.arrival + 2; n < window_end(j); ++n)
      sp.push_back({1.0, Names::sigmap(id, n)});

    // stream totals vs assignment, and completion forcing
    auto emit_pair = [&](const std::string& family,
                         const std::vector<Term>& stream, double total) {
      std::vector<Term> row = stream;
      for (auto& t : assignment_terms(id, -total)) row.push_back(t);
      out << "LIN " << family << "_" << id << " : " << lin_expr(row)
          << " <= 0\n";
      std::string next = family == "c2" ? "c3" : family == "c4" ? "c5" : "c7";
      out << "PROD " << next << "_" << id << " : " << Names::tau(id) << " * ( "
          << lin_expr(row) << " ) == 0\n";
      // big-M complement: stream total must reach the full amount when tau=1
      std::vector<Term> lin = row;
      lin.push_back({-total, Names::tau(id)});
      out << "LIN " << next << "lin_" << id << " : " << lin_expr(lin)
          << " >= " << num(-total) << "\n";
    };
    emit_pair("c2", sig, j.input_mb);
    emit_pair("c4", kap, j.compute_mflops);
    emit_pair("c6", sp, j.output_mb);

    // partial results only when preempted (strict, eps slack)
    {
      std::vector<Term> row = sp;
      row.push_back({-j.output_mb, Names::tau(id)});
      out << "LIN c8_" << id << " : " << lin_expr(row)
          << " <= " << num(j.output_mb - eps) << "\n";
    }

    // pipeline proportionality prefixes
    for (Slot n = j.arrival + 1; n < window_end(j); ++n) {
      std::vector<Term> row;
      for (Slot l = j.arrival + 1; l <= n; ++l)
        row.push_back({1.0, Names::kappa(id, l)});
      const double ratio = j.compute_mflops / j.input_mb;
      for (Slot l = j.arrival; l <= n; ++l)
        row.push_back({-ratio, Names::sigma(id, l)});
      out << "LIN c9_" << id << "_n" << n << " : " << lin_expr(row)
          << " <= 0\n";
    }
    for (Slot n = j.arrival + 2; n < window_end(j); ++n) {
      std::vector<Term> row;
      for (Slot l = j.arrival + 2; l <= n; ++l)
        row.push_back({1.0, Names::sigmap(id, l)});
      const double ratio = j.output_mb / j.compute_mflops;
      for (Slot l = j.arrival + 1; l <= n; ++l)
        row.push_back({-ratio, Names::kappa(id, l)});
      out << "LIN c10_" << id << "_n" << n << " : " << lin_expr(row)
          << " <= 0\n";
    }

    // phase ordering and minimums
    out << "LIN c11a_" << id << " : 1 " << Names::du(id) << " - 1 "
        << Names::dp(id) << " <= 0\n";
    out << "LIN c11b_" << id << " : 1 " << Names::dp(id) << " - 1 "
        << Names::dd(id) << " <= 0\n";
    out << "LIN c11c_" << id << " : 1 " << Names::dd(id)
        << " <= " << j.deadline << "\n";
    out << "LIN c12_" << id << " : 1 " << Names::du(id) << " >= 1\n";
    out << "LIN c13_" << id << " : 1 " << Names::dp(id) << " >= 1\n";
    out << "LIN c14_" << id << " : 1 " << Names::dd(id) << " >= 1\n";

    // at most one server
    out << "LIN c19_" << id << " : " << lin_expr(assignment_terms(id, 1.0))
        << " <= 1\n";

    // activity windows
    auto emit_support = [&](const char* family, const std::string& end_var,
                            const std::vector<Term>& stream, Slot first) {
      out << "SUPPORT " << family << "_" << id << " : BASE " << j.arrival
          << " ENDMIN " << end_var << " " << Names::dt(id) << " VARS";
      Slot n = first;
      for (const auto& t : stream) out << " " << t.var << "@" << n++;
      out << "\n";
    };
    if (!sig.empty()) emit_support("c22", Names::du(id), sig, j.arrival);
    if (!kap.empty()) emit_support("c24", Names::dp(id), kap, j.arrival + 1);
    if (!sp.empty()) emit_support("c26", Names::dd(id), sp, j.arrival + 2);

    // preemption-slot domain and consistency
    out << "LIN c28_" << id << " : 1 " << Names::dt(id) << " - 1 "
        << Names::dd(id) << " <= 0\n";
    out << "PROD c29_" << id << " : " << Names::tau(id) << " * ( 1 "
        << Names::dt(id) << " - 1 " << Names::dd(id) << " ) == 0\n";
    out << "LIN c29lin_" << id << " : 1 " << Names::dt(id) << " - 1 "
        << Names::dd(id) << " - " << num(j.deadline) << " "
        << Names::tau(id) << " >= " << num(-static_cast<double>(j.deadline))
        << "\n";
    out << "DIVLT c30_" << id << " : " << Names::dt(id) << " "
        << Names::dd(id) << " " << Names::tau(id) << "\n";
    out << "LIN c30lin_" << id << " : 1 " << Names::dt(id) << " - 1 "
        << Names::dd(id) << " - " << num(j.deadline + 1.0) << " "
        << Names::tau(id) << " <= " << num(-eps) << "\n";

    // storage window for c15
    out << "THETA " << id << " : BASE " << j.arrival << " ENDMIN "
        << Names::dd(id) << " " << Names::dt(id) << " SIGMA";
    {
      Slot n = j.arrival;
      for (const auto& t : sig) out << " " << t.var << "@" << n++;
    }
    out << "\n";
  }

  // per-slot server capacities
  for (std::size_t i = 0; i < inst.capacities.size(); ++i) {
    const auto& cap = inst.capacities[i];
    for (Slot n = 0; n < N; ++n) {
      bool any_sigma = false, any_kappa = false, any_sigmap = false;
      std::ostringstream stor, comp, up, down;
      for (const auto& j : inst.jobs) {
        const Slot end = window_end(j);
        if (n >= j.arrival && n < end) {
          stor << " TERM " << Names::x(static_cast<int>(i), j.id) << " "
               << j.id;
          up << " TERM " << Names::x(static_cast<int>(i), j.id) << " "
             << Names::sigma(j.id, n);
          any_sigma = true;
        }
        if (n >= j.arrival + 1 && n < end) {
          comp << " TERM " << Names::x(static_cast<int>(i), j.id) << " "
               << Names::kappa(j.id, n);
          any_kappa = true;
        }
        if (n >= j.arrival + 2 && n < end) {
          down << " TERM " << Names::x(static_cast<int>(i), j.id) << " "
               << Names::sigmap(j.id, n);
          any_sigmap = true;
        }
      }
      if (any_sigma) {
        out << "STORAGE c15_" << i << "_n" << n << " : SERVER " << i
            << " SLOT " << n << " CAP " << num(cap.storage) << stor.str()
            << "\n";
        out << "CAPSUM c17_" << i << "_n" << n << " : SERVER " << i
            << " SLOT " << n << " CAP " << num(cap.uplink) << up.str() << "\n";
      }
      if (any_kappa)
        out << "CAPSUM c16_" << i << "_n" << n << " : SERVER " << i
            << " SLOT " << n << " CAP " << num(cap.compute) << comp.str()
            << "\n";
      if (any_sigmap)
        out << "CAPSUM c18_" << i << "_n" << n << " : SERVER " << i
            << " SLOT " << n << " CAP " << num(cap.downlink) << down.str()
            << "\n";
    }
  }

  // objective
  out << "OBJ MAX :";
  for (std::size_t i = 0; i < inst.capacities.size(); ++i)
    for (const auto& j : inst.jobs)
      out << " TERM " << num(j.utility) << " " << Names::tau(j.id) << " "
          << Names::x(static_cast<int>(i), j.id);
  out << "\n";

  return out.str();
}

}  // namespace edgesim
