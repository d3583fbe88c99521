#include "fedalign/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "fedalign/error.hpp"
#include "fedalign/serialization.hpp"
#include "fedalign/stats.hpp"

namespace fedalign {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_number(xs[i]);
  }
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string summary_csv(const std::vector<MethodResult>& rows) {
  std::ostringstream os;
  os << "method,n_clients,seeds,mean_f1,std_f1,min_f1,max_f1,per_seed_f1\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    os << r.method << ',' << r.n_clients << ',' << join_seeds(s.seeds) << ','
       << format_number(s.mean) << ',' << format_number(s.std) << ',' << format_number(s.min)
       << ',' << format_number(s.max) << ',' << join_numbers(s.f1s) << '\n';
  }
  return os.str();
}

std::string summary_text(const std::vector<MethodResult>& rows) {
  std::set<int> counts;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, int>, const RunSummary*> cell;
  for (const auto& r : rows) {
    counts.insert(r.n_clients);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    cell[{r.method, r.n_clients}] = &r.summary;
  }
  std::size_t w = 6;
  for (const auto& m : methods) w = std::max(w, m.size());
  std::ostringstream os;
  os << "Global F1 (mean +- std over seeds)\n" << pad("method", w + 2);
  for (int c : counts) os << pad(std::to_string(c) + " clients", 20);
  os << '\n';
  for (const auto& m : methods) {
    os << pad(m, w + 2);
    for (int c : counts) {
      const auto it = cell.find({m, c});
      os << pad(it == cell.end() ? "-" : fixed4(it->second->mean) + " +- " + fixed4(it->second->std), 20);
    }
    os << '\n';
  }
  return os.str();
}

std::string stability_csv(const std::vector<MethodResult>& rows) {
  std::ostringstream os;
  os << "method,n_clients,mean,std,min,max\n";
  for (const auto& r : rows) {
    const auto q = stability(r.summary);
    os << r.method << ',' << r.n_clients << ',' << format_number(q.mean) << ','
       << format_number(q.std) << ',' << format_number(q.min) << ',' << format_number(q.max)
       << '\n';
  }
  return os.str();
}

std::string comm_csv(const FedRun& run) {
  const CommCost c = comm_cost(run.shape, run.config);
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  for (const auto& r : run.rounds) {
    up += r.bytes_up;
    down += r.bytes_down;
  }
  std::ostringstream os;
  os << "shape,params,payload_bytes,overhead_bytes,bytes_per_client_per_round,rounds,"
        "bytes_up_total,bytes_down_total\n";
  os << to_string(run.shape.kind) << '(' << run.shape.input_dim << ")," << c.params << ','
     << c.payload_bytes << ',' << run.config.per_round_overhead_bytes << ','
     << c.bytes_per_client_per_round << ',' << run.rounds.size() << ',' << up << ',' << down
     << '\n';
  return os.str();
}

std::string stress_csv(const StressReport& report) {
  std::ostringstream os;
  os << "overlap,variant,seeds,mean_f1,std_f1,min_f1,max_f1\n";
  for (const auto& c : report.cells) {
    const auto& s = c.summary;
    os << format_number(c.overlap) << ',' << to_string(c.variant) << ',' << join_seeds(s.seeds)
       << ',' << format_number(s.mean) << ',' << format_number(s.std) << ','
       << format_number(s.min) << ',' << format_number(s.max) << '\n';
  }
  return os.str();
}

std::string stress_text(const StressReport& report) {
  std::ostringstream os;
  os << "Global F1 by schema overlap (mean +- std over seeds)\n" << pad("overlap", 10);
  for (const auto v : report.variants) os << pad(std::string(to_string(v)), 20);
  os << '\n';
  for (double o : report.overlaps) {
    char label[16];
    std::snprintf(label, sizeof label, "%.0f%%", o * 100.0);
    os << pad(label, 10);
    for (const auto v : report.variants) {
      const auto& s = report.at(o, v).summary;
      os << pad(fixed4(s.mean) + " +- " + fixed4(s.std), 20);
    }
    os << '\n';
  }
  return os.str();
}

std::string stress_ttests_csv(const StressReport& report, StressVariant a, StressVariant b) {
  std::ostringstream os;
  os << "overlap,a,b,mean_diff,t,p,df\n";
  for (double o : report.overlaps) {
    const auto& sa = report.at(o, a).summary.f1s;
    const auto& sb = report.at(o, b).summary.f1s;
    std::vector<double> d(sa.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = sa[i] - sb[i];
    os << format_number(o) << ',' << to_string(a) << ',' << to_string(b) << ','
       << format_number(mean(d)) << ',';
    try {
      const auto t = paired_t_test(sa, sb);
      os << format_number(t.t) << ',' << format_number(t.p) << ',' << format_number(t.df);
    } catch (const Error&) {
      os << "nan,nan," << (sa.size() >= 2 ? format_number(static_cast<double>(sa.size() - 1)) : "nan");
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fedalign
