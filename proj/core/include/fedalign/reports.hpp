#pragma once

#include <string>
#include <vector>

#include "fedalign/fed_protocol.hpp"
#include "fedalign/metrics.hpp"
#include "fedalign/pipeline.hpp"

namespace fedalign {

/// One method at one client count, summarized over seeds.
struct MethodResult {
  std::string method;
  int n_clients = 0;
  RunSummary summary;
};

/// method,n_clients,seeds,mean_f1,std_f1,min_f1,max_f1,per_seed_f1
std::string summary_csv(const std::vector<MethodResult>& rows);
/// Method rows by client-count columns, "mean +- std".
std::string summary_text(const std::vector<MethodResult>& rows);

/// method,mean,std,min,max over per-client F1, pooled over seeds.
std::string stability_csv(const std::vector<MethodResult>& rows);

/// shape,params,payload_bytes,overhead_bytes,bytes_per_client_per_round,rounds,bytes_up_total,bytes_down_total
std::string comm_csv(const FedRun& run);

/// overlap,variant,seeds,mean_f1,std_f1,min_f1,max_f1
std::string stress_csv(const StressReport& report);
/// Overlap rows by variant columns.
std::string stress_text(const StressReport& report);
/// Paired t-tests of `a` against `b` at every overlap, over seeds:
/// overlap,a,b,mean_diff,t,p,df. Rows whose differences are all equal
/// report t and p as "nan".
std::string stress_ttests_csv(const StressReport& report, StressVariant a, StressVariant b);

}  // namespace fedalign
