#pragma once

#include <string>

#include <json.hpp>

#include "exactcache/classify.hpp"

namespace exactcache {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "exactcache.report/1";

struct ReportInput {
  std::string command;
  std::string input_name;
  const Cfg* cfg = nullptr;
  CacheConfig config;
  ClassifyOptions options;
  bool timings = false;
};

/// Report document with keys in a fixed order; every access of the input
/// appears exactly once under "accesses".
nlohmann::ordered_json build_report(const ReportInput& in, const ClassifyResult& result,
                                    const DifferentialReport* oracle = nullptr);

}  // namespace exactcache
