#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgsens/marker.hpp"

namespace fgsens {

// Per-population allele frequency tables keyed population -> marker -> allele.
struct FrequencyDB {
  struct Population {
    std::map<std::string, std::map<std::string, double>> markers;
    double size = 0.0;  // database size in individuals
  };
  std::map<std::string, Population> populations;

  bool has_population(const std::string& p) const { return populations.count(p) != 0; }

  const Population& population(const std::string& p) const {
    auto it = populations.find(p);
    if (it == populations.end()) throw std::invalid_argument("unknown population: " + p);
    return it->second;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace detail

// CSV rows `population,marker,allele,frequency` plus sidecar rows
// `population,size,<n>`. Deficient marker tables (sum well below 1) are
// treated as deliberate excerpts: the remainder is assigned to the reserved
// allele "other". Excesses beyond 1e-3 are hard errors; small drifts are
// renormalized.
inline FrequencyDB load_frequency_db(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  FrequencyDB db;
  std::string line;
  bool saw_any = false, first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = detail::split_csv_line(line);
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "population") continue;  // header
    }
    if (f.size() == 3 && f[1] == "size") {
      db.populations[f[0]].size = std::stod(f[2]);
      saw_any = true;
      continue;
    }
    if (f.size() != 4)
      throw std::runtime_error("frequency db line " + std::to_string(lineno) + ": malformed row");
    double freq;
    try {
      freq = std::stod(f[3]);
    } catch (const std::exception&) {
      throw std::runtime_error("frequency db line " + std::to_string(lineno) + ": bad frequency " + f[3]);
    }
    if (freq < 0.0 || freq > 1.0)
      throw std::runtime_error("frequency db line " + std::to_string(lineno) + ": frequency out of range");
    auto& mk = db.populations[f[0]].markers[f[1]];
    if (mk.count(f[2]))
      throw std::runtime_error("frequency db line " + std::to_string(lineno) + ": duplicate allele " + f[2]);
    mk[f[2]] = freq;
    saw_any = true;
  }
  if (!saw_any) throw std::runtime_error("frequency db: no data rows");

  for (auto& [pop, p] : db.populations) {
    for (auto& [marker, table] : p.markers) {
      double sum = 0.0;
      for (const auto& [a, fr] : table) sum += fr;
      if (sum > 1.0 + 1e-3)
        throw std::runtime_error("frequency db: " + pop + "/" + marker + " frequencies sum to " +
                                 std::to_string(sum));
      if (sum < 1.0 - 1e-3) {
        table[kOtherAllele] += 1.0 - sum;
        warn(pop + "/" + marker + ": partial table, remainder " + std::to_string(1.0 - sum) +
             " assigned to \"" + kOtherAllele + "\"");
      } else if (std::abs(sum - 1.0) > 1e-9) {
        if (std::abs(sum - 1.0) > 1e-6)
          warn(pop + "/" + marker + ": frequencies sum to " + std::to_string(sum) + ", renormalized");
        for (auto& [a, fr] : table) fr /= sum;
      }
      if (p.size < 0.0) throw std::runtime_error("frequency db: negative size for " + pop);
    }
  }
  return db;
}

inline FrequencyDB load_frequency_db_file(const std::string& path,
                                          std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open frequency db: " + path);
  return load_frequency_db(in, warnings);
}

inline void save_frequency_db(const FrequencyDB& db, std::ostream& out) {
  out << "population,marker,allele,frequency\n";
  for (const auto& [pop, p] : db.populations) {
    if (p.size > 0.0) out << pop << ",size," << p.size << "\n";
    for (const auto& [marker, table] : p.markers)
      for (const auto& [allele, fr] : table) {
        std::ostringstream v;
        v.precision(17);
        v << fr;
        out << pop << "," << marker << "," << allele << "," << v.str() << "\n";
      }
  }
}

}  // namespace fgsens
