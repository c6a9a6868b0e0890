// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bayesmc/samplers.hpp"
#include "bayesmc/synthetic.hpp"

namespace bayesmc {

// Distinct exception types so the CLI can map error classes to stable exit
// codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counts for one consultation: ordered (candidate, count) pairs.
struct ConsultationCounts {
  std::string group;
  std::vector<std::pair<std::string, double>> candidates;
};

struct CsvReadStats {
  long rows_kept = 0;
  long rows_dropped = 0;  // rows missing a field; dropped with a counted warning
};

// `group,candidate,count` with a header row; counts nonnegative integers.
std::vector<ConsultationCounts> read_consultation_counts(const std::string& path,
                                                         CsvReadStats* stats = nullptr);

// `offspring,age` with a header row; offspring nonnegative integers, ages
// positive integers.
SparrowData read_sparrow_observations(const std::string& path, CsvReadStats* stats = nullptr);

// `score,sex,work,department` with a header row; sex and work in {0,1}.
std::vector<Saber11Row> read_saber11_observations(const std::string& path,
                                                  CsvReadStats* stats = nullptr);

void write_sparrow_csv(const SparrowData& data, const std::string& path);
void write_saber11_csv(const std::vector<Saber11Row>& rows, const std::string& path);

// One row per retained draw with leading `chain,iteration` columns; values
// use shortest round-trip formatting so rewrites are byte-identical.
void write_chains_csv(const std::vector<Chain>& chains, const std::string& path);

// Reads back a chains table written by write_chains_csv.
struct ChainsTable {
  std::vector<std::string> parameter_names;
  std::vector<int> chain_index;
  std::vector<long> iteration;
  Eigen::MatrixXd values;
};
ChainsTable read_chains_csv(const std::string& path);

std::string format_double(double value);

}  // namespace bayesmc
