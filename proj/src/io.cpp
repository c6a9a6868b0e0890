// Apache License, Version 2.0, refer to LICENSE.txt

#include "bayesmc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bayesmc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw OutputError("cannot open output file: " + path);
  return out;
}

void expect_header(const std::string& got, const std::string& want, const std::string& path) {
  if (strip(got) != want) {
    throw InputError("malformed header in " + path + ": expected '" + want + "', got '" +
                             strip(got) + "'");
  }
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = strip(s);
  if (t.empty()) return false;
  size_t pos = 0;
  try {
    out = std::stod(t, &pos);
  } catch (...) {
    return false;
  }
  return pos == t.size();
}

bool parse_count(const std::string& s, double& out) {
  if (!parse_double(s, out)) return false;
  return out >= 0.0 && out == std::floor(out);
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<ConsultationCounts> read_consultation_counts(const std::string& path,
                                                         CsvReadStats* stats) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty counts file: " + path);
  expect_header(line, "group,candidate,count", path);

  std::vector<ConsultationCounts> groups;
  CsvReadStats local;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3 || strip(fields[0]).empty() || strip(fields[1]).empty() ||
        strip(fields[2]).empty()) {
      ++local.rows_dropped;
      continue;
    }
    double count = 0.0;
    if (!parse_count(fields[2], count)) {
      throw InputError(path + ":" + std::to_string(line_no) +
                               ": count must be a nonnegative integer");
    }
    const std::string group = strip(fields[0]);
    if (groups.empty() || groups.back().group != group) {
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const auto& g) { return g.group == group; });
      if (it != groups.end()) {
        it->candidates.emplace_back(strip(fields[1]), count);
        ++local.rows_kept;
        continue;
      }
      groups.push_back(ConsultationCounts{group, {}});
    }
    groups.back().candidates.emplace_back(strip(fields[1]), count);
    ++local.rows_kept;
  }
  if (groups.empty()) throw InputError("no count rows in " + path);
  for (const auto& g : groups) {
    if (g.candidates.size() < 2) {
      throw InputError("group '" + g.group + "' has fewer than 2 categories");
    }
  }
  if (stats) *stats = local;
  return groups;
}

SparrowData read_sparrow_observations(const std::string& path, CsvReadStats* stats) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty observations file: " + path);
  expect_header(line, "offspring,age", path);

  std::vector<double> offspring;
  std::vector<double> ages;
  CsvReadStats local;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2 || strip(fields[0]).empty() || strip(fields[1]).empty()) {
      ++local.rows_dropped;
      continue;
    }
    double count = 0.0;
    double age = 0.0;
    if (!parse_count(fields[0], count)) {
      throw InputError(path + ":" + std::to_string(line_no) +
                               ": offspring must be a nonnegative integer");
    }
    if (!parse_double(fields[1], age) || age <= 0.0 || age != std::floor(age)) {
      throw InputError(path + ":" + std::to_string(line_no) +
                               ": age must be a positive integer");
    }
    offspring.push_back(count);
    ages.push_back(age);
    ++local.rows_kept;
  }
  if (offspring.empty()) throw InputError("no observation rows in " + path);
  SparrowData data;
  data.offspring = Eigen::Map<Eigen::VectorXd>(offspring.data(), offspring.size());
  data.ages = Eigen::Map<Eigen::VectorXd>(ages.data(), ages.size());
  if (stats) *stats = local;
  return data;
}

std::vector<Saber11Row> read_saber11_observations(const std::string& path, CsvReadStats* stats) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty observations file: " + path);
  expect_header(line, "score,sex,work,department", path);

  std::vector<Saber11Row> rows;
  CsvReadStats local;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4 || strip(fields[0]).empty() || strip(fields[1]).empty() ||
        strip(fields[2]).empty() || strip(fields[3]).empty()) {
      ++local.rows_dropped;
      continue;
    }
    Saber11Row row;
    double sex = 0.0;
    double work = 0.0;
    if (!parse_double(fields[0], row.score) || !parse_double(fields[1], sex) ||
        !parse_double(fields[2], work) || (sex != 0.0 && sex != 1.0) ||
        (work != 0.0 && work != 1.0)) {
      throw InputError(path + ":" + std::to_string(line_no) +
                               ": expected score,sex{0|1},work{0|1},department");
    }
    row.sex = static_cast<int>(sex);
    row.work = static_cast<int>(work);
    row.department = strip(fields[3]);
    rows.push_back(std::move(row));
    ++local.rows_kept;
  }
  if (rows.empty()) throw InputError("no observation rows in " + path);
  if (stats) *stats = local;
  return rows;
}

void write_sparrow_csv(const SparrowData& data, const std::string& path) {
  auto out = open_output(path);
  out << "offspring,age\n";
  for (Eigen::Index i = 0; i < data.offspring.size(); ++i) {
    out << static_cast<long>(data.offspring[i]) << "," << static_cast<long>(data.ages[i]) << "\n";
  }
}

void write_saber11_csv(const std::vector<Saber11Row>& rows, const std::string& path) {
  auto out = open_output(path);
  out << "score,sex,work,department\n";
  for (const auto& row : rows) {
    out << format_double(row.score) << "," << row.sex << "," << row.work << ","
        << row.department << "\n";
  }
}

void write_chains_csv(const std::vector<Chain>& chains, const std::string& path) {
  if (chains.empty()) throw std::invalid_argument("write_chains_csv: no chains");
  auto out = open_output(path);
  out << "chain,iteration";
  for (const auto& name : chains.front().parameter_names) out << "," << name;
  out << "\n";
  for (size_t c = 0; c < chains.size(); ++c) {
    const Chain& chain = chains[c];
    for (Eigen::Index r = 0; r < chain.draws.rows(); ++r) {
      out << (c + 1) << "," << chain.schedule.iteration_of(r);
      for (Eigen::Index j = 0; j < chain.draws.cols(); ++j) {
        out << "," << format_double(chain.draws(r, j));
      }
      out << "\n";
    }
  }
}

ChainsTable read_chains_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty chains file: " + path);
  auto header = split_csv_line(strip(line));
  if (header.size() < 3 || header[0] != "chain" || header[1] != "iteration")
    throw InputError("malformed chains header in " + path);

  ChainsTable table;
  table.parameter_names.assign(header.begin() + 2, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw InputError("ragged row in chains file " + path);
    table.chain_index.push_back(std::stoi(fields[0]));
    table.iteration.push_back(std::stol(fields[1]));
    std::vector<double> row(fields.size() - 2);
    for (size_t j = 2; j < fields.size(); ++j) row[j - 2] = std::stod(fields[j]);
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.parameter_names.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t j = 0; j < rows[r].size(); ++j) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rows[r][j];
    }
  }
  return table;
}

}  // namespace bayesmc
