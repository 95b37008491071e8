#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankagg/errors.hpp"
#include "rankagg/ranking.hpp"

namespace rankagg {

namespace detail {

inline std::vector<int> parse_positions_line(const std::string& line, std::size_t line_no) {
  std::vector<int> positions;
  std::stringstream ss(line);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t consumed = 0;
      const int value = std::stoi(token, &consumed);
      while (consumed < token.size() && std::isspace(static_cast<unsigned char>(token[consumed])))
        ++consumed;
      if (consumed != token.size()) throw std::invalid_argument("trailing characters");
      positions.push_back(value);
    } catch (const std::exception&) {
      throw invalid_input_error("line " + std::to_string(line_no) + ": expected integer, got '" +
                                token + "'");
    }
  }
  return positions;
}

inline Ranking ranking_from_positions(std::vector<int> positions, std::size_t line_no) {
  try {
    return Ranking(std::move(positions));
  } catch (const invalid_input_error& e) {
    throw invalid_input_error("line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace detail

// Text form: header "m=<int>,n=<int>", then one ranking per line as the
// comma-separated positions of candidates 1..m.
inline RankingDataset read_dataset_text(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw invalid_input_error("line 1: missing header");
  int m = 0;
  std::size_t n = 0;
  if (std::sscanf(header.c_str(), "m=%d,n=%zu", &m, &n) != 2)
    throw invalid_input_error("line 1: header must be m=<int>,n=<int>");
  if (m < 1) throw invalid_input_error("line 1: m must be >= 1");
  if (n < 1) throw invalid_input_error("line 1: n must be >= 1");
  RankingDataset data(m);
  std::string line;
  std::size_t line_no = 1;
  while (data.n() < n) {
    if (!std::getline(in, line))
      throw invalid_input_error("expected " + std::to_string(n) + " rankings, found " +
                                std::to_string(data.n()));
    ++line_no;
    if (line.empty()) continue;
    std::vector<int> positions = detail::parse_positions_line(line, line_no);
    if (static_cast<int>(positions.size()) != m)
      throw invalid_input_error("line " + std::to_string(line_no) + ": expected " +
                                std::to_string(m) + " positions, got " +
                                std::to_string(positions.size()));
    data.add(detail::ranking_from_positions(std::move(positions), line_no));
  }
  return data;
}

inline RankingDataset read_dataset_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read " + path);
  return read_dataset_text(in);
}

inline void write_dataset_text(std::ostream& out, const RankingDataset& data) {
  out << "m=" << data.m() << ",n=" << data.n() << "\n";
  for (const Ranking& r : data) {
    for (int u = 1; u <= data.m(); ++u) {
      if (u > 1) out << ",";
      out << r.position(u);
    }
    out << "\n";
  }
}

inline void write_dataset_text(const std::string& path, const RankingDataset& data) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  write_dataset_text(out, data);
  if (!out) throw io_error("failed while writing " + path);
}

// JSON form: an array of rankings, each an array of the m positions.
inline RankingDataset read_dataset_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array() || doc.empty())
    throw invalid_input_error("expected a non-empty JSON array of rankings");
  std::vector<Ranking> rankings;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_array())
      throw invalid_input_error("entry " + std::to_string(i + 1) + ": expected an array");
    std::vector<int> positions;
    for (const auto& v : doc[i]) {
      if (!v.is_number_integer())
        throw invalid_input_error("entry " + std::to_string(i + 1) + ": expected integers");
      positions.push_back(v.get<int>());
    }
    if (!rankings.empty() && positions.size() != rankings.front().positions().size())
      throw invalid_input_error("entry " + std::to_string(i + 1) + ": expected " +
                                std::to_string(rankings.front().positions().size()) +
                                " positions, got " + std::to_string(positions.size()));
    try {
      rankings.push_back(Ranking(std::move(positions)));
    } catch (const invalid_input_error& e) {
      throw invalid_input_error("entry " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return RankingDataset::from_rankings(std::move(rankings));
}

inline RankingDataset read_dataset_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read " + path);
  return read_dataset_json(in);
}

inline void write_dataset_json(std::ostream& out, const RankingDataset& data) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Ranking& r : data) doc.push_back(r.positions());
  out << doc.dump() << "\n";
}

inline void write_dataset_json(const std::string& path, const RankingDataset& data) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  write_dataset_json(out, data);
  if (!out) throw io_error("failed while writing " + path);
}

// picks the format from the file extension (.json vs anything else)
inline bool has_json_extension(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

inline RankingDataset read_dataset(const std::string& path) {
  return has_json_extension(path) ? read_dataset_json(path) : read_dataset_text(path);
}

inline void write_dataset(const std::string& path, const RankingDataset& data) {
  if (has_json_extension(path))
    write_dataset_json(path, data);
  else
    write_dataset_text(path, data);
}

}  // namespace rankagg
