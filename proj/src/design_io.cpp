#include "ppd/design_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ppd/error.hpp"

namespace ppd {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

int parse_int(const std::string& cell, int line_no) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(cell, &used);
  } catch (...) {
    used = 0;
  }
  if (used == 0 || used != cell.size())
    throw Error(ErrorKind::kInvalidInput,
                "line " + std::to_string(line_no) + ": '" + cell + "' is not an integer");
  return v;
}

}  // namespace

void write_design_csv(std::ostream& out, const Design& design) {
  out << "choice_set,profile";
  for (int k = 0; k < design.num_attributes(); ++k) out << ",attr_" << k + 1;
  out << '\n';
  for (int s = 0; s < design.num_sets(); ++s)
    for (int j = 0; j < design.profiles_per_set(); ++j) {
      out << s + 1 << ',' << j + 1;
      for (int k = 0; k < design.num_attributes(); ++k) out << ',' << design.at(s, j, k);
      out << '\n';
    }
}

Design read_design_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kInvalidInput, "empty design file");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "choice_set" || header[1] != "profile")
    throw Error(ErrorKind::kInvalidInput,
                "line 1: expected header choice_set,profile,attr_1,...");
  const int k_count = static_cast<int>(header.size()) - 2;
  std::vector<std::vector<std::vector<int>>> sets;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != k_count + 2)
      throw Error(ErrorKind::kInvalidInput,
                  "line " + std::to_string(line_no) + ": expected " +
                      std::to_string(k_count + 2) + " fields");
    const int s = parse_int(cells[0], line_no);
    const int j = parse_int(cells[1], line_no);
    if (s == static_cast<int>(sets.size()) + 1) sets.emplace_back();
    if (s != static_cast<int>(sets.size()) ||
        j != static_cast<int>(sets.back().size()) + 1)
      throw Error(ErrorKind::kInvalidInput,
                  "line " + std::to_string(line_no) +
                      ": rows must be ordered by choice_set then profile, from 1");
    std::vector<int> profile(k_count);
    for (int k = 0; k < k_count; ++k) profile[k] = parse_int(cells[k + 2], line_no);
    sets.back().push_back(std::move(profile));
  }
  if (sets.empty()) throw Error(ErrorKind::kInvalidInput, "design file has no rows");
  const int j_count = static_cast<int>(sets[0].size());
  for (std::size_t s = 0; s < sets.size(); ++s)
    if (static_cast<int>(sets[s].size()) != j_count)
      throw Error(ErrorKind::kInvalidInput,
                  "choice set " + std::to_string(s + 1) + " has a different profile count");
  Design d(static_cast<int>(sets.size()), j_count, k_count);
  for (int s = 0; s < d.num_sets(); ++s)
    for (int j = 0; j < j_count; ++j)
      for (int k = 0; k < k_count; ++k) d.at(s, j, k) = sets[s][j][k];
  return d;
}

nlohmann::json constants_json(const Design& design) {
  nlohmann::json sets = nlohmann::json::array();
  for (int s = 0; s < design.num_sets(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int k : design.constant_attributes(s)) row.push_back(k + 1);
    sets.push_back(row);
  }
  return {{"constant_attributes", sets}};
}

nlohmann::json design_to_json(const Design& design) {
  nlohmann::json levels = nlohmann::json::array();
  for (int s = 0; s < design.num_sets(); ++s) {
    nlohmann::json set = nlohmann::json::array();
    for (int j = 0; j < design.profiles_per_set(); ++j) {
      const auto p = design.profile(s, j);
      set.push_back(std::vector<int>(p.begin(), p.end()));
    }
    levels.push_back(set);
  }
  nlohmann::json doc = {{"num_choice_sets", design.num_sets()},
                        {"profiles_per_set", design.profiles_per_set()},
                        {"num_attributes", design.num_attributes()},
                        {"levels", levels}};
  doc["constant_attributes"] = constants_json(design)["constant_attributes"];
  return doc;
}

Design design_from_json(const nlohmann::json& doc) {
  try {
    const auto& levels = doc.at("levels");
    const int s_count = static_cast<int>(levels.size());
    if (s_count == 0) throw Error(ErrorKind::kInvalidInput, "design has no choice sets");
    const int j_count = static_cast<int>(levels[0].size());
    const int k_count = j_count > 0 ? static_cast<int>(levels[0][0].size()) : 0;
    if (j_count == 0 || k_count == 0)
      throw Error(ErrorKind::kInvalidInput, "design has an empty choice set");
    Design d(s_count, j_count, k_count);
    for (int s = 0; s < s_count; ++s) {
      if (static_cast<int>(levels[s].size()) != j_count)
        throw Error(ErrorKind::kInvalidInput, "ragged choice sets in design JSON");
      for (int j = 0; j < j_count; ++j) {
        if (static_cast<int>(levels[s][j].size()) != k_count)
          throw Error(ErrorKind::kInvalidInput, "ragged profiles in design JSON");
        for (int k = 0; k < k_count; ++k) d.at(s, j, k) = levels[s][j][k].get<int>();
      }
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("design JSON: ") + e.what());
  }
}

void write_master_csv(std::ostream& out, const MasterDesign& master) {
  for (int k = 0; k < master.num_attributes(); ++k) out << (k ? "," : "") << 'x' << k + 1;
  out << '\n';
  for (int s = 0; s < master.num_sets(); ++s) {
    for (int k = 0; k < master.num_attributes(); ++k)
      out << (k ? "," : "") << (master.varies(s, k) ? 1 : 0);
    out << '\n';
  }
}

Design load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path.string());
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kInvalidInput, path.string() + ": " + e.what());
    }
    return design_from_json(doc);
  }
  try {
    return read_design_csv(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + path.string());
  out << text;
}

void save_design(const std::filesystem::path& dir, const std::string& stem,
                 const Design& design) {
  std::ostringstream csv;
  write_design_csv(csv, design);
  write_text_file(dir / (stem + ".csv"), csv.str());
  write_text_file(dir / (stem + "_constants.json"), constants_json(design).dump(2) + "\n");
  write_text_file(dir / (stem + ".json"), design_to_json(design).dump(2) + "\n");
}

nlohmann::json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json to_json(const EfficiencyReport& r) {
  return {{"design_id", r.design_id},
          {"reference_id", r.reference_id},
          {"model_tag", to_string(r.model_tag)},
          {"m", r.m},
          {"db_x", number_json(r.db_x)},
          {"db_ref", number_json(r.db_ref)},
          {"efficiency", number_json(r.efficiency)},
          {"num_draws", r.num_draws},
          {"seed", r.seed},
          {"degenerate", r.degenerate}};
}

}  // namespace ppd
