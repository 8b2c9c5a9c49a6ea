#ifndef PPD_DESIGN_IO_HPP
#define PPD_DESIGN_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ppd/criterion.hpp"
#include "ppd/master_design.hpp"
#include "ppd/model.hpp"

namespace ppd {

// choice_set,profile,attr_1..attr_K with 1-based indices and levels.
void write_design_csv(std::ostream& out, const Design& design);
Design read_design_csv(std::istream& in);

// {"constant_attributes": [[...], ...]}, 1-based attributes per set.
nlohmann::json constants_json(const Design& design);

// Levels plus the constant pattern in one document.
nlohmann::json design_to_json(const Design& design);
Design design_from_json(const nlohmann::json& doc);

// Header x1..xK, then one 0/1 row per set (1 = varies).
void write_master_csv(std::ostream& out, const MasterDesign& master);

// By extension: .csv or .json.
Design load_design(const std::filesystem::path& path);

// design.csv, design_constants.json and design.json under `dir`, with `stem`
// as the file name prefix.
void save_design(const std::filesystem::path& dir, const std::string& stem,
                 const Design& design);

struct EfficiencyReport {
  std::string design_id;
  std::string reference_id;
  ModelTag model_tag = ModelTag::kMain;
  int m = 0;
  double db_x = 0.0;
  double db_ref = 0.0;
  double efficiency = 1.0;
  int num_draws = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;
};

nlohmann::json to_json(const EfficiencyReport& report);

// Non-finite values become strings ("-inf", "inf", "nan").
nlohmann::json number_json(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ppd

#endif  // PPD_DESIGN_IO_HPP
