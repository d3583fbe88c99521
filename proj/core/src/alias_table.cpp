#include "fedalign/alias_table.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fedalign/error.hpp"

namespace fedalign {

bool is_valid_label(std::string_view label) noexcept {
  if (label.empty()) return false;
  for (const char ch : label) {
    const auto c = static_cast<unsigned char>(ch);
    const bool ok = (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') ||
                    (c >= 'a' && c <= 'z') || c == '_' || c == '-' || c >= 0x80;
    if (!ok) return false;
  }
  return true;
}

void AliasTable::add(const std::string& canonical, const std::vector<std::string>& aliases) {
  if (!is_valid_label(canonical)) {
    throw Error(Errc::invalid_argument, "invalid canonical label '" + canonical + "'");
  }
  auto claim = [&](const std::string& label) {
    const auto [it, inserted] = reverse_.emplace(label, canonical);
    if (!inserted && it->second != canonical) {
      throw Error(Errc::invalid_argument, "alias '" + label + "' already maps to '" +
                                              it->second + "'");
    }
  };
  claim(canonical);
  auto& list = entries_[canonical];
  for (const auto& alias : aliases) {
    if (!is_valid_label(alias)) {
      throw Error(Errc::invalid_argument, "invalid alias label '" + alias + "'");
    }
    if (alias == canonical) continue;
    claim(alias);
    if (std::find(list.begin(), list.end(), alias) == list.end()) list.push_back(alias);
  }
}

const std::vector<std::string>& AliasTable::aliases(const std::string& canonical) const {
  static const std::vector<std::string> kEmpty;
  const auto it = entries_.find(canonical);
  return it == entries_.end() ? kEmpty : it->second;
}

std::optional<std::string> AliasTable::canonical_of(const std::string& label) const {
  const auto it = reverse_.find(label);
  if (it == reverse_.end()) return std::nullopt;
  return it->second;
}

AliasTable AliasTable::framingham_defaults() {
  AliasTable t;
  t.add("age", {"Age", "PatientAge", "AgeYears", "age_at_visit", "patient_age_years"});
  t.add("sysBP", {"SysBP", "systolic_bp", "bp_systolic", "sys_blood_pressure", "systolic_pressure"});
  t.add("totChol", {"TotChol", "total_cholesterol", "cholesterol_total", "chol_total", "total_chol_mg"});
  t.add("sex", {"Sex", "gender", "patient_sex", "sex_code", "biological_sex"});
  t.add("male", {"Male", "is_male", "male_flag", "sex_male", "gender_male"});
  t.add("is_smoking", {"IsSmoking", "smoker", "current_smoker", "smoking_status", "smokes"});
  t.add("currentSmoker", {"CurrentSmoker", "smoker_now", "active_smoker", "smoking_flag", "smokes_currently"});
  t.add("cigsPerDay", {"CigsPerDay", "cigarettes_per_day", "daily_cigarettes", "cigs_daily", "smoking_intensity"});
  t.add("BPMeds", {"BpMeds", "bp_medication", "on_bp_meds", "antihypertensive_use", "bp_meds_flag"});
  t.add("prevalentStroke", {"PrevalentStroke", "prior_stroke", "stroke_history", "had_stroke", "stroke_prev"});
  t.add("prevalentHyp", {"PrevalentHyp", "hypertensive", "hypertension_history", "has_hypertension", "hyp_prev"});
  t.add("diabetes", {"Diabetes", "diabetic", "has_diabetes", "diabetes_flag", "dm_status"});
  t.add("diaBP", {"DiaBP", "diastolic_bp", "bp_diastolic", "dia_blood_pressure", "diastolic_pressure"});
  t.add("heartRate", {"HeartRate", "heart_rate_bpm", "pulse", "resting_hr", "pulse_rate"});
  t.add("glucose", {"Glucose", "blood_glucose", "glucose_level", "glucose_mg_dl", "fasting_glucose"});
  t.add("BMI", {"Bmi", "body_mass_index", "bmi_value", "mass_index", "body_mass"});
  t.add("education", {"Education", "education_level", "edu_level", "schooling", "edu_years_band"});
  return t;
}

AliasTable load_alias_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_file, "cannot open alias table '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, "alias table '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object() || doc.value("version", 0) != 1 || !doc.contains("aliases") ||
      !doc["aliases"].is_object()) {
    throw Error(Errc::config_error,
                "alias table '" + path.string() + "': expected {\"version\": 1, \"aliases\": {...}}");
  }
  AliasTable table;
  for (const auto& [canonical, list] : doc["aliases"].items()) {
    if (!list.is_array()) {
      throw Error(Errc::config_error, "aliases." + canonical + ": expected a list of strings");
    }
    std::vector<std::string> names;
    for (const auto& v : list) {
      if (!v.is_string()) {
        throw Error(Errc::config_error, "aliases." + canonical + ": expected a list of strings");
      }
      names.push_back(v.get<std::string>());
    }
    table.add(canonical, names);
  }
  return table;
}

void save_alias_table(const std::filesystem::path& path, const AliasTable& table) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["aliases"] = nlohmann::json::object();
  for (const auto& [canonical, list] : table.entries()) doc["aliases"][canonical] = list;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace fedalign
