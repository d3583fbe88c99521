#include "fedalign/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "fedalign/error.hpp"

namespace fedalign {

std::string corpus_line(const TextSequence& record) {
  nlohmann::json j;
  j["record_id"] = record.record_id;
  j["client_id"] = record.client_id;
  j["format"] = std::string(to_string(record.format));
  j["text"] = record.text;
  j["label"] = record.label;
  return j.dump();
}

TextSequence parse_corpus_line(std::string_view line, std::size_t line_no) {
  const auto where = "corpus line " + std::to_string(line_no);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, where + ": " + e.what());
  }
  TextSequence seq;
  try {
    seq.record_id = j.at("record_id").get<std::string>();
    seq.client_id = j.at("client_id").get<int>();
    const auto format = parse_format(j.at("format").get<std::string>());
    if (!format) throw Error(Errc::parse_error, where + ": unknown format");
    seq.format = *format;
    seq.text = j.at("text").get<std::string>();
    seq.label = j.at("label").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, where + ": " + e.what());
  }
  if (seq.label != 0 && seq.label != 1) throw Error(Errc::parse_error, where + ": label must be 0 or 1");
  if (seq.record_id.empty()) throw Error(Errc::parse_error, where + ": empty record_id");
  return seq;
}

void write_corpus(const std::filesystem::path& path, const std::vector<TextSequence>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write corpus '" + path.string() + "'");
  for (const auto& r : records) out << corpus_line(r) << '\n';
  if (!out) throw Error(Errc::io_error, "failed writing corpus '" + path.string() + "'");
}

std::vector<TextSequence> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, "cannot open corpus '" + path.string() + "'");
  std::vector<TextSequence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(parse_corpus_line(line, line_no));
  }
  return out;
}

}  // namespace fedalign
