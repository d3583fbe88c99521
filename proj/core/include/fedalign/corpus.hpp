#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fedalign/serialization.hpp"

namespace fedalign {

/// Line-delimited corpus: one JSON object per line with the keys
/// client_id, format, label, record_id, text (written in that order).
/// This is the handoff format read by encoders and the embedding sidecar.
void write_corpus(const std::filesystem::path& path, const std::vector<TextSequence>& records);
std::vector<TextSequence> read_corpus(const std::filesystem::path& path);

std::string corpus_line(const TextSequence& record);
TextSequence parse_corpus_line(std::string_view line, std::size_t line_no = 0);

}  // namespace fedalign
