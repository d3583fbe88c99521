#include "fedalign/raw_encoder.hpp"

#include <algorithm>
#include <cmath>

#include "fedalign/error.hpp"

namespace fedalign {
namespace {

std::vector<const RecordField*> by_label(const Record& r) {
  std::vector<const RecordField*> out;
  for (const auto& f : r.fields) out.push_back(&f);
  std::sort(out.begin(), out.end(),
            [](const RecordField* a, const RecordField* b) { return a->name < b->name; });
  return out;
}

}  // namespace

double RawFeatureEncoder::raw_value(const Column& col, const Cell& cell) const {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* s = std::get_if<std::string>(&cell)) {
    const auto it = col.codes.find(*s);
    return it == col.codes.end() ? col.mean : it->second;
  }
  throw Error(Errc::unserializable_value, "missing value; impute before encoding");
}

RawFeatureEncoder RawFeatureEncoder::fit(std::span<const Record> records, std::size_t dim) {
  if (records.empty()) throw Error(Errc::empty_train_set, "raw encoder needs at least one record");
  RawFeatureEncoder enc;
  enc.dim_ = dim;
  const auto first = by_label(records.front());
  if (first.size() > dim) {
    throw Error(Errc::dimension_mismatch, std::to_string(first.size()) +
                                              " features do not fit in dim " + std::to_string(dim));
  }
  for (const auto* f : first) enc.labels_.push_back(f->name);
  enc.columns_.resize(first.size());

  for (std::size_t p = 0; p < first.size(); ++p) {
    auto& col = enc.columns_[p];
    if (std::holds_alternative<std::string>(first[p]->value)) {
      for (const auto& r : records) {
        const auto fields = by_label(r);
        if (const auto* s = std::get_if<std::string>(&fields[p]->value)) col.codes.emplace(*s, 0.0);
      }
      double code = 0.0;
      for (auto& [_, v] : col.codes) v = code++;
    }
  }
  std::vector<double> sum(first.size(), 0.0);
  std::vector<double> sum2(first.size(), 0.0);
  for (const auto& r : records) {
    const auto fields = by_label(r);
    if (fields.size() != first.size()) {
      throw Error(Errc::shape_mismatch, "records of one client must share a schema");
    }
    for (std::size_t p = 0; p < fields.size(); ++p) {
      const double x = enc.raw_value(enc.columns_[p], fields[p]->value);
      sum[p] += x;
      sum2[p] += x * x;
    }
  }
  const auto n = static_cast<double>(records.size());
  for (std::size_t p = 0; p < first.size(); ++p) {
    auto& col = enc.columns_[p];
    col.mean = sum[p] / n;
    const double var = std::max(0.0, sum2[p] / n - col.mean * col.mean);
    col.scale = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return enc;
}

std::vector<double> RawFeatureEncoder::encode(const Record& record) const {
  const auto fields = by_label(record);
  if (fields.size() != labels_.size()) {
    throw Error(Errc::shape_mismatch, "record '" + record.record_id + "' has " +
                                          std::to_string(fields.size()) + " features, expected " +
                                          std::to_string(labels_.size()));
  }
  std::vector<double> v(dim_, 0.0);
  for (std::size_t p = 0; p < fields.size(); ++p) {
    if (fields[p]->name != labels_[p]) {
      throw Error(Errc::shape_mismatch, "unexpected feature '" + fields[p]->name + "'");
    }
    const auto& col = columns_[p];
    v[p] = (raw_value(col, fields[p]->value) - col.mean) / col.scale;
  }
  return v;
}

}  // namespace fedalign
