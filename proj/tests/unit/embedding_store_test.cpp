#include "fedalign/embedding_store.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>

#include "fedalign/error.hpp"
#include "fedalign/rng.hpp"
#include "unit/test_util.hpp"

using namespace fedalign;

namespace {

std::vector<std::byte> bytes_of(const std::string& s) {
  std::vector<std::byte> out(s.size());
  std::memcpy(out.data(), s.data(), s.size());
  return out;
}

EmbeddingStore random_store(std::uint32_t dim, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingStore s(dim, "enc-" + std::to_string(dim));
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = static_cast<float>(rng.normal());
    s.add("r" + std::to_string(i), v);
  }
  return s;
}

bool bitwise_equal(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST(Fedemb, ReadsIndependentlyWrittenFixture) {
  const auto store = read_store(std::string(FEDALIGN_FIXTURES_DIR) + "/small.fedemb");
  EXPECT_EQ(store.dim(), 4u);
  EXPECT_EQ(store.encoder_id(), "distilbert");
  ASSERT_EQ(store.size(), 3u);
  EXPECT_EQ(store.record_ids(), (std::vector<std::string>{"r0000000", "r0000001", "r0000042"}));
  const auto r0 = *store.find("r0000000");
  EXPECT_EQ(std::vector<float>(r0.begin(), r0.end()), (std::vector<float>{0.5f, -0.25f, 1.0f, 0.0f}));
  const auto r1 = *store.find("r0000001");
  EXPECT_EQ(r1[0], 1e-07f);
  EXPECT_TRUE(std::signbit(r1[3]));
  const auto r2 = *store.find("r0000042");
  EXPECT_EQ(r2[1], 0.1f);
  EXPECT_EQ(r2[3], 65504.0f);
}

TEST(Fedemb, WriterReproducesFixtureBytes) {
  const auto fixture = test_util::slurp(std::string(FEDALIGN_FIXTURES_DIR) + "/small.fedemb");
  const auto store = decode_store(bytes_of(fixture));
  const auto out = encode_store(store);
  ASSERT_EQ(out.size(), fixture.size());
  EXPECT_EQ(std::memcmp(out.data(), fixture.data(), out.size()), 0);
  EXPECT_EQ(store.file_size(), fixture.size());
}

TEST(Fedemb, HeaderLayout) {
  EmbeddingStore s(4, "distilbert");
  std::vector<float> v{1, 2, 3, 4};
  s.add("a", v);
  s.add("b", v);
  const auto b = encode_store(s);
  const auto u8 = [&](std::size_t i) { return std::to_integer<unsigned>(b[i]); };
  EXPECT_EQ(u8(0), 'F');
  EXPECT_EQ(u8(3), 'M');
  EXPECT_EQ(u8(4), 1u);   // version
  EXPECT_EQ(u8(8), 4u);   // dim
  EXPECT_EQ(u8(12), 2u);  // count
  EXPECT_EQ(u8(20), 10u); // encoder_id length
  // 32-byte header, then (2 + 1 + 16)-byte entries.
  EXPECT_EQ(b.size(), 32u + 2 * 19u);
}

TEST(Fedemb, SmallRoundTripBitwise) {
  test_util::TempDir dir;
  EmbeddingStore s(4, "x");
  const std::vector<float> a{0.1f, -0.0f, 3.4e38f, 1e-45f};
  const std::vector<float> b{std::nanf(""), 1, 2, 3};
  s.add("r1", a);
  s.add("r2", b);
  write_store(dir / "s.fedemb", s);
  const auto back = read_store(dir / "s.fedemb");
  EXPECT_TRUE(back == s);
  EXPECT_TRUE(bitwise_equal(*back.find("r1"), a));
  EXPECT_TRUE(bitwise_equal(*back.find("r2"), b));
}

TEST(Fedemb, RandomizedRoundTrip) {
  test_util::TempDir dir;
  for (const auto& [dim, n] : std::vector<std::pair<std::uint32_t, std::size_t>>{
           {4, 1}, {4, 500}, {17, 100}, {128, 1000}, {768, 50}}) {
    const auto s = random_store(dim, n, dim * 31 + n);
    write_store(dir / "r.fedemb", s);
    const auto back = read_store(dir / "r.fedemb");
    ASSERT_TRUE(back == s) << dim << "x" << n;
    for (std::size_t i = 0; i < s.size(); ++i) ASSERT_TRUE(bitwise_equal(back.row(i), s.row(i)));
  }
}

TEST(Fedemb, FileSizeArithmetic) {
  const auto s = random_store(768, 4238, 1);
  // Header + per-record (u16 length + 8-char id) + payload; ids here are "r0".."r4237".
  std::uint64_t index = 0;
  for (const auto& id : s.record_ids()) index += 2 + id.size();
  const std::uint64_t header = 4 + 4 + 4 + 8 + 2 + std::string("enc-768").size();
  EXPECT_EQ(s.file_size(), header + index + 4238ULL * 768 * 4);
  EXPECT_EQ(encode_store(s).size(), s.file_size());
}

TEST(Fedemb, Errors) {
  auto good = encode_store(random_store(4, 3, 2));
  auto bad_magic = good;
  bad_magic[0] = std::byte{'X'};
  EXPECT_FEDALIGN_ERROR(decode_store(bad_magic), bad_magic);
  auto bad_version = good;
  bad_version[4] = std::byte{2};
  EXPECT_FEDALIGN_ERROR(decode_store(bad_version), version_unsupported);
  for (std::size_t cut : {std::size_t{6}, std::size_t{10}, std::size_t{25}, good.size() - 1}) {
    std::vector<std::byte> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_FEDALIGN_ERROR(decode_store(t), truncated_file);
  }
  auto trailing = good;
  trailing.push_back(std::byte{0});
  EXPECT_FEDALIGN_ERROR(decode_store(trailing), truncated_file);

  EmbeddingStore dup(2, "d");
  std::vector<float> v{1, 2};
  dup.add("same", v);
  EXPECT_FEDALIGN_ERROR(dup.add("same", v), duplicate_record_id);
  EXPECT_FEDALIGN_ERROR(read_store("/nonexistent/x.fedemb"), missing_file);
}

TEST(Fedemb, DuplicateIdInFile) {
  auto fixture = test_util::slurp(std::string(FEDALIGN_FIXTURES_DIR) + "/small.fedemb");
  // Rename the third record id "r0000042" to "r0000001".
  const auto at = fixture.find("r0000042");
  ASSERT_NE(at, std::string::npos);
  fixture.replace(at, 8, "r0000001");
  EXPECT_FEDALIGN_ERROR(decode_store(bytes_of(fixture)), duplicate_record_id);
}

TEST(Fedemb, WrongWidthOnAdd) {
  EmbeddingStore s(3, "x");
  std::vector<float> v{1, 2};
  EXPECT_FEDALIGN_ERROR(s.add("a", v), dimension_mismatch);
}
