#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "examl/model_io.hpp"
#include "examl/protocol.hpp"
#include "examl/synthetic.hpp"

using namespace examl;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "examl_model_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

const EnsembleModel& classifier() {
  static const EnsembleModel model = [] {
    AutoMlOptions opts;
    opts.seed = 21;
    opts.ensemble_size = 3;
    return fit_table(synthetic::to_table(synthetic::two_gaussians(120, 4)), TaskKind::classification, opts)
        .fit.model;
  }();
  return model;
}

}  // namespace

namespace {
std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }
}  // namespace

TEST(Base64, KnownVectorsAndRejection) {
  EXPECT_EQ(base64::encode(bytes("")), "");
  EXPECT_EQ(base64::encode(bytes("f")), "Zg==");
  EXPECT_EQ(base64::encode(bytes("foobar")), "Zm9vYmFy");
  EXPECT_EQ(base64::decode("Zm9vYg=="), bytes("foob"));
  EXPECT_THROW(base64::decode("Zm9"), FormatError);
  EXPECT_THROW(base64::decode("Zm9v*mFy"), FormatError);
}

TEST(Base64, DoublesRoundTripBitwise) {
  std::vector<double> v{0.0, -0.0, 1.0 / 3.0, 1e-310, -1e308, std::numeric_limits<double>::infinity()};
  const auto back = base64::decode_doubles(base64::encode_doubles(v));
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i]), std::bit_cast<std::uint64_t>(v[i]));
  // 1.0 is 00 00 00 00 00 00 F0 3F in little-endian byte order.
  EXPECT_EQ(base64::encode_doubles({1.0}), "AAAAAAAA8D8=");
}

TEST(ModelFile, RoundTripPredictionsAreBitwiseEqual) {
  const auto path = temp_path("roundtrip.json");
  save_model(classifier(), path.string());
  const auto loaded = load_model(path.string());
  const Matrix probe = synthetic::two_gaussians(300, 99, 1.0, 3.0).X;
  const Matrix a = predict_scores(classifier(), probe), b = predict_scores(loaded, probe);
  ASSERT_EQ(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a(i)), std::bit_cast<std::uint64_t>(b(i)));
  EXPECT_EQ(loaded.codec.classes(), classifier().codec.classes());
  EXPECT_EQ(loaded.chosen_config.neurons, classifier().chosen_config.neurons);
  EXPECT_EQ(loaded.features.numeric_names(), classifier().features.numeric_names());
}

TEST(ModelFile, RegressionRoundTripKeepsTargetScale) {
  AutoMlOptions opts;
  opts.ensemble_size = 2;
  const auto data = synthetic::sine(80, 5);
  const auto model = fit_automl(data.X, data.y, TaskKind::regression, opts).model;
  const auto loaded = model_from_json(nlohmann::json::parse(model_to_json(model).dump()));
  EXPECT_EQ(predict_regression(model, data.X), predict_regression(loaded, data.X));
}

TEST(ModelFile, SavingTwiceIsByteIdentical) {
  const auto a = temp_path("a.json"), b = temp_path("b.json");
  save_model(classifier(), a.string());
  save_model(load_model(a.string()), b.string());
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(ModelFile, TruncatedFileIsFormatError) {
  const auto full = temp_path("full.json"), cut = temp_path("cut.json");
  save_model(classifier(), full.string());
  const auto text = slurp(full);
  write_text_file(cut.string(), text.substr(0, text.size() / 2));
  EXPECT_THROW(load_model(cut.string()), FormatError);
}

TEST(ModelFile, FutureVersionNamesBothVersions) {
  auto doc = model_to_json(classifier());
  doc["format_version"] = 7;
  try {
    model_from_json(doc);
    FAIL() << "expected UnsupportedVersion";
  } catch (const UnsupportedVersion& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos);
    EXPECT_NE(msg.find('1'), std::string::npos);
  }
}

TEST(ModelFile, CorruptPayloadIsFormatError) {
  auto doc = model_to_json(classifier());
  doc["members"][0]["beta"]["rows"] = 5;
  EXPECT_THROW(model_from_json(doc), FormatError);
  doc = model_to_json(classifier());
  doc["members"][0]["weights"]["data"] = "not base64!";
  EXPECT_THROW(model_from_json(doc), FormatError);
  doc = model_to_json(classifier());
  doc["ensemble_size"] = 9;
  EXPECT_THROW(model_from_json(doc), FormatError);
  doc = model_to_json(classifier());
  doc.erase("scaler");
  EXPECT_THROW(model_from_json(doc), FormatError);
  EXPECT_THROW(load_model(temp_path("does-not-exist.json").string()), std::runtime_error);
}
