#include <gtest/gtest.h>

#include "ssim_oracle.hpp"
#include "test_support.hpp"

namespace occlusion {
namespace {

using testing::TempDir;

ImageBuffer load(const std::string& rel) { return read_image(read_file(testing::data_dir() / rel)); }

TEST(Ssim, SelfSimilarityIsOne) {
    RngStream rng(1);
    for (int i = 0; i < 5; ++i) {
        const ImageBuffer img = testing::random_image(20 + i, 30, rng);
        EXPECT_NEAR(ssim(img, img), 1.0, 1e-9);
    }
    const ImageBuffer flat(16, 16, 77);
    EXPECT_NEAR(ssim(flat, flat), 1.0, 1e-9);
}

TEST(Ssim, SymmetricExactly) {
    RngStream rng(2);
    for (int i = 0; i < 10; ++i) {
        const ImageBuffer a = testing::synthetic_image(33, 21, rng), b = testing::random_image(33, 21, rng);
        EXPECT_EQ(ssim(a, b), ssim(b, a));
    }
}

TEST(Ssim, MatchesFrozenReferenceValues) {
    const auto& pairs = testing::expected()["ssim_pairs"];
    ASSERT_GE(pairs.size(), 20u);
    for (const auto& p : pairs) {
        const ImageBuffer a = load(p["a"]), b = load(p["b"]);
        EXPECT_NEAR(ssim(a, b), p["ssim"].get<double>(), 1e-4) << p["a"];
    }
}

TEST(Ssim, MatchesDirectSummation) {
    RngStream rng(3);
    for (int i = 0; i < 5; ++i) {
        const ImageBuffer a = testing::synthetic_image(27, 19, rng);
        ImageBuffer b = a;
        for (auto& v : b.bytes()) v = quantize_pixel(v + rng.normal(0, 20));
        EXPECT_NEAR(ssim(a, b), testing::reference_ssim(a, b), 1e-10);
    }
}

TEST(Ssim, InvertedImageScoresLow) {
    RngStream rng(4);
    const ImageBuffer a = testing::synthetic_image(48, 48, rng);
    ImageBuffer inv = a;
    for (auto& v : inv.bytes()) v = static_cast<std::uint8_t>(255 - v);
    EXPECT_LT(ssim(a, inv), 0.5);
}

TEST(Ssim, ShapeErrors) {
    EXPECT_THROW(ssim(ImageBuffer(20, 20), ImageBuffer(20, 21)), ShapeError);
    EXPECT_THROW(ssim(ImageBuffer(10, 20), ImageBuffer(10, 20)), ShapeError);
}

TEST(Retention, Examples) {
    RngStream rng(5);
    const PointCloud cloud = testing::random_cloud(lidar_schema(), 1000, rng);
    std::vector<std::size_t> idx(700);
    for (std::size_t i = 0; i < 700; ++i) idx[i] = i + i / 3;
    const PointCloud kept = cloud.select(idx);
    EXPECT_TRUE(verify_retention(cloud, kept, 30).passed);

    idx.push_back(999);
    const RetentionCheck extra = verify_retention(cloud, cloud.select(idx), 30);
    EXPECT_FALSE(extra.passed);
    EXPECT_EQ(extra.expected, 700u);
    EXPECT_EQ(extra.actual, 701u);

    std::vector<std::byte> bytes(kept.payload().begin(), kept.payload().end());
    bytes[25] ^= std::byte{1};
    const RetentionCheck mutated = verify_retention(cloud, PointCloud(kept.schema(), bytes), 30);
    EXPECT_FALSE(mutated.passed);
    EXPECT_FALSE(mutated.subsequence);

    std::vector<std::size_t> shuffled(idx.begin(), idx.begin() + 700);
    std::swap(shuffled[0], shuffled[1]);
    EXPECT_FALSE(verify_retention(cloud, cloud.select(shuffled), 30).passed);

    EXPECT_THROW(verify_retention(cloud, testing::random_cloud(testing::radar_schema(), 700, rng), 30), InputError);
}

TEST(NoiseCheckTest, Examples) {
    RngStream rng(6);
    const PointCloud cloud = testing::random_cloud(testing::radar_schema(), 100000, rng);
    EXPECT_TRUE(verify_noise_stats(cloud, cloud, 0.0).passed);
    const PointCloud honest = add_gaussian_noise(cloud, 0.5, rng);
    EXPECT_TRUE(verify_noise_stats(cloud, honest, 0.5).passed);
    const PointCloud loud = add_gaussian_noise(cloud, 1.0, rng);
    const NoiseCheck c = verify_noise_stats(cloud, loud, 0.5);
    EXPECT_FALSE(c.passed);
    EXPECT_NEAR(c.stddev[0], 1.0, 0.02);
    EXPECT_THROW(verify_noise_stats(cloud, cloud.select(std::vector<std::size_t>{0, 1}), 0.5), InputError);
}

TEST(NoiseCheckTest, DetectsAttributeTampering) {
    RngStream rng(7);
    const PointCloud cloud = testing::random_cloud(testing::radar_schema(), 20000, rng);
    const PointCloud noisy = add_gaussian_noise(cloud, 0.2, rng);
    std::vector<std::byte> bytes(noisy.payload().begin(), noisy.payload().end());
    bytes[noisy.record_size() * 3 + 20] ^= std::byte{0x40};  // inside vx
    const NoiseCheck c = verify_noise_stats(cloud, PointCloud(noisy.schema(), bytes), 0.2);
    EXPECT_FALSE(c.non_spatial_identical);
    EXPECT_FALSE(c.passed);
}

TEST(BatchSsim, CopiesGiveZeroDropAndShortfallRecorded) {
    TempDir dir("batch");
    testing::make_fixture_tree(dir.path() / "clean", {.images_per_camera = 2});
    std::filesystem::copy(dir.path() / "clean", dir.path() / "copy", std::filesystem::copy_options::recursive);
    const DegradationReport r = batch_ssim(dir.path() / "clean", dir.path() / "copy", 5000, RngStream(1), 1);
    EXPECT_EQ(r.samples, 12u);
    EXPECT_NEAR(r.mean_drop, 0.0, 1e-12);
    ASSERT_EQ(r.per_camera.size(), 6u);
    for (const auto& [ch, s] : r.per_camera) {
        EXPECT_EQ(s.available, 2u);
        EXPECT_EQ(s.used, 2u);
        EXPECT_EQ(s.shortfall, 4998u);
    }
    const DegradationReport one = batch_ssim(dir.path() / "clean", dir.path() / "copy", 1, RngStream(1), 1);
    EXPECT_EQ(one.samples, 6u);
    EXPECT_EQ(to_json(one), to_json(batch_ssim(dir.path() / "clean", dir.path() / "copy", 1, RngStream(1), 1)));
}

TEST(BatchSsim, PairingAndEmptyErrors) {
    TempDir dir("pairing");
    testing::make_fixture_tree(dir.path() / "clean");
    std::filesystem::create_directories(dir.path() / "empty");
    EXPECT_THROW(batch_ssim(dir.path() / "clean", dir.path() / "empty", 10, RngStream(1)), EmptyInputError);
    testing::write_bytes(dir.path() / "extra" / "samples" / "CAM_FRONT" / "ghost.jpg",
                         write_image(ImageBuffer(16, 16, 1), ImageFormat::Jpeg));
    try {
        batch_ssim(dir.path() / "clean", dir.path() / "extra", 10, RngStream(1));
        FAIL() << "expected PairingError";
    } catch (const PairingError& e) {
        EXPECT_NE(std::string(e.what()).find("ghost.jpg"), std::string::npos);
    }
}

TEST(VariantLabel, Parse) {
    auto v = parse_variant_label("dirt_0.2");
    ASSERT_TRUE(v);
    EXPECT_EQ(v->kind, OcclusionKind::Dirt);
    EXPECT_EQ(v->value, 0.2);
    v = parse_variant_label("point_dropout_30");
    ASSERT_TRUE(v);
    EXPECT_EQ(v->kind, OcclusionKind::PointDropout);
    EXPECT_EQ(v->value, 30.0);
    v = parse_variant_label("soiling_k51");
    ASSERT_TRUE(v);
    EXPECT_EQ(v->value, 51.0);
    v = parse_variant_label("angle_drop_front_30");
    ASSERT_TRUE(v);
    EXPECT_EQ(v->kind, OcclusionKind::AngleDrop);
    EXPECT_FALSE(v->value);
    EXPECT_FALSE(parse_variant_label("fog_0.1"));
}

}  // namespace
}  // namespace occlusion
