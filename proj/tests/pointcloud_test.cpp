#include <gtest/gtest.h>

#include <map>

#include "geometry_oracle.hpp"
#include "test_support.hpp"

namespace occlusion {
namespace {

using testing::random_cloud;
using testing::radar_schema;

RadarScene make_scene(RngStream& rng) {
    RadarScene scene;
    for (auto s : kAllRadarSensors) scene.emplace(s, random_cloud(radar_schema(), 20, rng));
    return scene;
}

PointCloud xyz(std::initializer_list<std::array<float, 3>> pts) {
    std::vector<std::array<float, 3>> v(pts);
    return make_xyz_cloud(v);
}

TEST(PointCloud, SchemaOffsetsAndValidation) {
    const Schema s = radar_schema();
    EXPECT_EQ(s.fields().size(), 18u);
    EXPECT_EQ(s.record_size(), 43u);
    EXPECT_EQ(s.offset(3), 12u);
    EXPECT_EQ(s.offset(4), 13u);
    EXPECT_EQ(s.find("rcs"), std::optional<std::size_t>(5));
    EXPECT_THROW(PointCloud(Schema({{"a", ScalarKind::Float, 4, 1}}), {}), InputError);
    EXPECT_THROW(PointCloud(lidar_schema(), std::vector<std::byte>(21)), InputError);
}

TEST(SensorDrop, ChosenSensorRemovedOthersUntouched) {
    RngStream rng(1);
    const RadarScene scene = make_scene(rng);
    const auto r = drop_sensor(scene, RadarSensor::Front, rng);
    EXPECT_EQ(r.dropped, RadarSensor::Front);
    ASSERT_EQ(r.scene.size(), 4u);
    EXPECT_FALSE(r.scene.contains(RadarSensor::Front));
    for (const auto& [s, cloud] : r.scene) EXPECT_EQ(cloud, scene.at(s));
    const auto by_name = drop_sensor(scene, "RADAR_BACK_RIGHT", rng);
    EXPECT_EQ(by_name.dropped, RadarSensor::BackRight);
}

TEST(SensorDrop, RequiresAllFiveSensors) {
    RngStream rng(2);
    RadarScene scene = make_scene(rng);
    scene.erase(RadarSensor::BackLeft);
    EXPECT_THROW(drop_sensor(scene, std::nullopt, rng), InputError);
}

TEST(SensorDrop, RandomChoiceIsUniform) {
    RngStream rng(3);
    std::map<RadarSensor, int> counts;
    for (int i = 0; i < 10000; ++i) ++counts[pick_dropped_sensor(std::nullopt, rng)];
    ASSERT_EQ(counts.size(), 5u);
    for (const auto& [s, n] : counts) EXPECT_NEAR(n, 2000, 200) << to_string(s);
}

TEST(Dropout, RetainedCountTable) {
    for (const auto& row : testing::expected()["retention"])
        EXPECT_EQ(retained_count(row["n"].get<std::size_t>(), row["percent"].get<double>()),
                  row["retained"].get<std::size_t>())
            << row.dump();
    EXPECT_THROW(retained_count(10, 99.5), ParameterError);
    EXPECT_THROW(retained_count(10, -1), ParameterError);
}

TEST(Dropout, OrderedSubsetWithExactCount) {
    RngStream rng(4);
    const PointCloud cloud = random_cloud(radar_schema(), 1000, rng);
    const PointCloud out = dropout_points(cloud, 30, rng);
    EXPECT_EQ(out.size(), 700u);
    EXPECT_TRUE(is_record_subsequence(cloud, out));
    EXPECT_EQ(dropout_points(cloud, 0, rng), cloud);
    EXPECT_EQ(dropout_points(random_cloud(radar_schema(), 10, rng), 99, rng).size(), 0u);
}

TEST(Dropout, Deterministic) {
    RngStream g(5);
    const PointCloud cloud = random_cloud(lidar_schema(), 500, g);
    RngStream a(6), b(6);
    EXPECT_EQ(dropout_points(cloud, 45, a), dropout_points(cloud, 45, b));
}

TEST(Dropout, EveryPointEquallyLikely) {
    RngStream g(7);
    const PointCloud cloud = testing::random_lidar(20, g);
    std::vector<int> kept(20, 0);
    RngStream rng(8);
    for (int t = 0; t < 20000; ++t) {
        const PointCloud out = dropout_points(cloud, 75, rng);
        for (std::size_t j = 0, i = 0; j < out.size(); ++i)
            if (std::equal(out.record(j).begin(), out.record(j).end(), cloud.record(i).begin())) {
                ++kept[i];
                ++j;
            }
    }
    for (int k : kept) EXPECT_NEAR(k, 5000, 300);
}

TEST(Noise, StatisticsAndAttributes) {
    RngStream g(9);
    const PointCloud cloud = random_cloud(radar_schema(), 100000, g);
    RngStream rng(10);
    const PointCloud out = add_gaussian_noise(cloud, 0.5, rng);
    const NoiseCheck c = verify_noise_stats(cloud, out, 0.5);
    EXPECT_TRUE(c.non_spatial_identical);
    for (int a = 0; a < 3; ++a) {
        EXPECT_NEAR(c.stddev[a], 0.5, 0.005);
        EXPECT_NEAR(c.mean[a], 0.0, 0.01);
    }
}

TEST(Noise, ZeroSigmaIsCopy) {
    RngStream g(11);
    const PointCloud cloud = random_cloud(radar_schema(), 100, g);
    RngStream rng(12);
    EXPECT_EQ(add_gaussian_noise(cloud, 0.0, rng), cloud);
    EXPECT_THROW(add_gaussian_noise(cloud, -0.1, rng), ParameterError);
}

TEST(Region, FrontHalfPlane) {
    const PointCloud out = occlude_region(xyz({{5, 3, 0}, {-5, 3, 0}}), {Region::Front});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out.x(0), -5.0);
}

TEST(Region, SignConventions) {
    const PointCloud pts = xyz({{1, 2, 0}, {-1, -2, 0}, {0, 0, 0}});
    EXPECT_EQ(occlude_region(pts, {Region::Back}).size(), 2u);
    EXPECT_EQ(occlude_region(pts, {Region::Left}).size(), 2u);   // removes y < 0
    EXPECT_EQ(occlude_region(pts, {Region::Left}).y(0), 2.0);
    EXPECT_EQ(occlude_region(pts, {Region::Right}).y(0), -2.0);  // removes y > 0
    EXPECT_EQ(occlude_region(pts, {Region::Left, true}).y(0), -2.0);
    // Points on the dividing axis are never removed.
    EXPECT_EQ(occlude_region(xyz({{0, 0, 0}}), {Region::Front}).size(), 1u);
}

TEST(Cone, HandArctangent) {
    const ConeSelector front30{Region::Front, 30.0};
    EXPECT_TRUE(front30.contains(1, 0.2));    // 11.31 deg
    EXPECT_FALSE(front30.contains(1, 0.6));   // 30.96 deg
    EXPECT_TRUE(front30.contains(1, -0.2));
    EXPECT_EQ(occlude_angle(xyz({{1, 0.2f, 0}, {1, 0.6f, 0}}), front30).size(), 1u);
}

TEST(Cone, BackWrapsAround) {
    const ConeSelector back60{Region::Back, 60.0};
    EXPECT_TRUE(back60.contains(-1, 0.1));
    EXPECT_TRUE(back60.contains(-1, -0.1));
    EXPECT_FALSE(back60.contains(-1, 1.0));
    EXPECT_FALSE(back60.contains(1, 0.0));
}

TEST(Cone, RejectsBadAngle) {
    EXPECT_THROW(occlude_angle(xyz({{1, 0, 0}}), {Region::Front, 400.0}), ParameterError);
}

class GeometryOracle : public ::testing::TestWithParam<std::tuple<Region, bool>> {};

TEST_P(GeometryOracle, MatchesBruteForce) {
    const auto [region, swap] = GetParam();
    RngStream rng(static_cast<std::uint64_t>(region) * 2 + swap);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::array<float, 3>> pts;
        while (pts.size() < 1000) {
            const float x = static_cast<float>(rng.uniform(-50, 50)), y = static_cast<float>(rng.uniform(-50, 50));
            if (std::abs(x) < 1e-3 || std::abs(y) < 1e-3) continue;
            pts.push_back({x, y, static_cast<float>(rng.uniform(-2, 2))});
        }
        const PointCloud cloud = make_xyz_cloud(pts);
        const double angle = rng.uniform(5, 175);
        const RegionSelector rs{region, swap};
        const ConeSelector cs{region, angle, swap};
        std::vector<std::array<float, 3>> want_region, want_cone;
        for (const auto& p : pts) {
            if (!testing::oracle_in_region(region, swap, p[0], p[1])) want_region.push_back(p);
            if (!testing::oracle_in_cone(region, swap, angle, p[0], p[1])) want_cone.push_back(p);
        }
        EXPECT_EQ(occlude_region(cloud, rs), make_xyz_cloud(want_region));
        EXPECT_EQ(occlude_angle(cloud, cs), make_xyz_cloud(want_cone));
    }
}

INSTANTIATE_TEST_SUITE_P(AllRegions, GeometryOracle,
                         ::testing::Combine(::testing::Values(Region::Front, Region::Back, Region::Left, Region::Right),
                                            ::testing::Bool()));

TEST(Cone, HalfTurnEqualsRegion) {
    RngStream rng(21);
    std::vector<std::array<float, 3>> pts;
    while (pts.size() < 2000) {
        const float x = static_cast<float>(rng.uniform(-30, 30)), y = static_cast<float>(rng.uniform(-30, 30));
        if (std::abs(x) > 1e-3 && std::abs(y) > 1e-3) pts.push_back({x, y, 0});
    }
    const PointCloud cloud = make_xyz_cloud(pts);
    for (auto r : {Region::Front, Region::Back, Region::Left, Region::Right})
        EXPECT_EQ(occlude_angle(cloud, {r, 180.0}), occlude_region(cloud, {r}));
}

}  // namespace
}  // namespace occlusion
