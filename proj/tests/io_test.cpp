#include <gtest/gtest.h>

#include "test_support.hpp"

namespace occlusion {
namespace {

using testing::data_dir;
using testing::expected;
using testing::TempDir;

std::vector<std::byte> text_bytes(const std::string& s) { return to_bytes(s); }

TEST(LidarBin, CraftedRecords) {
    const auto bytes = read_file(data_dir() / "crafted_two_points.bin");
    ASSERT_EQ(bytes.size(), 40u);
    const PointCloud cloud = read_lidar_bin(bytes);
    ASSERT_EQ(cloud.size(), 2u);
    const auto& want = expected()["point_files"]["crafted_two_points.bin"]["points"];
    for (std::size_t i = 0; i < 2; ++i)
        for (int a = 0; a < 3; ++a) EXPECT_EQ(cloud.coord(i, a), want[i][static_cast<std::size_t>(a)].get<double>());
    EXPECT_EQ(write_lidar_bin(cloud), bytes);
}

TEST(LidarBin, RoundTripFixture) {
    const auto bytes = read_file(data_dir() / "lidar_top.pcd.bin");
    const PointCloud cloud = read_lidar_bin(bytes);
    EXPECT_EQ(cloud.size(), expected()["point_files"]["lidar_top.pcd.bin"]["points"].get<std::size_t>());
    EXPECT_EQ(write_lidar_bin(cloud), bytes);
}

TEST(LidarBin, TrailingBytesAreTyped) {
    auto bytes = read_file(data_dir() / "crafted_two_points.bin");
    bytes.resize(37);
    try {
        read_lidar_bin(bytes);
        FAIL() << "expected MalformedFileError";
    } catch (const MalformedFileError& e) {
        EXPECT_EQ(e.offset(), 20u);
    }
    EXPECT_EQ(read_lidar_bin({}).size(), 0u);
}

TEST(Pcd, RadarFixtureHeader) {
    const auto bytes = read_file(data_dir() / "radar_front.pcd");
    const auto& want = expected()["point_files"]["radar_front.pcd"];
    const PcdDocument doc = read_pcd_document(bytes);
    EXPECT_EQ(doc.header.fields.size(), want["fields"].get<std::size_t>());
    EXPECT_EQ(doc.cloud.record_size(), want["record_size"].get<std::size_t>());
    EXPECT_EQ(doc.cloud.size(), want["points"].get<std::size_t>());
    for (int a = 0; a < 3; ++a) EXPECT_EQ(doc.cloud.coord(0, a), want["first_xyz"][static_cast<std::size_t>(a)].get<double>());
    EXPECT_EQ(doc.header.viewpoint, "0 0 0 1 0 0 0");
    EXPECT_EQ(write_pcd(doc), bytes);
}

TEST(Pcd, EmptyCloudRoundTrip) {
    RngStream rng(1);
    const PointCloud empty = testing::random_cloud(testing::radar_schema(), 0, rng);
    const auto bytes = write_pcd(empty);
    const PcdDocument doc = read_pcd_document(bytes);
    EXPECT_EQ(doc.cloud.size(), 0u);
    EXPECT_EQ(doc.cloud.schema(), testing::radar_schema());
}

std::string header(const std::string& fields, const std::string& size, const std::string& type,
                   const std::string& tail = "WIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA binary\n") {
    return "VERSION 0.7\nFIELDS " + fields + "\nSIZE " + size + "\nTYPE " + type + "\nCOUNT 1 1 1\n" + tail;
}

TEST(Pcd, TypedErrorsForBadHeaders) {
    const std::string good = header("x y z", "4 4 4", "F F F");
    std::string payload(12, '\0');
    EXPECT_EQ(read_pcd(text_bytes(good + payload)).size(), 1u);

    EXPECT_THROW(read_pcd(text_bytes(good + payload.substr(0, 11))), MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(good + payload + "x")), MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4", "F F F") + payload)), MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4 3", "F F F") + payload)), MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4 4", "F F Q") + payload)), MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("a b c", "4 4 4", "F F F") + payload)), MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4 4", "F F F",
                                            "WIDTH 2\nHEIGHT 1\nPOINTS 1\nDATA binary\n") + payload)),
                 MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4 4", "F F F",
                                            "WIDTH 99999999999999999999\nHEIGHT 1\nDATA binary\n"))),
                 MalformedFileError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4 4", "F F F",
                                            "WIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA ascii\n") + "0 0 0\n")),
                 UnsupportedFormatError);
    EXPECT_THROW(read_pcd(text_bytes(header("x y z", "4 4 4", "F F F",
                                            "WIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA binary_compressed\n"))),
                 UnsupportedFormatError);
    EXPECT_THROW(read_pcd(text_bytes("VERSION 0.7\nFIELDS x y z\n")), MalformedFileError);
    EXPECT_THROW(read_pcd({}), MalformedFileError);
}

TEST(Image, RedJpegFixture) {
    const ImageBuffer img = read_image(read_file(data_dir() / "red_1x1.jpg"));
    ASSERT_EQ(img.width(), 1);
    ASSERT_EQ(img.height(), 1);
    EXPECT_GT(img.at(0, 0, 0), 200);
    EXPECT_LT(img.at(0, 0, 1), 40);
    const auto& px = expected()["red_jpeg"]["pixel"];
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(img.at(0, 0, c), px[static_cast<std::size_t>(c)].get<int>(), 2);
}

TEST(Image, PngRoundTripIsLossless) {
    RngStream rng(1);
    const ImageBuffer img = testing::random_image(17, 9, rng);
    EXPECT_EQ(read_image(write_image(img, ImageFormat::Png)), img);
}

TEST(Image, JpegRoundTripIsClose) {
    RngStream rng(2);
    const ImageBuffer img = testing::synthetic_image(64, 48, rng);
    const ImageBuffer back = read_image(write_image(img, ImageFormat::Jpeg, 95));
    ASSERT_TRUE(back.same_shape(img));
    EXPECT_GT(ssim(img, back), 0.9);
}

TEST(Image, DecodeErrorsAreTyped) {
    EXPECT_THROW(read_image({}), DecodeError);
    EXPECT_THROW(read_image(text_bytes("not an image at all")), DecodeError);
    auto jpeg = write_image(ImageBuffer(8, 8, 100), ImageFormat::Jpeg);
    jpeg.resize(jpeg.size() / 2);
    EXPECT_THROW(read_image(jpeg), DecodeError);
    auto png = write_image(ImageBuffer(8, 8, 100), ImageFormat::Png);
    png.resize(png.size() / 2);
    EXPECT_THROW(read_image(png), DecodeError);
}

TEST(Files, MirrorPath) {
    TempDir dir("mirror");
    const auto out = mirror_output_path("samples/CAM_FRONT/a.jpg", dir.path() / "out");
    EXPECT_EQ(out, dir.path() / "out" / "samples" / "CAM_FRONT" / "a.jpg");
    EXPECT_TRUE(std::filesystem::is_directory(out.parent_path()));
    EXPECT_THROW(mirror_output_path("/etc/passwd", dir.path()), ValidationError);
    EXPECT_THROW(mirror_output_path("samples/../../x", dir.path()), ValidationError);
    EXPECT_THROW(mirror_output_path("samples\\x", dir.path()), ValidationError);
    EXPECT_THROW(mirror_output_path("", dir.path()), ValidationError);
}

TEST(Files, AtomicWriteLeavesNoPartial) {
    TempDir dir("atomic");
    const auto path = dir.path() / "f.bin";
    write_file_atomic(path, text_bytes("abc"));
    write_file_atomic(path, text_bytes("defg"));
    EXPECT_EQ(read_file(path), text_bytes("defg"));
    EXPECT_EQ(testing::relative_files(dir.path()), std::vector<std::string>{"f.bin"});
    EXPECT_THROW(read_file(dir.path() / "missing"), IoError);
}

TEST(Dataset, ScanCountsFixtureTree) {
    TempDir dir("scan");
    testing::make_fixture_tree(dir.path());
    std::filesystem::create_directories(dir.path() / "samples" / "UNKNOWN");
    testing::write_bytes(dir.path() / "samples" / "CAM_FRONT" / "notes.txt", text_bytes("x"));
    const ScanResult r = scan_dataset_detailed(dir.path());
    std::map<Modality, int> counts;
    for (const auto& e : r.entries) ++counts[e.modality];
    EXPECT_EQ(counts[Modality::Camera], 6);
    EXPECT_EQ(counts[Modality::Radar], 5);
    EXPECT_EQ(counts[Modality::Lidar], 1);
    EXPECT_EQ(r.warnings.size(), 2u);
    EXPECT_TRUE(std::is_sorted(r.entries.begin(), r.entries.end(),
                               [](const auto& a, const auto& b) { return a.relpath < b.relpath; }));
    EXPECT_EQ(scan_dataset(dir.path(), {Modality::Lidar}).size(), 1u);
    EXPECT_THROW(scan_dataset(dir.path() / "nope"), IoError);
}

TEST(Dataset, SensorFileNames) {
    const auto p = parse_sensor_file_name("n008-2018-08-01-15-16-36-0400__RADAR_FRONT__1533151603555991.pcd");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->log, "n008-2018-08-01-15-16-36-0400");
    EXPECT_EQ(p->channel, "RADAR_FRONT");
    EXPECT_EQ(p->timestamp, 1533151603555991);
    EXPECT_FALSE(parse_sensor_file_name("plain.pcd"));
    EXPECT_FALSE(parse_sensor_file_name("a__RADAR_FRONT__12x.pcd"));
}

TEST(Dataset, RadarFramesGroupByNearestFrontAnchor) {
    auto entry = [](const std::string& ch, std::int64_t ts, const std::string& split = "sweeps") {
        return DatasetEntry{Modality::Radar, ch, split + "/" + ch + "/log__" + ch + "__" + std::to_string(ts) + ".pcd", 1};
    };
    const std::vector<DatasetEntry> entries = {
        entry("RADAR_FRONT", 1000),     entry("RADAR_FRONT", 2000),      entry("RADAR_FRONT_LEFT", 1100),
        entry("RADAR_FRONT_LEFT", 1900), entry("RADAR_BACK_LEFT", 1600), entry("RADAR_BACK_RIGHT", 1400),
        entry("RADAR_FRONT_RIGHT", 5, "samples"),
    };
    const RadarGrouping g = group_radar_frames(entries);
    ASSERT_EQ(g.frames.size(), 2u);
    EXPECT_EQ(g.frames[0].files.at(RadarSensor::FrontLeft).front().relpath, entries[2].relpath);
    EXPECT_EQ(g.frames[0].files.at(RadarSensor::BackRight).front().relpath, entries[5].relpath);
    EXPECT_EQ(g.frames[1].files.at(RadarSensor::BackLeft).front().relpath, entries[4].relpath);
    EXPECT_FALSE(g.frames[0].complete());
    ASSERT_EQ(g.orphans.size(), 1u);
    EXPECT_EQ(g.orphans[0].relpath, entries[6].relpath);
}

}  // namespace
}  // namespace occlusion
