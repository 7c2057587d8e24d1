#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "trident/core_types.hpp"
#include "trident/rng.hpp"

using namespace trident;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("core_types");

namespace {

PresenceFlag pf(int v) { return PresenceFlag(v); }

fs::path make_tmp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Minimal on-disk assets so manifest validation passes.
ManifestEntry make_entry(const fs::path& dir, const std::string& id, int label) {
    const fs::path wav = dir / (id + ".wav");
    const fs::path frames = dir / (id + "_frames");
    const fs::path iq = dir / (id + ".iq");
    std::ofstream(wav) << "x";
    fs::create_directories(frames);
    std::ofstream(iq) << "x";
    ManifestEntry e;
    e.sample_id = id;
    e.audio_path = wav;
    e.frames_dir = frames;
    e.iq_path = iq;
    e.label = pf(label);
    return e;
}

}  // namespace

TEST_CASE("label_from_frames follows the max rule") {
    std::vector<PresenceFlag> all_zero(7, pf(0));
    CHECK(label_from_frames(all_zero).value == 0);

    std::vector<PresenceFlag> one{pf(0), pf(0), pf(1), pf(0), pf(0), pf(0), pf(0)};
    CHECK(label_from_frames(one).value == 1);

    CHECK_THROWS_WITH_AS(label_from_frames({}), "no frames",
                         std::invalid_argument);
}

TEST_CASE("label_from_frames equals the OR fold on all 7-bit vectors") {
    for (int bits = 0; bits < (1 << 7); ++bits) {
        std::vector<PresenceFlag> frames;
        int any = 0;
        for (int i = 0; i < 7; ++i) {
            const int b = (bits >> i) & 1;
            any |= b;
            frames.push_back(pf(b));
        }
        CHECK(label_from_frames(frames).value == any);
    }
}

TEST_CASE("manifest round-trips and validates") {
    const fs::path dir = make_tmp_dir("trident_manifest_test");
    std::vector<ManifestEntry> entries;
    entries.push_back(make_entry(dir, "rec0000_seg000", 1));
    entries.push_back(make_entry(dir, "rec0000_seg001", 1));
    entries.push_back(make_entry(dir, "rec0001_seg000", 0));
    entries[0].tags = {Lighting::sunset, Location::urban, Los::nlos};
    entries[0].split = Split::test;

    const fs::path manifest = dir / "manifest.tsv";
    save_manifest(entries, manifest);
    const auto loaded = load_manifest(manifest);
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded[i].sample_id == entries[i].sample_id);
        CHECK(loaded[i].label == entries[i].label);
        CHECK(loaded[i].tags.lighting == entries[i].tags.lighting);
        CHECK(loaded[i].tags.location == entries[i].tags.location);
        CHECK(loaded[i].tags.los == entries[i].tags.los);
        CHECK(loaded[i].split == entries[i].split);
        CHECK(fs::equivalent(loaded[i].audio_path, entries[i].audio_path));
    }
    CHECK(loaded[0].recording_id() == "rec0000");
}

TEST_CASE("manifest parse errors carry the line number") {
    const fs::path dir = make_tmp_dir("trident_manifest_err");
    const auto e = make_entry(dir, "a_seg000", 1);
    const fs::path manifest = dir / "manifest.tsv";
    {
        std::ofstream out(manifest);
        out << "# comment\n";
        out << e.sample_id << '\t' << e.audio_path.string() << '\t'
            << e.frames_dir.string() << '\t' << e.iq_path.string()
            << "\tdrone\tnoon\tnon_urban\tlos\ttrain\n";
    }
    CHECK_THROWS_WITH_AS(load_manifest(manifest),
                         "manifest line 2: unknown lighting tag \"noon\"",
                         std::runtime_error);
}

TEST_CASE("manifest rejects missing files by name") {
    const fs::path dir = make_tmp_dir("trident_manifest_missing");
    const fs::path manifest = dir / "manifest.tsv";
    std::ofstream(manifest)
        << "a\tno_such.wav\tframes\tiq.bin\tdrone\tdaylight\turban\tlos\ttrain\n";
    try {
        load_manifest(manifest);
        FAIL("expected error");
    } catch (const std::runtime_error& err) {
        CHECK(std::string(err.what()).find("no_such.wav") != std::string::npos);
    }
}

TEST_CASE("split reproduces the published file totals") {
    // 159 drone + 118 no-drone recordings at 77/11/12.
    const fs::path dir = make_tmp_dir("trident_split_paper");
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < 159; ++i)
        entries.push_back(make_entry(dir, "d" + std::to_string(i), 1));
    for (int i = 0; i < 118; ++i)
        entries.push_back(make_entry(dir, "n" + std::to_string(i), 0));

    const auto split = split_dataset(entries, SplitRatios{0.77, 0.11, 0.12}, 5);
    std::map<Split, int> counts;
    for (const auto& e : split) counts[e.split]++;
    CHECK(counts[Split::train] == 212);
    CHECK(counts[Split::val] == 32);
    CHECK(counts[Split::test] == 33);

    // Train and test take the per-class floor.
    std::map<Split, int> drone_counts;
    for (const auto& e : split)
        if (e.label.present()) drone_counts[e.split]++;
    CHECK(drone_counts[Split::train] == 122);  // floor(0.77 * 159)
    CHECK(drone_counts[Split::test] == 19);    // floor(0.12 * 159)
}

TEST_CASE("split handles a single-class set") {
    const fs::path dir = make_tmp_dir("trident_split_one_class");
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < 10; ++i)
        entries.push_back(make_entry(dir, "x" + std::to_string(i), 1));
    const auto split = split_dataset(entries, SplitRatios{0.8, 0.1, 0.1}, 1);
    std::map<Split, int> counts;
    for (const auto& e : split) counts[e.split]++;
    CHECK(counts[Split::train] == 8);
    CHECK(counts[Split::val] == 1);
    CHECK(counts[Split::test] == 1);
}

TEST_CASE("split is deterministic and a partition") {
    const fs::path dir = make_tmp_dir("trident_split_det");
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < 40; ++i)
        entries.push_back(make_entry(dir, "r" + std::to_string(i), i % 2));

    const auto a = split_dataset(entries, SplitRatios{}, 99);
    const auto b = split_dataset(entries, SplitRatios{}, 99);
    REQUIRE(a.size() == b.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].split == b[i].split);
        CHECK(seen.insert(a[i].sample_id).second);  // each entry exactly once
    }
    CHECK(seen.size() == entries.size());
}

TEST_CASE("split keeps recordings together") {
    const fs::path dir = make_tmp_dir("trident_split_rec");
    std::vector<ManifestEntry> entries;
    for (int r = 0; r < 12; ++r)
        for (int s = 0; s < 3; ++s)
            entries.push_back(make_entry(
                dir, "rec" + std::to_string(r) + "_seg00" + std::to_string(s),
                r % 2));
    const auto split = split_dataset(entries, SplitRatios{}, 3);
    std::map<std::string, std::set<Split>> per_rec;
    for (const auto& e : split) per_rec[e.recording_id()].insert(e.split);
    for (const auto& [rec, splits] : per_rec) CHECK(splits.size() == 1);
}

TEST_CASE("split rejects bad ratios and tiny classes") {
    const fs::path dir = make_tmp_dir("trident_split_bad");
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < 10; ++i)
        entries.push_back(make_entry(dir, "x" + std::to_string(i), 1));
    CHECK_THROWS(split_dataset(entries, SplitRatios{0.5, 0.1, 0.1}, 1));

    std::vector<ManifestEntry> two(entries.begin(), entries.begin() + 2);
    try {
        split_dataset(two, SplitRatios{}, 1);
        FAIL("expected error");
    } catch (const std::runtime_error& err) {
        CHECK(std::string(err.what()).find("insufficient files") !=
              std::string::npos);
    }
}

TEST_CASE("audio segment validation") {
    AudioSegment seg;
    seg.samples.assign(AudioSegment::kLength, 0.0f);
    CHECK_NOTHROW(seg.validate());
    seg.samples.pop_back();
    CHECK_THROWS(seg.validate());
    seg.samples.assign(AudioSegment::kLength, 0.0f);
    seg.sample_rate = 48000;
    CHECK_THROWS(seg.validate());
}

TEST_CASE("tensor reshape round-trip is lossless") {
    Rng rng(5);
    MfccGrid grid;
    for (std::size_t i = 0; i < grid.values.size(); ++i)
        grid.values[i] = rng.normal_f();
    const Tensor flat = grid.values.reshaped({1600});
    const Tensor back = flat.reshaped({40, 40});
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK(back[i] == grid.values[i]);
    CHECK_THROWS(grid.values.reshaped({39, 40}));
}

TEST_SUITE_END();
