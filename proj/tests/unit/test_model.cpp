#include "oscpipe/model.hpp"

#include "oscpipe/error.hpp"

#include "doctest.h"
#include "fixtures.hpp"

using namespace osc;

namespace {

MaskRegion simple_region(int frame) {
    return fixtures::region_at(frame, fixtures::mask_of({"10", "00"}), 0.6, 0.2);
}

} // namespace

TEST_CASE("make_masklet validates ordering and masks") {
    CHECK_NOTHROW(make_masklet("t0", {simple_region(0), simple_region(1), simple_region(5)}));

    CHECK_THROWS_AS(make_masklet("t0", {simple_region(1), simple_region(1)}), ValidationError);
    CHECK_THROWS_AS(make_masklet("t0", {simple_region(2), simple_region(1)}), ValidationError);

    MaskRegion empty = simple_region(0);
    empty.mask = empty_mask(2, 2);
    CHECK_THROWS_AS(make_masklet("t0", {empty}), ValidationError);

    MaskRegion other_grid = simple_region(1);
    other_grid.mask = fixtures::mask_of({"100", "000"});
    CHECK_THROWS_AS(make_masklet("t0", {simple_region(0), other_grid}), ValidationError);
}

TEST_CASE("index_set fixtures") {
    LabelSequence seq;
    seq.track_id = "t0";
    seq.labels = {{0, StateLabel::Actionable},
                  {1, StateLabel::Transformed},
                  {2, StateLabel::Actionable}};
    CHECK(index_set(seq, StateLabel::Actionable) == std::vector<int>{0, 2});
    CHECK(index_set(seq, StateLabel::Transformed) == std::vector<int>{1});

    CHECK(index_set(LabelSequence{}, StateLabel::Actionable).empty());

    LabelSequence longer;
    longer.labels = {{0, StateLabel::Actionable},
                     {1, StateLabel::Transformed},
                     {2, StateLabel::Actionable},
                     {3, StateLabel::Transformed},
                     {4, StateLabel::Transformed}};
    CHECK(index_set(longer, StateLabel::Transformed) == std::vector<int>{1, 3, 4});
}

TEST_CASE("index sets partition the labeled frames") {
    LabelSequence seq;
    seq.labels = {{0, StateLabel::Actionable}, {2, StateLabel::Ambiguous},
                  {4, StateLabel::Background}, {6, StateLabel::Transformed},
                  {8, StateLabel::Actionable}};
    std::size_t total = 0;
    for (const StateLabel c : {StateLabel::Actionable, StateLabel::Transformed,
                               StateLabel::Ambiguous, StateLabel::Background})
        total += index_set(seq, c).size();
    CHECK(total == seq.labels.size());
}

TEST_CASE("validate_clip catches model violations") {
    ClipRecord clip = fixtures::clip_skeleton("c0", "chop", 4, 2, 2);
    clip.masklets.push_back(make_masklet("t0", {simple_region(0), simple_region(3)}));
    CHECK_NOTHROW(validate_clip(clip));

    SUBCASE("frame index out of range") {
        clip.masklets[0].regions[1].frame_index = 4;
        CHECK_THROWS_WITH_AS(validate_clip(clip),
                             doctest::Contains("frame_index out of range"), ValidationError);
    }
    SUBCASE("duplicate track ids") {
        clip.masklets.push_back(make_masklet("t0", {simple_region(1)}));
        CHECK_THROWS_WITH_AS(validate_clip(clip), doctest::Contains("duplicate track_id"),
                             ValidationError);
    }
    SUBCASE("mask grid mismatch") {
        clip.masklets[0].regions[0].mask = fixtures::mask_of({"100", "000"});
        CHECK_THROWS_WITH_AS(validate_clip(clip),
                             doctest::Contains("does not match clip grid"), ValidationError);
    }
    SUBCASE("overlapping ground truth is rejected at validation") {
        GroundTruthFrame gt;
        gt.frame_index = 0;
        gt.actionable = fixtures::mask_of({"11", "00"});
        gt.transformed = fixtures::mask_of({"01", "10"});
        clip.ground_truth.push_back(gt);
        CHECK_THROWS_WITH_AS(validate_clip(clip), doctest::Contains("overlap"),
                             ValidationError);
    }
    SUBCASE("disjoint ground truth is fine") {
        GroundTruthFrame gt;
        gt.frame_index = 0;
        gt.actionable = fixtures::mask_of({"11", "00"});
        gt.transformed = fixtures::mask_of({"00", "10"});
        clip.ground_truth.push_back(gt);
        CHECK_NOTHROW(validate_clip(clip));
    }
    SUBCASE("phase length mismatch") {
        clip.frame_phases = {FramePhase::Initial};
        CHECK_THROWS_AS(validate_clip(clip), ValidationError);
    }
    SUBCASE("errors carry clip, track and frame coordinates") {
        clip.masklets[0].regions[1].mask = PixelMask{2, 2, {5}};
        try {
            validate_clip(clip, "some/file.json");
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("some/file.json") != std::string::npos);
            CHECK(what.find("clip 'c0'") != std::string::npos);
            CHECK(what.find("track 't0'") != std::string::npos);
            CHECK(what.find("frame 3") != std::string::npos);
        }
    }
}

TEST_CASE("gt_at finds frames by index") {
    ClipRecord clip = fixtures::clip_skeleton("c0", "chop", 10, 2, 2);
    for (const int f : {1, 4, 7}) {
        GroundTruthFrame gt;
        gt.frame_index = f;
        gt.actionable = fixtures::mask_of({"10", "00"});
        gt.transformed = fixtures::mask_of({"00", "01"});
        clip.ground_truth.push_back(gt);
    }
    CHECK(clip.gt_at(4) != nullptr);
    CHECK(clip.gt_at(4)->frame_index == 4);
    CHECK(clip.gt_at(0) == nullptr);
    CHECK(clip.gt_at(9) == nullptr);
}
