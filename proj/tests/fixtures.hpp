#pragma once

// Block 58 of the reference example, completed into a one-block show.

#include "mmalign/timeline.hpp"

namespace fixture {

using namespace mmalign;

inline ShowTimeline block58_show() {
  TopicBlock b;
  b.block_id = 58;
  b.span = TimedSpan(3480.0, 3540.0);
  b.topic_id = 6;
  b.text = "marriage gender roles";
  b.embedding.assign(kEmbeddingDim, 0.0);
  b.embedding[0] = 0.6;
  b.embedding[1] = -0.8;
  b.laugh_events = {LaughterEvent{TimedSpan(3482.4, 3485.6), LaughType::laughter, 0.92}};
  PoseFrame p;
  p.time = 3483.0;
  p.has_detection = true;
  p.bbox = BoundingBox{412, 28, 895, 716};
  p.keypoints[joint::left_shoulder] = Point2{634.2, 182.5};
  p.keypoints[joint::left_wrist] = Point2{710.8, 480.3};
  b.pose_keypoints = {p};
  b.shot_events = {ShotFrame{3483.0, ShotLabel::full_shot, 3, 0.97}};

  ShowTimeline show;
  show.show_id = "1";
  show.timeline = {b};
  return show;
}

}  // namespace fixture
