#include <gtest/gtest.h>

#include <random>

#include "mmalign/stopwords.hpp"
#include "mmalign/subtitles.hpp"
#include "oracles.hpp"

using namespace mmalign;

namespace {

constexpr const char* kSrt =
    "\xEF\xBB\xBF"
    "1\r\n"
    "00:00:01,500 --> 00:00:03,000\r\n"
    "<i>Hello</i> &amp; welcome!\r\n"
    "\r\n"
    "2\r\n"
    "00:00:04,000 --> 00:00:06,250\r\n"
    "It\xE2\x80\x99s   a\r\n"
    "{\\an8}two-line cue\r\n"
    "\r\n"
    "3\r\n"
    "00:01:02,000 --> 00:01:04,000\r\n"
    "Last one\r\n";

std::string join_clean(const std::vector<SubtitleCue>& cues) {
  std::string out;
  for (const auto& c : cues) {
    const auto t = clean_cue_text(c.raw_text);
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string join_blocks(const std::vector<TextBlock>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    if (b.text.empty()) continue;
    if (!out.empty()) out += ' ';
    out += b.text;
  }
  return out;
}

SubtitleCue cue_at(double s, const std::string& text) {
  SubtitleCue c;
  c.span = TimedSpan(s, s + 1.0);
  c.raw_text = text;
  c.clean_text = clean_cue_text(text);
  return c;
}

}  // namespace

TEST(Srt, ParsesFixture) {
  const auto cues = parse_srt(kSrt);
  ASSERT_EQ(cues.size(), 3u);
  EXPECT_EQ(cues[0].index, 1);
  EXPECT_DOUBLE_EQ(cues[0].span.start(), 1.5);
  EXPECT_DOUBLE_EQ(cues[1].span.end(), 6.25);
  EXPECT_DOUBLE_EQ(cues[2].span.start(), 62.0);
  EXPECT_EQ(cues[0].clean_text, "Hello & welcome!");
  EXPECT_EQ(cues[1].clean_text, "It's a two-line cue");
}

TEST(Srt, SkipsMalformedCueWithWarning) {
  const std::string text = "1\n00:00:01,000 --> 00:00:02,000\nok\n\n2\nnot a timing\nbad\n\n3\n00:00:05,000 --> 00:00:06,000\nfine\n";
  Warnings w;
  const auto cues = parse_srt(text, &w);
  EXPECT_EQ(cues.size(), 2u);
  EXPECT_EQ(w.count(), 1u);
}

TEST(Srt, UnreadableFirstCueIsAnError) {
  EXPECT_THROW(parse_srt("hello\nworld\n"), ParseError);
}

TEST(Vtt, ParsesHeaderNotesAndSettings) {
  const std::string text =
      "WEBVTT - demo\n\nNOTE a comment\nspanning lines\n\nSTYLE\n::cue { color: red }\n\n"
      "intro\n00:01.000 --> 00:02.500 align:start position:10%\n<v Bob>Hi there</v>\n\n"
      "01:00:00.000 --> 01:00:01.000\nLate\n";
  const auto cues = parse_vtt(text);
  ASSERT_EQ(cues.size(), 2u);
  EXPECT_DOUBLE_EQ(cues[0].span.end(), 2.5);
  EXPECT_EQ(cues[0].clean_text, "Hi there");
  EXPECT_DOUBLE_EQ(cues[1].span.start(), 3600.0);
  EXPECT_THROW(parse_vtt("1\n00:01.000 --> 00:02.000\nx\n"), ParseError);
}

TEST(Subtitles, Latin1FallbackWarns) {
  Warnings w;
  const auto cues = parse_srt("1\n00:00:01,000 --> 00:00:02,000\ncaf\xE9\n", &w);
  ASSERT_EQ(cues.size(), 1u);
  EXPECT_EQ(cues[0].clean_text, "caf\xC3\xA9");
  EXPECT_EQ(w.count(), 1u);
}

TEST(Subtitles, SrtAndVttRoundTripsAgree) {
  std::mt19937_64 g(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto cues = oracle::random_cues(g, 5 + trial * 7);
    const auto srt = parse_srt(write_srt(cues));
    const auto vtt = parse_vtt(write_vtt(cues));
    ASSERT_EQ(srt.size(), cues.size());
    ASSERT_EQ(srt, vtt);
    for (std::size_t i = 0; i < cues.size(); ++i) {
      EXPECT_EQ(srt[i].span, cues[i].span);
      EXPECT_EQ(srt[i].raw_text, cues[i].raw_text);
    }
    EXPECT_EQ(parse_subtitles(write_vtt(cues)), srt);
  }
}

TEST(Blocks, BoundaryRule) {
  const std::vector<SubtitleCue> cues = {cue_at(0, "a"), cue_at(30, "b"), cue_at(59, "c"), cue_at(61, "d")};
  const auto blocks = build_blocks(cues, 60.0);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].text, "a b c");
  EXPECT_EQ(blocks[1].text, "d");
  EXPECT_EQ(blocks[0].span, TimedSpan(0, 60));
  EXPECT_EQ(blocks[1].span, TimedSpan(61, 62));
}

TEST(Blocks, CueExactlyAtLimitJoins) {
  const std::vector<SubtitleCue> cues = {cue_at(0, "a"), cue_at(60, "b"), cue_at(120.5, "c")};
  const auto blocks = build_blocks(cues, 60.0);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].text, "a b");
}

TEST(Blocks, TextIsConservedAndSpansDisjoint) {
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto cues = parse_srt(write_srt(oracle::random_cues(g, 40)));
    const auto blocks = build_blocks(cues, 60.0);
    EXPECT_EQ(join_blocks(blocks), join_clean(cues));
    for (std::size_t i = 1; i < blocks.size(); ++i) EXPECT_LE(blocks[i - 1].span.end(), blocks[i].span.start());
    // Independent count of block openings.
    std::size_t opened = 0;
    double start = -1e9;
    for (const auto& c : cues) {
      if (opened == 0 || c.span.start() > start + 60.0) {
        ++opened;
        start = c.span.start();
      }
    }
    EXPECT_EQ(blocks.size(), opened);
  }
}

TEST(Tokenize, LowercasesAndStripsEdgePunctuation) {
  EXPECT_EQ(tokenize("\"Don't\" STOP, Caf\xC3\x89!"), (std::vector<std::string>{"don't", "stop", "caf\xC3\xA9"}));
  EXPECT_EQ(tokenize("It\xE2\x80\x99s ... ok"), (std::vector<std::string>{"it's", "ok"}));
}

TEST(Stopwords, PhrasesAndWordsRemoved) {
  StopwordSet sw{"the", "you know"};
  EXPECT_EQ(remove_stopwords("You know, the dog knows", sw), (std::vector<std::string>{"dog", "knows"}));
  const auto fillers = builtin_stopwords("fillers-v1");
  EXPECT_EQ(remove_stopwords("um I mean it's like great", fillers), (std::vector<std::string>{"it's", "great"}));
  EXPECT_THROW(builtin_stopwords("klingon"), InputError);
}
