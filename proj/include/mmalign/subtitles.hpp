#pragma once

// SRT / WebVTT parsing, cue text normalization, duration-targeted text
// blocks, tokenization and stopword removal.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign {

struct SubtitleCue {
  int index = 0;
  TimedSpan span{0.0, 1.0};
  std::string raw_text;
  std::string clean_text;

  friend bool operator==(const SubtitleCue&, const SubtitleCue&) = default;
};

struct TextBlock {
  TimedSpan span{0.0, 1.0};
  std::string text;
  std::vector<std::string> tokens;

  friend bool operator==(const TextBlock&, const TextBlock&) = default;
};

// ---------------------------------------------------------------------------
// UTF-8 helpers

namespace utf8 {

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

/// Decodes the code point at s[i], advancing i. Returns nullopt on an invalid
/// sequence (i is left unchanged).
inline std::optional<char32_t> next(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len;
  char32_t cp;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return std::nullopt;
  }
  if (i + len > s.size()) return std::nullopt;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  i += len;
  return cp;
}

inline bool valid(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (!next(s, i)) return false;
  }
  return true;
}

inline std::vector<char32_t> decode(std::string_view s) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    auto cp = next(s, i);
    if (!cp) {
      out.push_back(0xFFFD);
      ++i;
    } else {
      out.push_back(*cp);
    }
  }
  return out;
}

}  // namespace utf8

/// Strips a UTF-8 BOM and returns valid UTF-8. Bytes that are not valid UTF-8
/// are reinterpreted as Latin-1, with a warning.
inline std::string decode_text(std::string_view bytes, Warnings* warnings = nullptr) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (utf8::valid(bytes)) return std::string(bytes);
  if (warnings) warnings->add("input is not valid UTF-8; decoded as Latin-1");
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 4);
  for (char c : bytes) utf8::append(out, static_cast<unsigned char>(c));
  return out;
}

// ---------------------------------------------------------------------------
// Cue text normalization

namespace detail {

inline bool is_space_cp(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x202F || c == 0x205F || c == 0x3000;
}

inline bool is_apostrophe_variant(char32_t c) {
  return c == 0x2019 || c == 0x2018 || c == 0x02BC || c == 0x0060 || c == 0x00B4 || c == 0x2032 || c == 0xFF07;
}

inline std::string decode_entities(std::string_view s) {
  static constexpr std::pair<std::string_view, std::string_view> kEntities[] = {
      {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&nbsp;", " "}, {"&quot;", "\""}, {"&apos;", "'"}, {"&#39;", "'"},
      {"&lrm;", ""},  {"&rlm;", ""}};
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      bool matched = false;
      for (const auto& [from, to] : kEntities) {
        if (s.substr(i, from.size()) == from) {
          out += to;
          i += from.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += s[i++];
  }
  return out;
}

}  // namespace detail

/// Removes markup tags and {\...} formatting codes, standardizes apostrophes,
/// decodes the common HTML entities and collapses whitespace.
inline std::string clean_cue_text(std::string_view raw) {
  std::string stripped;
  stripped.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    if (raw[i] == '<') {
      const auto close = raw.find('>', i + 1);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    }
    if (raw[i] == '{' && i + 1 < raw.size() && raw[i + 1] == '\\') {
      const auto close = raw.find('}', i + 2);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    }
    stripped += raw[i++];
  }
  // ASS-style line breaks inside text.
  for (std::size_t p; (p = stripped.find("\\N")) != std::string::npos;) stripped.replace(p, 2, " ");
  stripped = detail::decode_entities(stripped);

  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (char32_t c : utf8::decode(stripped)) {
    if (detail::is_space_cp(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    utf8::append(out, detail::is_apostrophe_variant(c) ? char32_t{'\''} : c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find_first_of("\r\n", pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + ((text[nl] == '\r' && nl + 1 < text.size() && text[nl + 1] == '\n') ? 2 : 1);
    if (pos == text.size()) break;
  }
  return lines;
}

inline bool is_blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

struct RawBlock {
  std::size_t first_line;  // 1-based
  std::vector<std::string_view> lines;
};

inline std::vector<RawBlock> split_blocks(std::string_view text) {
  std::vector<RawBlock> blocks;
  const auto lines = split_lines(text);
  RawBlock cur{0, {}};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) {
      if (!cur.lines.empty()) blocks.push_back(std::move(cur));
      cur = RawBlock{0, {}};
      continue;
    }
    if (cur.lines.empty()) cur.first_line = i + 1;
    cur.lines.push_back(lines[i]);
  }
  if (!cur.lines.empty()) blocks.push_back(std::move(cur));
  return blocks;
}

inline std::optional<std::int64_t> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

/// "[HH:]MM:SS<sep>mmm" to integer milliseconds.
inline std::optional<std::int64_t> parse_clock(std::string_view s, bool hours_required, std::string_view seps) {
  s = trim(s);
  const auto frac_pos = s.find_first_of(seps);
  if (frac_pos == std::string_view::npos) return std::nullopt;
  const auto millis = s.substr(frac_pos + 1);
  if (millis.size() != 3) return std::nullopt;
  const auto ms = parse_uint(millis);

  std::vector<std::string_view> parts;
  std::string_view clock = s.substr(0, frac_pos);
  std::size_t pos = 0;
  while (true) {
    const auto colon = clock.find(':', pos);
    parts.push_back(clock.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 2 && hours_required) return std::nullopt;
  if (parts.size() != 2 && parts.size() != 3) return std::nullopt;
  std::int64_t h = 0;
  if (parts.size() == 3) {
    auto hv = parse_uint(parts[0]);
    if (!hv) return std::nullopt;
    h = *hv;
  }
  const auto& mm = parts[parts.size() - 2];
  const auto& ss = parts[parts.size() - 1];
  if (mm.size() != 2 || ss.size() != 2) return std::nullopt;
  auto m = parse_uint(mm);
  auto sec = parse_uint(ss);
  if (!m || !sec || !ms || *m > 59 || *sec > 59) return std::nullopt;
  return ((h * 60 + *m) * 60 + *sec) * 1000 + *ms;
}

struct Timing {
  std::int64_t start_ms;
  std::int64_t end_ms;
};

inline std::optional<Timing> parse_timing_line(std::string_view line, bool vtt) {
  const auto arrow = line.find("-->");
  if (arrow == std::string_view::npos) return std::nullopt;
  std::string_view left = line.substr(0, arrow);
  std::string_view right = trim(line.substr(arrow + 3));
  // Cue settings follow the end timestamp after whitespace.
  const auto ws = right.find_first_of(" \t");
  if (ws != std::string_view::npos) right = right.substr(0, ws);
  const auto start = parse_clock(left, !vtt, vtt ? "." : ",.");
  const auto end = parse_clock(right, !vtt, vtt ? "." : ",.");
  if (!start || !end) return std::nullopt;
  return Timing{*start, *end};
}

inline std::string join_lines(const std::vector<std::string_view>& lines, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < lines.size(); ++i) {
    if (i > from) out += '\n';
    out += lines[i];
  }
  return out;
}

inline std::optional<SubtitleCue> make_cue(int index, const Timing& t, std::string raw) {
  if (t.end_ms <= t.start_ms) return std::nullopt;
  SubtitleCue cue{index, TimedSpan(static_cast<double>(t.start_ms) / 1000.0, static_cast<double>(t.end_ms) / 1000.0),
                  std::move(raw), ""};
  cue.clean_text = clean_cue_text(cue.raw_text);
  return cue;
}

inline void sort_cues(std::vector<SubtitleCue>& cues) {
  std::stable_sort(cues.begin(), cues.end(),
                   [](const SubtitleCue& a, const SubtitleCue& b) { return a.span.start() < b.span.start(); });
}

}  // namespace detail

/// Parses SubRip content. Malformed cue blocks after the first are skipped and
/// reported through `warnings`; an unreadable first cue is a ParseError.
inline std::vector<SubtitleCue> parse_srt(std::string_view bytes, Warnings* warnings = nullptr) {
  const std::string text = decode_text(bytes, warnings);
  std::vector<SubtitleCue> cues;
  const auto blocks = detail::split_blocks(text);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    std::size_t timing_at = 0;
    int index = static_cast<int>(cues.size()) + 1;
    if (blk.lines[0].find("-->") == std::string_view::npos) {
      auto idx = detail::parse_uint(detail::trim(blk.lines[0]));
      if (idx) index = static_cast<int>(*idx);
      timing_at = 1;
    }
    std::optional<detail::Timing> timing;
    if (timing_at < blk.lines.size()) timing = detail::parse_timing_line(blk.lines[timing_at], false);
    if (!timing) {
      if (b == 0) throw ParseError(blk.first_line + timing_at, "expected SRT timing line 'HH:MM:SS,mmm --> HH:MM:SS,mmm'");
      if (warnings) warnings->add("line " + std::to_string(blk.first_line) + ": malformed cue skipped");
      continue;
    }
    auto cue = detail::make_cue(index, *timing, detail::join_lines(blk.lines, timing_at + 1));
    if (!cue) {
      if (warnings) warnings->add("line " + std::to_string(blk.first_line) + ": cue with end <= start skipped");
      continue;
    }
    cues.push_back(std::move(*cue));
  }
  detail::sort_cues(cues);
  return cues;
}

/// Parses WebVTT content. NOTE, STYLE and REGION blocks are skipped; cue
/// settings after the end timestamp are discarded.
inline std::vector<SubtitleCue> parse_vtt(std::string_view bytes, Warnings* warnings = nullptr) {
  const std::string text = decode_text(bytes, warnings);
  const auto blocks = detail::split_blocks(text);
  auto header_ok = [&] {
    if (blocks.empty() || blocks[0].first_line != 1) return false;
    const auto first = blocks[0].lines[0];
    if (first.substr(0, 6) != "WEBVTT") return false;
    return first.size() == 6 || first[6] == ' ' || first[6] == '\t';
  };
  if (!header_ok()) throw ParseError(1, "missing WEBVTT header");

  auto starts_with_keyword = [](std::string_view line, std::string_view kw) {
    return line.substr(0, kw.size()) == kw && (line.size() == kw.size() || line[kw.size()] == ' ' || line[kw.size()] == '\t');
  };

  std::vector<SubtitleCue> cues;
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const auto first = blk.lines[0];
    if (starts_with_keyword(first, "NOTE") || starts_with_keyword(first, "STYLE") ||
        starts_with_keyword(first, "REGION")) {
      continue;
    }
    std::size_t timing_at = 0;
    int index = static_cast<int>(cues.size()) + 1;
    if (first.find("-->") == std::string_view::npos) {
      if (auto idx = detail::parse_uint(detail::trim(first))) index = static_cast<int>(*idx);
      timing_at = 1;
    }
    std::optional<detail::Timing> timing;
    if (timing_at < blk.lines.size()) timing = detail::parse_timing_line(blk.lines[timing_at], true);
    if (!timing) {
      if (warnings) warnings->add("line " + std::to_string(blk.first_line) + ": malformed cue skipped");
      continue;
    }
    auto cue = detail::make_cue(index, *timing, detail::join_lines(blk.lines, timing_at + 1));
    if (!cue) {
      if (warnings) warnings->add("line " + std::to_string(blk.first_line) + ": cue with end <= start skipped");
      continue;
    }
    cues.push_back(std::move(*cue));
  }
  detail::sort_cues(cues);
  return cues;
}

/// Dispatches on content: a WEBVTT header selects the VTT parser.
inline std::vector<SubtitleCue> parse_subtitles(std::string_view bytes, Warnings* warnings = nullptr) {
  std::string_view probe = bytes;
  if (probe.substr(0, 3) == "\xEF\xBB\xBF") probe.remove_prefix(3);
  if (probe.substr(0, 6) == "WEBVTT") return parse_vtt(bytes, warnings);
  return parse_srt(bytes, warnings);
}

// ---------------------------------------------------------------------------
// Tokenization and stopwords

namespace detail {

inline char32_t to_lower_cp(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0x80) return c;
  if ((c >= 0xC0 && c <= 0xDE) && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x17F) {
    // Latin Extended-A pairs upper/lower on even/odd code points, except
    // the 0x139..0x148 and 0x179..0x17E runs which start on odd ones.
    const bool odd_run = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (odd_run) return (c % 2 == 1) ? c + 1 : c;
    if (c == 0x130 || c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F) return c;
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

inline bool is_punct_cp(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) || c == 0xD7 || c == 0xF7 ||
         (c >= 0x2010 && c <= 0x205E) || (c >= 0x3000 && c <= 0x303F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         c == 0xFFFD;
}

}  // namespace detail

/// Whitespace word segmentation over code points, lowercased, with leading
/// and trailing punctuation stripped. Interior punctuation ("don't") stays.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<char32_t> word;
  auto flush = [&] {
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && detail::is_punct_cp(word[b])) ++b;
    while (e > b && detail::is_punct_cp(word[e - 1])) --e;
    if (b < e) {
      std::string tok;
      for (std::size_t i = b; i < e; ++i) utf8::append(tok, detail::to_lower_cp(word[i]));
      tokens.push_back(std::move(tok));
    }
    word.clear();
  };
  for (char32_t c : utf8::decode(text)) {
    if (detail::is_space_cp(c)) {
      flush();
    } else {
      word.push_back(detail::is_apostrophe_variant(c) ? char32_t{'\''} : c);
    }
  }
  flush();
  return tokens;
}

/// Single words plus multi-word phrases ("you know"), stored tokenized.
class StopwordSet {
 public:
  StopwordSet() = default;
  StopwordSet(std::initializer_list<std::string_view> entries) {
    for (auto e : entries) add(e);
  }

  void add(std::string_view entry) {
    auto toks = tokenize(entry);
    if (toks.empty()) return;
    if (toks.size() == 1) {
      words_.insert(std::move(toks[0]));
    } else {
      phrases_.push_back(std::move(toks));
      std::stable_sort(phrases_.begin(), phrases_.end(),
                       [](const auto& a, const auto& b) { return a.size() > b.size(); });
    }
  }

  void merge(const StopwordSet& other) {
    for (const auto& w : other.words_) words_.insert(w);
    for (const auto& p : other.phrases_) {
      std::string joined;
      for (const auto& t : p) joined += t + " ";
      add(joined);
    }
  }

  bool contains_word(const std::string& w) const { return words_.count(w) > 0; }
  std::size_t size() const noexcept { return words_.size() + phrases_.size(); }

  /// Length of the longest phrase matching at tokens[i], or 0.
  std::size_t phrase_at(const std::vector<std::string>& tokens, std::size_t i) const {
    for (const auto& p : phrases_) {
      if (i + p.size() <= tokens.size() && std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        return p.size();
      }
    }
    return 0;
  }

 private:
  std::unordered_set<std::string> words_;
  std::vector<std::vector<std::string>> phrases_;
};

/// One entry per line; '#' starts a comment.
inline StopwordSet load_stopwords(std::string_view text) {
  StopwordSet set;
  for (auto line : detail::split_lines(text)) {
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (!line.empty()) set.add(line);
  }
  return set;
}

inline std::vector<std::string> remove_stopwords(std::string_view text, const StopwordSet& stopwords) {
  const auto tokens = tokenize(text);
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size();) {
    if (const auto n = stopwords.phrase_at(tokens, i)) {
      i += n;
      continue;
    }
    if (!stopwords.contains_word(tokens[i])) kept.push_back(tokens[i]);
    ++i;
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {

/// HH:MM:SS<sep>mmm from seconds, rounded to the millisecond.
inline std::string format_clock(double seconds, char sep) {
  const auto ms = static_cast<std::int64_t>(std::llround(seconds * 1000.0));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld%c%03lld", static_cast<long long>(ms / 3600000),
                static_cast<long long>(ms / 60000 % 60), static_cast<long long>(ms / 1000 % 60), sep,
                static_cast<long long>(ms % 1000));
  return buf;
}

}  // namespace detail

/// Serializes cues as SubRip, numbering them from 1 in order.
inline std::string write_srt(const std::vector<SubtitleCue>& cues) {
  std::string out;
  int n = 0;
  for (const auto& c : cues) {
    out += std::to_string(++n) + "\n";
    out += detail::format_clock(c.span.start(), ',') + " --> " + detail::format_clock(c.span.end(), ',') + "\n";
    out += c.raw_text + "\n\n";
  }
  return out;
}

inline std::string write_vtt(const std::vector<SubtitleCue>& cues) {
  std::string out = "WEBVTT\n\n";
  int n = 0;
  for (const auto& c : cues) {
    out += std::to_string(++n) + "\n";
    out += detail::format_clock(c.span.start(), '.') + " --> " + detail::format_clock(c.span.end(), '.') + "\n";
    out += c.raw_text + "\n\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Blocks

/// Groups consecutive cues into blocks. A cue joins the current block iff its
/// start is <= block start + target_duration; otherwise it opens the next one.
/// Block spans are [start, start + target_duration), except the final block
/// which ends at min(start + target_duration, latest cue end in that block).
inline std::vector<TextBlock> build_blocks(const std::vector<SubtitleCue>& cues, double target_duration,
                                           const StopwordSet& stopwords = {}) {
  if (!(target_duration > 0.0)) throw InvariantError("target_duration must be > 0");
  std::vector<TextBlock> blocks;
  if (cues.empty()) return blocks;

  double block_start = cues[0].span.start();
  double last_end = cues[0].span.end();
  std::string text;
  auto close = [&](bool final) {
    const double limit = block_start + target_duration;
    const double end = final ? std::min(limit, last_end) : limit;
    TextBlock blk{TimedSpan(block_start, end), text, remove_stopwords(text, stopwords)};
    blocks.push_back(std::move(blk));
  };

  for (std::size_t i = 0; i < cues.size(); ++i) {
    const auto& cue = cues[i];
    if (i > 0 && cue.span.start() < cues[i - 1].span.start()) throw InvariantError("cues not sorted by start");
    if (i > 0 && cue.span.start() > block_start + target_duration) {
      close(false);
      block_start = cue.span.start();
      last_end = cue.span.end();
      text.clear();
    }
    if (!cue.clean_text.empty()) {
      if (!text.empty()) text += ' ';
      text += cue.clean_text;
    }
    last_end = std::max(last_end, cue.span.end());
  }
  close(true);
  return blocks;
}

}  // namespace mmalign
