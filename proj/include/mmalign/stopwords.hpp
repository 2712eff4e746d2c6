#pragma once

// Built-in stopword lists, selectable by name next to user-supplied files.

#include <string>
#include <string_view>

#include "mmalign/error.hpp"
#include "mmalign/subtitles.hpp"

namespace mmalign {

inline constexpr std::string_view kEnglishStopwords = R"(
a about above after again against all am an and any are as at be because been before being below between both
but by can could did do does doing down during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself just me more most my myself no nor not now of off on
once only or other our ours ourselves out over own same she should so some such than that the their theirs them
themselves then there these they this those through to too under until up very was we were what when where
which while who whom why will with would you your yours yourself yourselves i'm it's don't that's i've you're
can't didn't he's she's we're they're there's what's let's
)";

/// Spoken fillers common in stand-up transcripts.
inline constexpr std::string_view kFillersV1 = R"(
um
uh
uhm
erm
hmm
mm
oh
ah
yeah
okay
ok
like
gonna
wanna
gotta
kinda
sorta
you know
i mean
sort of
kind of
)";

/// Known list names: "english", "fillers-v1".
inline StopwordSet builtin_stopwords(std::string_view name) {
  std::string_view src;
  if (name == "english") {
    src = kEnglishStopwords;
  } else if (name == "fillers-v1") {
    src = kFillersV1;
  } else {
    throw InputError("unknown built-in stopword list '" + std::string(name) + "'");
  }
  StopwordSet set;
  if (name == "english") {
    for (const auto& w : tokenize(src)) set.add(w);
  } else {
    set = load_stopwords(src);
  }
  return set;
}

}  // namespace mmalign
