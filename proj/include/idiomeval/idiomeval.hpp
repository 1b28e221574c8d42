#pragma once

// Umbrella header for the idiomeval toolkit.

#include "idiomeval/aligner.hpp"
#include "idiomeval/apt_eval.hpp"
#include "idiomeval/corpus.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/eval.hpp"
#include "idiomeval/lexicon.hpp"
#include "idiomeval/litter.hpp"
#include "idiomeval/matcher.hpp"
#include "idiomeval/metrics.hpp"
#include "idiomeval/normalize.hpp"
#include "idiomeval/report.hpp"
#include "idiomeval/tokenize.hpp"
#include "idiomeval/version.hpp"
