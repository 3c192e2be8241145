#pragma once

#include "sdp/corpus_io.hpp"
#include "sdp/cycle_guard.hpp"
#include "sdp/decoder.hpp"
#include "sdp/eval.hpp"
#include "sdp/external_embeddings.hpp"
#include "sdp/graph.hpp"
#include "sdp/linear_fit.hpp"
#include "sdp/model_config.hpp"
#include "sdp/scorer.hpp"
#include "sdp/synth.hpp"
#include "sdp/train.hpp"
#include "sdp/transitions.hpp"
