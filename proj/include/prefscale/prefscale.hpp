#ifndef PREFSCALE_PREFSCALE_HPP
#define PREFSCALE_PREFSCALE_HPP

#include "prefscale/colloc.hpp"
#include "prefscale/corpus.hpp"
#include "prefscale/error.hpp"
#include "prefscale/eval.hpp"
#include "prefscale/goldscore.hpp"
#include "prefscale/pipeline.hpp"
#include "prefscale/random.hpp"
#include "prefscale/synth.hpp"
#include "prefscale/train.hpp"

#endif  // PREFSCALE_PREFSCALE_HPP
