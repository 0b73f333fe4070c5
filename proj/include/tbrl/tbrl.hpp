#pragma once

#include "tbrl/errors.hpp"
#include "tbrl/rng.hpp"

#include "tbrl/numcore/adam.hpp"
#include "tbrl/numcore/grad_check.hpp"
#include "tbrl/numcore/layers.hpp"
#include "tbrl/numcore/tensor.hpp"

#include "tbrl/engine/concepts.hpp"
#include "tbrl/engine/env.hpp"
#include "tbrl/engine/game.hpp"
#include "tbrl/engine/oracle.hpp"
#include "tbrl/engine/render.hpp"
#include "tbrl/engine/rules.hpp"
#include "tbrl/engine/vocabulary.hpp"

#include "tbrl/textenc/embedding.hpp"
#include "tbrl/textenc/encoder.hpp"
#include "tbrl/textenc/hash.hpp"
#include "tbrl/textenc/tokenize.hpp"

#include "tbrl/agent/agent.hpp"
#include "tbrl/agent/checkpoint.hpp"
#include "tbrl/agent/config.hpp"
#include "tbrl/agent/qnet.hpp"
#include "tbrl/agent/replay.hpp"

#include "tbrl/perturb/lexicon.hpp"
#include "tbrl/perturb/wrap.hpp"

#include "tbrl/lab/aggregate.hpp"
#include "tbrl/lab/config.hpp"
#include "tbrl/lab/drift.hpp"
#include "tbrl/lab/experiment.hpp"
#include "tbrl/lab/games.hpp"
#include "tbrl/lab/play.hpp"
#include "tbrl/lab/project.hpp"
