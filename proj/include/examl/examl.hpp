#pragma once

// Umbrella header for the examl library.

#include "examl/base64.hpp"
#include "examl/benchmark.hpp"
#include "examl/csv.hpp"
#include "examl/elm.hpp"
#include "examl/ensemble.hpp"
#include "examl/errors.hpp"
#include "examl/folds.hpp"
#include "examl/linalg.hpp"
#include "examl/metrics.hpp"
#include "examl/model_io.hpp"
#include "examl/parallel.hpp"
#include "examl/preprocess.hpp"
#include "examl/protocol.hpp"
#include "examl/random.hpp"
#include "examl/search.hpp"
#include "examl/synthetic.hpp"
