#pragma once

// Umbrella header for the whole library.

#include "sansum/embeddings.hpp"
#include "sansum/errors.hpp"
#include "sansum/json_io.hpp"
#include "sansum/kmeans.hpp"
#include "sansum/matrix.hpp"
#include "sansum/metrics.hpp"
#include "sansum/pca.hpp"
#include "sansum/rng.hpp"
#include "sansum/summarize.hpp"
#include "sansum/text_prep.hpp"
#include "sansum/utf8.hpp"
