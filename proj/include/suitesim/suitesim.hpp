#pragma once

/// Umbrella header: benchmark-suite similarity and performance-model
/// generalizability toolkit.
///
///   corpus    - feature/performance table ingestion, z-score normalization
///   kmeans    - k-means clustering with silhouette / elbow k selection
///   coverage  - suite coverage matrices, cosine similarity, dendrograms
///   forest    - random-forest regression and cross-suite MDAE evaluation
///   analysis  - synthetic corpora, MIS suite selection, generalizability report
///   pipeline  - end-to-end runs with staged, hashed file artifacts

#include "suitesim/analysis.hpp"
#include "suitesim/artifacts.hpp"
#include "suitesim/corpus.hpp"
#include "suitesim/coverage.hpp"
#include "suitesim/csv.hpp"
#include "suitesim/error.hpp"
#include "suitesim/forest.hpp"
#include "suitesim/kmeans.hpp"
#include "suitesim/pipeline.hpp"
#include "suitesim/rng.hpp"
#include "suitesim/svg.hpp"
