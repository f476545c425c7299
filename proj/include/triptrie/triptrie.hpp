#pragma once

// Umbrella header.

#include "triptrie/analytics.hpp"
#include "triptrie/corpus_io.hpp"
#include "triptrie/errors.hpp"
#include "triptrie/geo_grid.hpp"
#include "triptrie/ingest.hpp"
#include "triptrie/linkage_oracle.hpp"
#include "triptrie/macro_cluster.hpp"
#include "triptrie/partition.hpp"
#include "triptrie/string_metrics.hpp"
#include "triptrie/symbols.hpp"
#include "triptrie/synthetic.hpp"
#include "triptrie/trip_string.hpp"
#include "triptrie/trip_trie.hpp"
#include "triptrie/wide_uint.hpp"
