#pragma once

// Umbrella header: location-specific user-set expansion and classification.
//
// The pieces, bottom up:
//   link_energy      pairwise label energies on follow links
//   profile_energy   per-user label energies from profile evidence
//   features         binary profile features and the A-E categorizer
//   graph_cut        exact MAP labeling via s-t minimum cut
//   logistic         regularized logistic profile model training
//   geo              haversine distances and geo ground truth
//   roc              ROC curves and AUC
//   engine           the budgeted expand-classify crawl loop
//   synthnet         synthetic social worlds with planted structure
//   report           sweeps, term frequencies, CSV/JSON outputs
//   config           the JSON configuration file

#include "locset/config.hpp"
#include "locset/dataset.hpp"
#include "locset/datasource.hpp"
#include "locset/engine.hpp"
#include "locset/features.hpp"
#include "locset/geo.hpp"
#include "locset/graph_cut.hpp"
#include "locset/link_energy.hpp"
#include "locset/logistic.hpp"
#include "locset/maxflow.hpp"
#include "locset/profile_energy.hpp"
#include "locset/report.hpp"
#include "locset/rng.hpp"
#include "locset/roc.hpp"
#include "locset/snapshot_io.hpp"
#include "locset/synthnet.hpp"
#include "locset/types.hpp"
#include "locset/util.hpp"
