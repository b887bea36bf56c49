#pragma once

// Umbrella header for the full diagnostic pipeline: ingestion, causal
// discovery over alert streams, the outage knowledge graph, the merged CK
// graph, cluster prediction, inference, and evaluation.

#include "ckdiag/alerts.hpp"
#include "ckdiag/ck_graph.hpp"
#include "ckdiag/clustering.hpp"
#include "ckdiag/config.hpp"
#include "ckdiag/cpdag.hpp"
#include "ckdiag/error.hpp"
#include "ckdiag/evaluation.hpp"
#include "ckdiag/indicator.hpp"
#include "ckdiag/inference.hpp"
#include "ckdiag/knowledge_graph.hpp"
#include "ckdiag/math.hpp"
#include "ckdiag/pc.hpp"
#include "ckdiag/pipeline.hpp"
#include "ckdiag/random_forest.hpp"
#include "ckdiag/rng.hpp"
#include "ckdiag/rouge.hpp"
#include "ckdiag/service.hpp"
#include "ckdiag/synthetic.hpp"
#include "ckdiag/text.hpp"
#include "ckdiag/time.hpp"
