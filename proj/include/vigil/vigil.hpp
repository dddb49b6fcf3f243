#pragma once

// Umbrella header for the vigilance-state classification toolkit.

#include "vigil/adam.hpp"
#include "vigil/common.hpp"
#include "vigil/csv.hpp"
#include "vigil/dataset.hpp"
#include "vigil/decision_tree.hpp"
#include "vigil/dft.hpp"
#include "vigil/logistic_regression.hpp"
#include "vigil/metrics.hpp"
#include "vigil/mlp.hpp"
#include "vigil/model.hpp"
#include "vigil/model_json.hpp"
#include "vigil/naive_bayes.hpp"
#include "vigil/pipeline.hpp"
#include "vigil/random_forest.hpp"
#include "vigil/report.hpp"
#include "vigil/rng.hpp"
#include "vigil/scaler.hpp"
#include "vigil/signal_features.hpp"
#include "vigil/synthetic.hpp"
