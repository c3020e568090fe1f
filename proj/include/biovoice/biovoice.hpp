#pragma once

// Umbrella header: the full engagement-prediction library.

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/core/parallel.hpp"
#include "biovoice/core/rng.hpp"

#include "biovoice/io/manifest.hpp"
#include "biovoice/io/session.hpp"
#include "biovoice/io/track.hpp"
#include "biovoice/io/wav.hpp"

#include "biovoice/dsp/fft.hpp"
#include "biovoice/dsp/spectral.hpp"

#include "biovoice/eda/cvxeda.hpp"

#include "biovoice/cardio/bandpass.hpp"
#include "biovoice/cardio/pulse.hpp"

#include "biovoice/features/extract.hpp"

#include "biovoice/label/labeling.hpp"

#include "biovoice/ml/classifier.hpp"
#include "biovoice/ml/decision_tree.hpp"
#include "biovoice/ml/impute.hpp"
#include "biovoice/ml/kmeans.hpp"
#include "biovoice/ml/mlp.hpp"
#include "biovoice/ml/naive_bayes.hpp"
#include "biovoice/ml/random_forest.hpp"
#include "biovoice/ml/scaler.hpp"
#include "biovoice/ml/smote.hpp"
#include "biovoice/ml/svm.hpp"

#include "biovoice/eval/harness.hpp"
#include "biovoice/eval/metrics.hpp"
#include "biovoice/eval/report.hpp"
#include "biovoice/eval/split.hpp"
#include "biovoice/eval/stats.hpp"
#include "biovoice/eval/tune.hpp"

#include "biovoice/synth/generate.hpp"

#include "biovoice/pipeline.hpp"
