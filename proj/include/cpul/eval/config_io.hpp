#pragma once

#include <string>

#include "cpul/eval/experiment.hpp"

namespace cpul::eval {

// Experiment configuration document (JSON object). Keys:
//   dataset_name, dataset (path to a dataset file) | case (path to a case
//   file) | case_spec {topology, buses, seed, congestion_target},
//   global_range, local_range, primal_regularization, dual_regularization,
//   data_seed, n_train, n_cal, n_test, n_repeats, alphas, methods,
//   reserved_fraction, ell_grid, base_seed, jobs.
// Relative paths resolve against `base_dir`. Unknown keys and bad values
// throw cpul::UsageError; unreadable referenced files throw cpul::Error.
ExperimentConfig config_from_json(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace cpul::eval
