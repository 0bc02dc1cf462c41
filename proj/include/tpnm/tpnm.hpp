#pragma once

// Umbrella header for the TPNM temporal link-prediction library.

#include "tpnm/errors.hpp"
#include "tpnm/eval.hpp"
#include "tpnm/ingest.hpp"
#include "tpnm/model_io.hpp"
#include "tpnm/report.hpp"
#include "tpnm/rng.hpp"
#include "tpnm/tp_matrix.hpp"
#include "tpnm/tppi.hpp"
#include "tpnm/trainer.hpp"
#include "tpnm/types.hpp"
