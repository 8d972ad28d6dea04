#pragma once

#include "ddos/dataset.hpp"
#include "ddos/error.hpp"
#include "ddos/framing.hpp"
#include "ddos/grid_search.hpp"
#include "ddos/kernel.hpp"
#include "ddos/kmeans.hpp"
#include "ddos/krr.hpp"
#include "ddos/logistic.hpp"
#include "ddos/metrics.hpp"
#include "ddos/mlp.hpp"
#include "ddos/model_io.hpp"
#include "ddos/pipeline.hpp"
#include "ddos/svr.hpp"
#include "ddos/traffic.hpp"
