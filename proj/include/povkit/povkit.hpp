#pragma once

#include "povkit/commands.hpp"
#include "povkit/csv.hpp"
#include "povkit/decomp.hpp"
#include "povkit/dist_measures.hpp"
#include "povkit/error.hpp"
#include "povkit/forecaster.hpp"
#include "povkit/index_builder.hpp"
#include "povkit/panel_ols.hpp"
#include "povkit/panel_store.hpp"
#include "povkit/report.hpp"
#include "povkit/synthetic.hpp"
