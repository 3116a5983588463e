#pragma once

#include "fgsens/analysis.hpp"
#include "fgsens/case_io.hpp"
#include "fgsens/case_model.hpp"
#include "fgsens/factor.hpp"
#include "fgsens/frequency_db.hpp"
#include "fgsens/ibd.hpp"
#include "fgsens/lp.hpp"
#include "fgsens/marker.hpp"
#include "fgsens/multimarker.hpp"
#include "fgsens/network.hpp"
#include "fgsens/report.hpp"
#include "fgsens/scenarios.hpp"
#include "fgsens/sensitivity.hpp"
#include "fgsens/urn.hpp"
