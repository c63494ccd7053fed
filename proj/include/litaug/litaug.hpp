#pragma once

#include "litaug/augmentor.hpp"
#include "litaug/config.hpp"
#include "litaug/corpus.hpp"
#include "litaug/csv.hpp"
#include "litaug/error.hpp"
#include "litaug/experiment.hpp"
#include "litaug/gateway.hpp"
#include "litaug/http_gateway.hpp"
#include "litaug/kmedoids.hpp"
#include "litaug/leakage.hpp"
#include "litaug/manifest.hpp"
#include "litaug/matcher.hpp"
#include "litaug/metrics.hpp"
#include "litaug/mining.hpp"
#include "litaug/mock_gateway.hpp"
#include "litaug/model.hpp"
#include "litaug/parallel.hpp"
#include "litaug/prompt_template.hpp"
#include "litaug/random.hpp"
#include "litaug/splits.hpp"
#include "litaug/stats.hpp"
#include "litaug/synthesizer.hpp"
#include "litaug/template_miner.hpp"
#include "litaug/text.hpp"
#include "litaug/trainer.hpp"
#include "litaug/triplet.hpp"
#include "litaug/vocabulary.hpp"
