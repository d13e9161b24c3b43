#pragma once

#include "sememe/attention.hpp"
#include "sememe/autoencoder.hpp"
#include "sememe/checkpoint.hpp"
#include "sememe/config.hpp"
#include "sememe/corpus.hpp"
#include "sememe/dcn.hpp"
#include "sememe/embeddings.hpp"
#include "sememe/error.hpp"
#include "sememe/kmeans.hpp"
#include "sememe/pipeline.hpp"
#include "sememe/report.hpp"
#include "sememe/rng.hpp"
#include "sememe/sid.hpp"
#include "sememe/tensor.hpp"
