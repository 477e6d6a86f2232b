#pragma once

#include "bnmf/bench.hpp"
#include "bnmf/error.hpp"
#include "bnmf/graph.hpp"
#include "bnmf/membership.hpp"
#include "bnmf/metrics.hpp"
#include "bnmf/nmf.hpp"
#include "bnmf/report.hpp"
