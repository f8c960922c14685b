#pragma once

#include "seqpoint/error.hpp"
#include "seqpoint/kmeans.hpp"
#include "seqpoint/methods.hpp"
#include "seqpoint/oracle.hpp"
#include "seqpoint/projection.hpp"
#include "seqpoint/random.hpp"
#include "seqpoint/report.hpp"
#include "seqpoint/selection.hpp"
#include "seqpoint/seqpoint_set.hpp"
#include "seqpoint/serialize.hpp"
#include "seqpoint/synth.hpp"
#include "seqpoint/trace.hpp"
#include "seqpoint/trace_io.hpp"
