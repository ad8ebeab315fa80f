#pragma once

#include "rcfd/angle_split.hpp"
#include "rcfd/erf_fit.hpp"
#include "rcfd/error.hpp"
#include "rcfd/fft.hpp"
#include "rcfd/io.hpp"
#include "rcfd/nist.hpp"
#include "rcfd/pipeline.hpp"
#include "rcfd/report.hpp"
#include "rcfd/series.hpp"
#include "rcfd/special.hpp"
#include "rcfd/synth.hpp"
#include "rcfd/topology.hpp"
#include "rcfd/w_statistics.hpp"
