#ifndef RETINT_RETINT_HPP
#define RETINT_RETINT_HPP

// Volatility return-interval analysis: event extraction above a threshold,
// scaled interval distributions, conditional memory statistics, cluster
// runs, and synthetic reference series.

#include "retint/clusters.hpp"
#include "retint/config.hpp"
#include "retint/csv.hpp"
#include "retint/distribution.hpp"
#include "retint/error.hpp"
#include "retint/fft.hpp"
#include "retint/intervals.hpp"
#include "retint/ks.hpp"
#include "retint/memory.hpp"
#include "retint/output.hpp"
#include "retint/pipeline.hpp"
#include "retint/random.hpp"
#include "retint/series.hpp"
#include "retint/synthetic.hpp"
#include "retint/time.hpp"

#endif // RETINT_RETINT_HPP
