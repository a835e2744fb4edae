#ifndef MANISTOCH_HPP
#define MANISTOCH_HPP

#include "manistoch/atlas.hpp"
#include "manistoch/brownian.hpp"
#include "manistoch/chart.hpp"
#include "manistoch/config.hpp"
#include "manistoch/errors.hpp"
#include "manistoch/field.hpp"
#include "manistoch/flow.hpp"
#include "manistoch/geodesic.hpp"
#include "manistoch/manifold.hpp"
#include "manistoch/maximal.hpp"
#include "manistoch/mollify.hpp"
#include "manistoch/parallel.hpp"
#include "manistoch/random.hpp"
#include "manistoch/report.hpp"
#include "manistoch/sampling.hpp"
#include "manistoch/sobolev.hpp"
#include "manistoch/stats.hpp"

#include "manistoch/experiments/cauchy.hpp"
#include "manistoch/experiments/density.hpp"
#include "manistoch/experiments/distance.hpp"
#include "manistoch/experiments/flow_demo.hpp"
#include "manistoch/experiments/geometry.hpp"
#include "manistoch/experiments/maximal.hpp"
#include "manistoch/experiments/mollify.hpp"
#include "manistoch/experiments/pushforward.hpp"
#include "manistoch/experiments/quasi_invariance.hpp"
#include "manistoch/experiments/stability.hpp"
#include "manistoch/experiments/wong_zakai.hpp"

#endif  // MANISTOCH_HPP
