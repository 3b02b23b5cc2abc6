#ifndef FEDGP_FEDGP_HPP
#define FEDGP_FEDGP_HPP

#include <fedgp/common.hpp>
#include <fedgp/kernels.hpp>
#include <fedgp/linalg.hpp>
#include <fedgp/gp.hpp>
#include <fedgp/metrics.hpp>
#include <fedgp/federation.hpp>
#include <fedgp/synth.hpp>
#include <fedgp/csv.hpp>
#include <fedgp/config.hpp>
#include <fedgp/experiment.hpp>

#endif  // FEDGP_FEDGP_HPP
