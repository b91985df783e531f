#ifndef SR_SR_HPP
#define SR_SR_HPP

#include "sr/analysis.hpp"
#include "sr/neighborhood_checks.hpp"
#include "sr/problems/calibrator.hpp"
#include "sr/problems/facility.hpp"
#include "sr/problems/toy.hpp"
#include "sr/rng.hpp"
#include "sr/ruler.hpp"
#include "sr/schedule.hpp"
#include "sr/search.hpp"

#endif // SR_SR_HPP
