/**
 * \file incrack.hpp
 *
 * \brief Umbrella header: a finite crack interacting with a thin rigid
 * inclusion under a point load. Closed-form densities, stress intensity
 * factors, contact tractions and independent verification.
 */
#pragma once

#include "incrack/params.hpp"
#include "incrack/special.hpp"
#include "incrack/quadrature.hpp"
#include "incrack/solver.hpp"
#include "incrack/post.hpp"
#include "incrack/oracle.hpp"
#include "incrack/io.hpp"
#include "incrack/report.hpp"
