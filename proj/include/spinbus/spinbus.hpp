#pragma once

#include "spinbus/dynamics.hpp"
#include "spinbus/entanglement.hpp"
#include "spinbus/error.hpp"
#include "spinbus/graph.hpp"
#include "spinbus/graph_io.hpp"
#include "spinbus/hamiltonian.hpp"
#include "spinbus/optimizer.hpp"
#include "spinbus/report.hpp"
#include "spinbus/symmetry.hpp"
