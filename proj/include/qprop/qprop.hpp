#pragma once

#include "qprop/linalg.hpp"
#include "qprop/quantum_state.hpp"
#include "qprop/ansatz.hpp"
#include "qprop/mky.hpp"
#include "qprop/bounds.hpp"
#include "qprop/evolution.hpp"
#include "qprop/io.hpp"
#include "qprop/instances.hpp"
