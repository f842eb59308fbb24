#pragma once

#include "config.hpp"
#include "controller.hpp"
#include "events.hpp"
#include "hodgkin_huxley.hpp"
#include "input_signal.hpp"
#include "network.hpp"
#include "presets.hpp"
#include "ribar_sepulchre.hpp"
#include "rk4.hpp"
#include "scenario.hpp"
#include "simulate.hpp"
#include "synapse.hpp"
