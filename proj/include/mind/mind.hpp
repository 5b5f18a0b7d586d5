#pragma once

// Everything headless. The WebSocket server lives in mind/gateway_server.hpp
// and needs Boost.
#include "mind/action.hpp"
#include "mind/dispatcher.hpp"
#include "mind/error.hpp"
#include "mind/harness.hpp"
#include "mind/hierarchy.hpp"
#include "mind/keyboard.hpp"
#include "mind/planner.hpp"
#include "mind/pointer.hpp"
#include "mind/prediction.hpp"
#include "mind/profile.hpp"
#include "mind/rng.hpp"
#include "mind/session.hpp"
#include "mind/signal.hpp"
