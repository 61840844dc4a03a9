#pragma once

#define VACWAVE_VERSION "0.1.0"
