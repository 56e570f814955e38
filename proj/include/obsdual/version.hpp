#pragma once

#define OBSDUAL_VERSION "0.1.0"
