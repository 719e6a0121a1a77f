#pragma once

#include <functional>

#include <gtest/gtest.h>

#include "infoiter/errors.hpp"

inline void expect_code(infoiter::ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << infoiter::error_code_name(code);
  } catch (const infoiter::Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}
