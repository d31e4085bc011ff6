#pragma once

#include "../oracles.hpp"
#include "orbitclt/harness.hpp"

#include <chrono>
#include <string>

struct Verdict {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int digits = 4);

Verdict criterion_1();
Verdict criterion_2();
Verdict criterion_3();
Verdict criterion_4();
Verdict criterion_5_6_7(Verdict& six, Verdict& seven);
Verdict criterion_8();
Verdict criterion_9();
Verdict criterion_10();
Verdict criterion_11();

/// KS values nonincreasing except for at most one rise of at most 0.01.
bool nonincreasing_with_noise(const std::vector<double>& values);
