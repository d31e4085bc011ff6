#include "common.hpp"

#include <cstdio>
#include <exception>
#include <functional>

std::string fmt(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

bool nonincreasing_with_noise(const std::vector<double>& values)
{
    int rises = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double up = values[i] - values[i - 1];
        if (up > 0.0) {
            if (up > 0.01)
                return false;
            ++rises;
        }
    }
    return rises <= 1;
}

namespace {

Verdict guarded(const std::function<Verdict()>& f)
{
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

} // namespace

int main()
{
    std::vector<std::pair<int, Verdict>> rows;
    rows.emplace_back(1, guarded(criterion_1));
    rows.emplace_back(2, guarded(criterion_2));
    rows.emplace_back(3, guarded(criterion_3));
    rows.emplace_back(4, guarded(criterion_4));
    Verdict six, seven;
    rows.emplace_back(5, guarded([&] { return criterion_5_6_7(six, seven); }));
    rows.emplace_back(6, six);
    rows.emplace_back(7, seven);
    rows.emplace_back(8, guarded(criterion_8));
    rows.emplace_back(9, guarded(criterion_9));
    rows.emplace_back(10, guarded(criterion_10));
    rows.emplace_back(11, guarded(criterion_11));
    bool all = true;
    for (const auto& [id, v] : rows) {
        std::printf("criterion %d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        all = all && v.pass;
    }
    std::fflush(stdout);
    return all ? 0 : 1;
}
