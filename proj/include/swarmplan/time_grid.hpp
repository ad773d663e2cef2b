#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace swarmplan {

// All scheduling arithmetic runs on an integer tick grid so that round
// boundaries and sample times stay exact. Seconds only appear when a
// duration is handed to the numerics (discretization) or to output files.
using Ticks = std::int64_t;

struct TimingConfig {
    double tick_s = 1.0 / 3000.0;  // seconds per tick

    Ticks T = 1000;       // round duration, T = T_calc + T_com
    Ticks T_calc = 700;
    Ticks T_com = 300;

    Ticks Ts = 1000;  // input sample time
    Ticks To = 1000;  // objective sample time
    Ticks Tb = 1000;  // state-box sample time
    Ticks Tc = 1000;  // collision sample time

    int H = 15;  // prediction horizon in rounds

    // 0 requests the default gcd(Ts, To, Tb, Tc); any finer divisor of that
    // gcd (and of T) is accepted, e.g. to densify the continuous-time
    // separation check.
    Ticks base_step = 0;

    // Derived horizons, filled by validate().
    int h_s = 0, h_o = 0, h_b = 0, h_c = 0;

    void validate();

    double seconds(Ticks t) const { return static_cast<double>(t) * tick_s; }
    Ticks horizon_end() const { return static_cast<Ticks>(H) * T; }  // HT

    // Number of stored base-step samples of a plan, covering [T, HT+T].
    int plan_samples() const {
        return static_cast<int>(horizon_end() / base_step) + 1;
    }
};

inline void TimingConfig::validate() {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("TimingConfig: " + msg); };

    if (tick_s <= 0.0) fail("tick_s must be positive");
    if (T <= 0 || T_calc <= 0 || T_com <= 0) fail("round durations must be positive");
    if (T != T_calc + T_com) fail("T must equal T_calc + T_com");
    if (Ts <= 0 || To <= 0 || Tb <= 0 || Tc <= 0) fail("sample times must be positive");
    if (H <= 0) fail("H must be positive");

    auto derive = [&](Ticks sample, const char* name) {
        if (T % sample != 0) fail(std::string("T/") + name + " must be a positive integer");
        return static_cast<int>(T / sample) * H;
    };
    h_s = derive(Ts, "Ts");
    h_o = derive(To, "To");
    h_b = derive(Tb, "Tb");
    h_c = derive(Tc, "Tc");

    // All horizons end on the same time HT by construction:
    // h_x * Tx = (T/Tx) * H * Tx = H*T.

    const Ticks g = std::gcd(std::gcd(Ts, To), std::gcd(Tb, Tc));
    if (base_step == 0) base_step = g;
    if (base_step <= 0 || g % base_step != 0) fail("base_step must divide gcd(Ts, To, Tb, Tc)");
    if (T % base_step != 0) fail("T must be a multiple of base_step");
}

}  // namespace swarmplan
