#pragma once

// High-precision reference values; regenerate with tests/oracles/compute_oracles.py.
namespace oracle {

inline constexpr double h_2_1 = 0.43834064119386557178;             // h(2, 1), a = 1
inline constexpr double h_limit_1 = 0.34432045758120152846;         // h(1), a = 1
inline constexpr double h_limit_100 = 9.9970014989509439618e-5;     // h(100), a = 1
inline constexpr double h_diff_2_1_half = -0.19301122782003400551;  // h(2, .5) - h(1, .5), a = 1
inline constexpr double weight_1 = 1.1191003335695823607;           // w(1), a = 1, H = 0.6
inline constexpr double weight_half = 0.99446454664572138457;       // w(0.5), a = 2, H = 0.75
inline constexpr double cell00 = 0.26964908660712584269;            // H = 0.75, [0,1] x [2,3]
inline constexpr double cell11 = 0.34849571379359573137;
inline constexpr double mean_beta_fbm_01 = 0.30405079919836041999;  // a = 0, H = 0.6, eps = 0.1
inline constexpr double mean_beta_fbm_05 = 0.10973051190326026181;  // eps = 0.5
inline constexpr double mean_beta_fbm_02 = 0.20412214974087554808;  // eps = 0.2
inline constexpr double local_time_fbm = 0.99735570100358169485;    // E L_1^z, a = 0, H = 0.6

}  // namespace oracle
