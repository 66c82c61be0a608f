// Generated by tests/oracles/generate_oracles.py. Do not edit.
#pragma once
#include <cstdint>
namespace oracle {
inline constexpr std::uint64_t kRngSeed7Stream0[] = {2952963671551006933ULL, 9283610527467306395ULL, 3516638961227481401ULL, 5052503599182736961ULL, 4223285079775613183ULL};
inline constexpr double kRngSeed7Stream3Uniform[] = {0.5232154466084759, 0.18287566015251033, 0.42276517589305473, 0.9908670109871967};
inline constexpr double kPushSeed7Episode0Scene[] = {0.48767697496143125, -0.031079314796764002, 0.21381737973375625};
inline constexpr double kTwoDiscScene[] = {0.2691924374035781, -0.12431725918705601, 0.2276347594675125, 0.11762886563677044, 0.1491939082543175, 0.24164727838444025, 0.0, 1.0};
inline constexpr double kReachSeed7Episode2Goal[] = {0.5162125794596145, 0.005629785090442152};
inline constexpr double kFkJointCases[] = {0.0, 1.5, 0.3, -1.1, -2.0, 2.5};
inline constexpr double kFkEndEffector[] = {0.5282948806670812, 0.3989979946416218, 0.7563509283016692, -0.13918233302913938, 0.1429596064825779, -0.26287849797115964};
inline constexpr double kFkJacobian[] = {-0.3989979946416218, -0.3989979946416218, 0.5282948806670812, 0.028294880667081166, 0.13918233302913938, 0.28694243635980915, 0.7563509283016692, 0.2786826837388662, 0.26287849797115964, -0.1917702154416812, 0.1429596064825779, 0.3510330247561491};
inline constexpr double kFk3Joints[] = {0.3, -0.2, 0.5};
inline constexpr double kFk3EndEffector[] = {1.6914059364311715, 0.5221732046751827};
inline constexpr double kPushTrace[] = {0.002, 1.498, 0.2, -0.19999999999999996, 0.5782661279020218, 0.39833230903377537, 0.00558, 1.49442, 0.358, -0.35799999999999993, 0.5782661279020218, 0.39833230903377537, 0.0103882, 1.4896118, 0.48081999999999997, -0.48081999999999997, 0.5782661279020218, 0.39833230903377537};
inline constexpr double kRidgeLambda = 0.05;
inline constexpr double kRidgeWeights[] = {0.6983563610718466, -0.1975076191338474, 0.09988292955075101, -0.3985696329590062, 0.8911695088098874, -0.2993266445763498};
inline constexpr const char* kSha256Abc = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
inline constexpr const char* kWsAcceptForSampleNonce = "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=";
}  // namespace oracle
