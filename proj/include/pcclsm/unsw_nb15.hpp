#pragma once

#include <string>
#include <vector>

namespace pcclsm::unsw_nb15 {

// Header of the partitioned training CSV (UNSW_NB15_training-set.csv):
// id, 42 features, attack category, binary label.
inline const std::vector<std::string>& training_header() {
    static const std::vector<std::string> header = {
        "id",        "dur",          "proto",        "service",          "state",
        "spkts",     "dpkts",        "sbytes",       "dbytes",           "rate",
        "sttl",      "dttl",         "sload",        "dload",            "sloss",
        "dloss",     "sinpkt",       "dinpkt",       "sjit",             "djit",
        "swin",      "stcpb",        "dtcpb",        "dwin",             "tcprtt",
        "synack",    "ackdat",       "smean",        "dmean",            "trans_depth",
        "response_body_len",         "ct_srv_src",   "ct_state_ttl",     "ct_dst_ltm",
        "ct_src_dport_ltm",          "ct_dst_sport_ltm",                 "ct_dst_src_ltm",
        "is_ftp_login",              "ct_ftp_cmd",   "ct_flw_http_method",
        "ct_src_ltm",                "ct_srv_dst",   "is_sm_ips_ports",  "attack_cat",
        "label"};
    return header;
}

inline constexpr std::size_t kTrainingRows = 175341;
inline constexpr std::size_t kFeatureCount = 42;

inline constexpr const char* kAcquisition =
    "The UNSW-NB15 training CSV is not bundled. Download UNSW_NB15_training-set.csv (175,341 rows) from the\n"
    "UNSW Canberra Cyber Range Lab dataset page (https://research.unsw.edu.au/projects/unsw-nb15-dataset)\n"
    "and point dataset.path in the config at it. Set dataset.sha256 to have the file verified on load.";

}  // namespace pcclsm::unsw_nb15
