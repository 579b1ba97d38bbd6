#include "scroll/backend_http.hpp"

#include <httplib.h>

#include <cstring>

#include "scroll/errors.hpp"

namespace scroll {

HttpDenoiser::HttpDenoiser(std::string endpoint, WindowSize window, int channels,
                           int timeout_seconds)
    : endpoint_(std::move(endpoint)), window_(window), channels_(channels),
      timeout_seconds_(timeout_seconds) {
    if (endpoint_.empty())
        throw ConfigError("external backend: endpoint is empty");
}

void HttpDenoiser::step(std::span<float> tile, int t, int total_steps,
                        const Embedding& conditioning, Rng& /*rng*/) const {
    const std::size_t expected =
        static_cast<std::size_t>(window_.height) * window_.width * channels_;
    if (tile.size() != expected)
        throw DimensionError("external backend: tile size does not match window");

    std::string body;
    const std::uint32_t header[6] = {static_cast<std::uint32_t>(window_.height),
                                     static_cast<std::uint32_t>(window_.width),
                                     static_cast<std::uint32_t>(channels_),
                                     static_cast<std::uint32_t>(t),
                                     static_cast<std::uint32_t>(total_steps),
                                     static_cast<std::uint32_t>(conditioning.dim())};
    body.append(reinterpret_cast<const char*>(header), sizeof(header));
    body.append(reinterpret_cast<const char*>(tile.data()), tile.size() * sizeof(float));
    std::vector<float> emb(conditioning.v.begin(), conditioning.v.end());
    body.append(reinterpret_cast<const char*>(emb.data()), emb.size() * sizeof(float));

    std::string host = endpoint_;
    const auto scheme = host.find("://");
    if (scheme != std::string::npos) host = host.substr(scheme + 3);
    std::string base;
    const auto slash = host.find('/');
    if (slash != std::string::npos) {
        base = host.substr(slash);
        host = host.substr(0, slash);
    }

    httplib::Client client(host);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    auto res = client.Post(base + "/step", body, "application/octet-stream");
    if (!res)
        throw BackendError("external backend: cannot reach " + endpoint_);
    if (res->status != 200)
        throw BackendError("external backend: HTTP " + std::to_string(res->status));
    if (res->body.size() != tile.size() * sizeof(float))
        throw BackendError("external backend: response size mismatch");
    std::memcpy(tile.data(), res->body.data(), res->body.size());
    for (float v : tile)
        if (!std::isfinite(v))
            throw BackendError("external backend: non-finite tile values");
}

}  // namespace scroll
