#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "scenegen/error.hpp"
#include "scenegen/oracle.hpp"

namespace scenegen {

struct RemoteOracleConfig {
    std::string host = "127.0.0.1";
    int port = 0;
    std::string path = "/oracle";
    std::string token_env = "SCENEGEN_ORACLE_TOKEN";
    int timeout_s = 30;
    int max_retries = 2; // extra attempts after the first
};

/// Instruction templates shipped as files, one per query kind. {{scene_type}}
/// and {{kind}} placeholders are substituted at ask time.
class PromptLibrary {
public:
    PromptLibrary() = default;

    static PromptLibrary load_dir(const std::filesystem::path& dir) {
        PromptLibrary lib;
        for (const char* kind : {"categorize", "score", "children", "relation"}) {
            std::filesystem::path file = dir / (std::string(kind) + ".txt");
            std::ifstream in(file);
            if (!in)
                throw Error(ErrorKind::input,
                            "prompts: cannot open \"" + file.string() + "\"");
            std::stringstream buf;
            buf << in.rdbuf();
            lib.templates_[kind] = buf.str();
        }
        return lib;
    }

    std::string render(const OracleQuery& q) const {
        auto it = templates_.find(to_string(q.kind()));
        if (it == templates_.end()) return "";
        std::string out = it->second;
        auto sub = [&out](const std::string& key, const std::string& value) {
            std::size_t pos;
            while ((pos = out.find(key)) != std::string::npos)
                out.replace(pos, key.size(), value);
        };
        sub("{{scene_type}}", q.scene_type);
        sub("{{kind}}", to_string(q.kind()));
        return out;
    }

    bool empty() const { return templates_.empty(); }

private:
    std::map<std::string, std::string> templates_;
};

struct RemoteCallRecord {
    std::string budget_id;
    int attempt = 0;
    int status = 0;
};

/// HTTP client speaking the oracle wire protocol: one POST per ask, body
/// {kind, scene_type, budget_id, payload, instructions}; the response must
/// carry a single structured "answer" block. Parse failures are retried.
class RemoteOracle : public DecisionOracle {
public:
    RemoteOracle(RemoteOracleConfig config, PromptLibrary prompts = {})
        : config_(std::move(config)), prompts_(std::move(prompts)) {}

    std::vector<RemoteCallRecord> call_log() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return log_;
    }

protected:
    OracleReply::Source source() const override { return OracleReply::Source::remote; }

    OracleReply do_ask(const OracleQuery& q) override {
        json body = wire_request(q, prompts_.render(q));
        std::string payload = body.dump();

        httplib::Headers headers;
        if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);

        std::string transcript = "request: " + payload;
        auto t0 = std::chrono::steady_clock::now();
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            httplib::Client cli(config_.host, config_.port);
            cli.set_connection_timeout(config_.timeout_s);
            cli.set_read_timeout(config_.timeout_s);
            auto res = cli.Post(config_.path, headers, payload, "application/json");
            int status = res ? res->status : 0;
            {
                std::lock_guard<std::mutex> lock(mutex_);
                log_.push_back({q.budget_id, attempt, status});
            }
            if (!res) {
                transcript += "\nattempt " + std::to_string(attempt) + ": transport failure";
                continue;
            }
            transcript += "\nattempt " + std::to_string(attempt) + " status " +
                          std::to_string(res->status) + ": " + res->body;
            if (res->status != 200) continue;
            json reply;
            try {
                reply = json::parse(res->body);
            } catch (const json::exception&) {
                continue;
            }
            if (!reply.contains("answer") || !answer_matches_kind(q.kind(), reply.at("answer")))
                continue;
            OracleReply out;
            out.kind = q.kind();
            out.answer = reply.at("answer");
            out.raw = transcript;
            out.latency_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            out.source = OracleReply::Source::remote;
            return out;
        }
        throw Error(ErrorKind::oracle,
                    "remote oracle failed for " + q.budget_id + "\n" + transcript);
    }

private:
    RemoteOracleConfig config_;
    PromptLibrary prompts_;
    mutable std::mutex mutex_;
    std::vector<RemoteCallRecord> log_;
};

} // namespace scenegen
