#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "rads/graph.hpp"
#include "rads/region_grouping.hpp"
#include "rads/types.hpp"

namespace rads {

enum class MsgKind : std::uint8_t {
  VerifyEReq = 0,
  VerifyEResp = 1,
  FetchVReq = 2,
  FetchVResp = 3,
  CheckRReq = 4,
  CheckRResp = 5,
  ShareRReq = 6,
  ShareRResp = 7,
};

/// One protocol frame. Which payload fields are meaningful depends on kind.
struct Message {
  MsgKind kind = MsgKind::CheckRReq;
  std::uint64_t correlation_id = 0;
  MachineId sender = 0;

  std::vector<std::pair<VertexId, VertexId>> edges;  // VerifyEReq
  std::vector<std::uint8_t> verdicts;                // VerifyEResp, aligned with the request
  std::vector<VertexId> vertex_ids;                  // FetchVReq / ShareRResp members
  std::vector<std::pair<VertexId, std::vector<VertexId>>> adjacency;  // FetchVResp
  std::uint32_t count = 0;                           // CheckRResp
};

/// Wire form: [u32 length][u8 kind][u64 correlation][u32 sender][payload],
/// little-endian; length counts everything after the length field.
std::vector<std::uint8_t> encode_message(const Message& m);
Message decode_message(const std::vector<std::uint8_t>& frame);

/// Region groups of one worker, claimed exactly once each, locally or by a
/// peer through shareR.
class GroupTable {
 public:
  void assign(std::vector<RegionGroup> groups) {
    std::lock_guard<std::mutex> lock(mu_);
    groups_ = std::move(groups);
  }

  std::optional<std::vector<VertexId>> claim_one() {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& g : groups_) {
      if (!g.processed) {
        g.processed = true;
        ++claimed_;
        return g.members;
      }
    }
    return std::nullopt;
  }

  std::uint32_t unprocessed_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::uint32_t n = 0;
    for (const auto& g : groups_)
      if (!g.processed) ++n;
    return n;
  }

  std::size_t total() const {
    std::lock_guard<std::mutex> lock(mu_);
    return groups_.size();
  }

  std::uint64_t claimed() const { return claimed_; }

 private:
  mutable std::mutex mu_;
  std::vector<RegionGroup> groups_;
  std::atomic<std::uint64_t> claimed_{0};
};

/// Answers the four request kinds from owned data and the group table.
/// Runs on daemon threads; never touches the foreign-vertex cache.
class DaemonHandler {
 public:
  DaemonHandler(const PartitionView& pv, GroupTable& groups) : pv_(pv), groups_(groups) {}
  Message handle(const Message& req) const;

 private:
  const PartitionView& pv_;
  GroupTable& groups_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual Message request(MachineId target, Message msg) = 0;
  virtual MachineId self() const = 0;
  virtual std::size_t machine_count() const = 0;
};

/// In-process fabric: one daemon thread per worker consuming encoded frames
/// from a queue, so both transports run the identical framed protocol.
class LoopbackNetwork {
 public:
  explicit LoopbackNetwork(std::size_t machines);
  ~LoopbackNetwork();

  void start_daemon(MachineId id, const DaemonHandler* handler);
  void stop_all();

  std::vector<std::uint8_t> roundtrip(MachineId target, std::vector<std::uint8_t> frame);
  std::size_t machine_count() const { return stations_.size(); }

 private:
  struct Pending {
    std::vector<std::uint8_t> frame;
    std::promise<std::vector<std::uint8_t>> reply;
  };
  struct Station {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Pending> inbox;
    bool stop = false;
    std::thread daemon;
    const DaemonHandler* handler = nullptr;
  };
  std::vector<std::unique_ptr<Station>> stations_;
};

class LoopbackTransport : public Transport {
 public:
  LoopbackTransport(LoopbackNetwork& net, MachineId self) : net_(net), self_(self) {}
  Message request(MachineId target, Message msg) override;
  MachineId self() const override { return self_; }
  std::size_t machine_count() const override { return net_.machine_count(); }

 private:
  LoopbackNetwork& net_;
  MachineId self_;
  std::atomic<std::uint64_t> next_correlation_{1};
};

struct HostEntry {
  MachineId id = 0;
  std::string host;
  std::uint16_t port = 0;
};

/// Hosts file: one "machine_id host:port" per line, '#' comments.
std::vector<HostEntry> parse_hosts_file(const std::string& path);

/// Framed-protocol server on a TCP listener; one thread per connection,
/// malformed frames drop the connection.
class TcpDaemon {
 public:
  TcpDaemon() = default;
  ~TcpDaemon();
  void start(const std::string& host, std::uint16_t port, const DaemonHandler* handler);
  void stop();
  /// Milliseconds since the last served request (or start).
  std::int64_t idle_ms() const;
  std::size_t open_connections() const { return open_connections_; }

 private:
  void accept_loop();
  void serve_connection(int fd);

  int listen_fd_ = -1;
  const DaemonHandler* handler_ = nullptr;
  std::thread accept_thread_;
  std::vector<std::thread> conn_threads_;
  std::vector<int> open_fds_;
  mutable std::mutex mu_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::int64_t> last_activity_ms_{0};
  std::atomic<std::size_t> open_connections_{0};
};

class TcpTransport : public Transport {
 public:
  TcpTransport(std::vector<HostEntry> hosts, MachineId self)
      : hosts_(std::move(hosts)), self_(self) {}
  ~TcpTransport() override;
  Message request(MachineId target, Message msg) override;
  MachineId self() const override { return self_; }
  std::size_t machine_count() const override { return hosts_.size(); }

  /// Drop every outbound connection; peers' daemons see the sockets close.
  void close_all();

 private:
  int connection(MachineId target);

  std::vector<HostEntry> hosts_;
  MachineId self_;
  std::unordered_map<MachineId, int> sockets_;
  std::atomic<std::uint64_t> next_correlation_{1};
};

/// Per-worker traffic accounting backing the communication-minimality checks.
struct TrafficCounters {
  std::uint64_t verify_requests = 0;
  std::uint64_t fetch_requests = 0;
  std::uint64_t checkr_requests = 0;
  std::uint64_t sharer_requests = 0;
  std::uint64_t edges_verified = 0;
  std::uint64_t vertices_fetched = 0;
  std::uint64_t groups_stolen = 0;
  std::unordered_map<VertexId, std::uint32_t> fetches_per_vertex;
  std::unordered_map<EdgeKey, std::uint32_t, EdgeKeyHash> verifies_per_edge;
  std::uint32_t max_fetches_per_vertex() const {
    std::uint32_t m = 0;
    for (auto& [v, n] : fetches_per_vertex) m = std::max(m, n);
    return m;
  }
  std::uint32_t max_verifies_per_edge() const {
    std::uint32_t m = 0;
    for (auto& [e, n] : verifies_per_edge) m = std::max(m, n);
    return m;
  }
};

/// Deduplicate, group by the owner of the smaller endpoint, one request per
/// target machine; returns a verdict per edge.
std::unordered_map<EdgeKey, bool, EdgeKeyHash> verify_edges(const std::vector<EdgeKey>& batch,
                                                            const PartitionView& pv,
                                                            Transport& transport,
                                                            TrafficCounters& counters);

/// Fetch the uncached foreign vertices, grouped by owner, one request per
/// owner; fills the cache. Never re-fetches a cached vertex.
void fetch_vertices(const std::vector<VertexId>& needed, PartitionView& pv, Transport& transport,
                    TrafficCounters& counters);

struct StealOutcome {
  bool cluster_empty = false;
  std::optional<std::vector<VertexId>> group;
};

/// Broadcast checkR, pick the peer with the most unprocessed groups (ties
/// toward the smaller id), claim one via shareR.
StealOutcome steal_work(Transport& transport, TrafficCounters& counters);

}  // namespace rads
