#include "rads/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace rads {

namespace {

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  std::uint8_t u8() {
    need(1);
    return buf[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos++]) << (8 * i);
    return v;
  }
  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw Error(Errc::TransportFailure, "truncated frame");
  }
};

constexpr std::uint32_t kMaxFrame = 1u << 30;

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::vector<std::uint8_t> encode_message(const Message& m) {
  std::vector<std::uint8_t> out;
  put_u32(out, 0);  // patched below
  put_u8(out, static_cast<std::uint8_t>(m.kind));
  put_u64(out, m.correlation_id);
  put_u32(out, m.sender);
  switch (m.kind) {
    case MsgKind::VerifyEReq:
      put_u32(out, static_cast<std::uint32_t>(m.edges.size()));
      for (auto [a, b] : m.edges) {
        put_u64(out, a);
        put_u64(out, b);
      }
      break;
    case MsgKind::VerifyEResp:
      put_u32(out, static_cast<std::uint32_t>(m.verdicts.size()));
      for (std::uint8_t v : m.verdicts) put_u8(out, v ? 1 : 0);
      break;
    case MsgKind::FetchVReq:
      put_u32(out, static_cast<std::uint32_t>(m.vertex_ids.size()));
      for (VertexId v : m.vertex_ids) put_u64(out, v);
      break;
    case MsgKind::FetchVResp:
      put_u32(out, static_cast<std::uint32_t>(m.adjacency.size()));
      for (const auto& [v, nbrs] : m.adjacency) {
        put_u64(out, v);
        put_u32(out, static_cast<std::uint32_t>(nbrs.size()));
        for (VertexId n : nbrs) put_u64(out, n);
      }
      break;
    case MsgKind::CheckRReq:
    case MsgKind::ShareRReq:
      break;
    case MsgKind::CheckRResp:
      put_u32(out, m.count);
      break;
    case MsgKind::ShareRResp:
      put_u32(out, static_cast<std::uint32_t>(m.vertex_ids.size()));
      for (VertexId v : m.vertex_ids) put_u64(out, v);
      break;
  }
  std::uint32_t len = static_cast<std::uint32_t>(out.size() - 4);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(len >> (8 * i));
  return out;
}

Message decode_message(const std::vector<std::uint8_t>& frame) {
  Reader r{frame};
  std::uint32_t len = r.u32();
  if (len != frame.size() - 4) throw Error(Errc::TransportFailure, "frame length mismatch");
  Message m;
  std::uint8_t kind = r.u8();
  if (kind > 7) throw Error(Errc::TransportFailure, "unknown message kind");
  m.kind = static_cast<MsgKind>(kind);
  m.correlation_id = r.u64();
  m.sender = r.u32();
  switch (m.kind) {
    case MsgKind::VerifyEReq: {
      std::uint32_t n = r.u32();
      m.edges.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        VertexId a = r.u64();
        VertexId b = r.u64();
        m.edges.push_back({a, b});
      }
      break;
    }
    case MsgKind::VerifyEResp: {
      std::uint32_t n = r.u32();
      m.verdicts.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) m.verdicts.push_back(r.u8());
      break;
    }
    case MsgKind::FetchVReq: {
      std::uint32_t n = r.u32();
      for (std::uint32_t i = 0; i < n; ++i) m.vertex_ids.push_back(r.u64());
      break;
    }
    case MsgKind::FetchVResp: {
      std::uint32_t n = r.u32();
      for (std::uint32_t i = 0; i < n; ++i) {
        VertexId v = r.u64();
        std::uint32_t deg = r.u32();
        std::vector<VertexId> nbrs;
        nbrs.reserve(deg);
        for (std::uint32_t j = 0; j < deg; ++j) nbrs.push_back(r.u64());
        m.adjacency.push_back({v, std::move(nbrs)});
      }
      break;
    }
    case MsgKind::CheckRReq:
    case MsgKind::ShareRReq:
      break;
    case MsgKind::CheckRResp:
      m.count = r.u32();
      break;
    case MsgKind::ShareRResp: {
      std::uint32_t n = r.u32();
      for (std::uint32_t i = 0; i < n; ++i) m.vertex_ids.push_back(r.u64());
      break;
    }
  }
  if (r.pos != frame.size()) throw Error(Errc::TransportFailure, "trailing bytes in frame");
  return m;
}

Message DaemonHandler::handle(const Message& req) const {
  Message resp;
  resp.correlation_id = req.correlation_id;
  resp.sender = pv_.machine_id();
  switch (req.kind) {
    case MsgKind::VerifyEReq: {
      resp.kind = MsgKind::VerifyEResp;
      resp.verdicts.reserve(req.edges.size());
      for (auto [a, b] : req.edges) {
        if (!pv_.owns(a) && !pv_.owns(b))
          throw Error(Errc::NotOwner, "verifyE on an edge with no owned endpoint");
        resp.verdicts.push_back(pv_.edge_presence(a, b) == EdgePresence::Present ? 1 : 0);
      }
      break;
    }
    case MsgKind::FetchVReq: {
      resp.kind = MsgKind::FetchVResp;
      for (VertexId v : req.vertex_ids) {
        if (!pv_.owns(v)) throw Error(Errc::NotOwner, "fetchV for " + std::to_string(v));
        resp.adjacency.push_back({v, pv_.local_adj().at(v)});
      }
      break;
    }
    case MsgKind::CheckRReq:
      resp.kind = MsgKind::CheckRResp;
      resp.count = groups_.unprocessed_count();
      break;
    case MsgKind::ShareRReq: {
      resp.kind = MsgKind::ShareRResp;
      auto g = groups_.claim_one();
      if (g) resp.vertex_ids = std::move(*g);
      break;
    }
    default:
      throw Error(Errc::TransportFailure, "daemon received a response frame");
  }
  return resp;
}

LoopbackNetwork::LoopbackNetwork(std::size_t machines) {
  for (std::size_t i = 0; i < machines; ++i) stations_.push_back(std::make_unique<Station>());
}

LoopbackNetwork::~LoopbackNetwork() { stop_all(); }

void LoopbackNetwork::start_daemon(MachineId id, const DaemonHandler* handler) {
  Station& st = *stations_[id];
  st.handler = handler;
  st.daemon = std::thread([&st] {
    for (;;) {
      Pending job;
      {
        std::unique_lock<std::mutex> lock(st.mu);
        st.cv.wait(lock, [&st] { return st.stop || !st.inbox.empty(); });
        if (st.inbox.empty()) return;  // stop requested and drained
        job = std::move(st.inbox.front());
        st.inbox.pop_front();
      }
      try {
        Message req = decode_message(job.frame);
        Message resp = st.handler->handle(req);
        job.reply.set_value(encode_message(resp));
      } catch (...) {
        job.reply.set_exception(std::current_exception());
      }
    }
  });
}

void LoopbackNetwork::stop_all() {
  for (auto& stp : stations_) {
    Station& st = *stp;
    if (!st.daemon.joinable()) continue;
    {
      std::lock_guard<std::mutex> lock(st.mu);
      st.stop = true;
    }
    st.cv.notify_all();
    st.daemon.join();
  }
}

std::vector<std::uint8_t> LoopbackNetwork::roundtrip(MachineId target,
                                                     std::vector<std::uint8_t> frame) {
  Station& st = *stations_[target];
  std::future<std::vector<std::uint8_t>> fut;
  {
    std::lock_guard<std::mutex> lock(st.mu);
    if (st.stop || !st.daemon.joinable())
      throw Error(Errc::TransportFailure, "peer daemon not running");
    Pending p;
    p.frame = std::move(frame);
    fut = p.reply.get_future();
    st.inbox.push_back(std::move(p));
  }
  st.cv.notify_one();
  return fut.get();
}

Message LoopbackTransport::request(MachineId target, Message msg) {
  msg.sender = self_;
  msg.correlation_id = next_correlation_.fetch_add(1);
  std::vector<std::uint8_t> reply_bytes;
  try {
    reply_bytes = net_.roundtrip(target, encode_message(msg));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::TransportFailure, e.what());
  }
  Message reply = decode_message(reply_bytes);
  if (reply.correlation_id != msg.correlation_id)
    throw Error(Errc::TransportFailure, "correlation id mismatch");
  return reply;
}

std::vector<HostEntry> parse_hosts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open hosts file " + path);
  std::vector<HostEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    HostEntry e;
    std::string addr;
    if (!(ls >> e.id)) continue;
    if (!(ls >> addr)) throw Error(Errc::ParseError, "hosts file: missing host:port");
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw Error(Errc::ParseError, "hosts file: missing port");
    e.host = addr.substr(0, colon);
    e.port = static_cast<std::uint16_t>(std::stoul(addr.substr(colon + 1)));
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const HostEntry& a, const HostEntry& b) {
    return a.id < b.id;
  });
  return out;
}

namespace {

bool read_exact(int fd, void* buf, std::size_t n) {
  auto* p = static_cast<std::uint8_t*>(buf);
  while (n > 0) {
    ssize_t got = ::recv(fd, p, n, 0);
    if (got == 0) return false;
    if (got < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += got;
    n -= static_cast<std::size_t>(got);
  }
  return true;
}

bool write_exact(int fd, const void* buf, std::size_t n) {
  auto* p = static_cast<const std::uint8_t*>(buf);
  while (n > 0) {
    ssize_t put = ::send(fd, p, n, MSG_NOSIGNAL);
    if (put < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += put;
    n -= static_cast<std::size_t>(put);
  }
  return true;
}

bool read_frame(int fd, std::vector<std::uint8_t>& frame) {
  std::uint8_t head[4];
  if (!read_exact(fd, head, 4)) return false;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(head[i]) << (8 * i);
  if (len > kMaxFrame) return false;
  frame.resize(4 + len);
  std::memcpy(frame.data(), head, 4);
  return read_exact(fd, frame.data() + 4, len);
}

int connect_to(const std::string& host, std::uint16_t port) {
  struct addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) return -1;
  int fd = -1;
  for (auto* it = res; it; it = it->ai_next) {
    fd = ::socket(it->ai_family, it->ai_socktype, it->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, it->ai_addr, it->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  return fd;
}

}  // namespace

TcpDaemon::~TcpDaemon() { stop(); }

void TcpDaemon::start(const std::string& host, std::uint16_t port, const DaemonHandler* handler) {
  handler_ = handler;
  last_activity_ms_ = now_ms();
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(Errc::TransportFailure, "socket() failed");
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));

  struct addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  struct addrinfo* res = nullptr;
  if (::getaddrinfo(host.empty() ? nullptr : host.c_str(), std::to_string(port).c_str(), &hints,
                    &res) != 0 ||
      res == nullptr)
    throw Error(Errc::TransportFailure, "cannot resolve " + host);
  int rc = ::bind(listen_fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) throw Error(Errc::TransportFailure, "bind failed on port " + std::to_string(port));
  if (::listen(listen_fd_, 16) != 0) throw Error(Errc::TransportFailure, "listen failed");
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void TcpDaemon::accept_loop() {
  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_) return;
      if (errno == EINTR) continue;
      return;
    }
    int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
    std::lock_guard<std::mutex> lock(mu_);
    open_fds_.push_back(fd);
    conn_threads_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpDaemon::serve_connection(int fd) {
  ++open_connections_;
  std::vector<std::uint8_t> frame;
  while (!stopping_) {
    if (!read_frame(fd, frame)) break;
    last_activity_ms_ = now_ms();
    std::vector<std::uint8_t> reply;
    try {
      Message req = decode_message(frame);
      Message resp = handler_->handle(req);
      reply = encode_message(resp);
    } catch (const std::exception& e) {
      std::cerr << "daemon: dropping connection after protocol error: " << e.what() << "\n";
      break;
    }
    if (!write_exact(fd, reply.data(), reply.size())) break;
    last_activity_ms_ = now_ms();
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    std::erase(open_fds_, fd);
  }
  ::close(fd);
  --open_connections_;
}

void TcpDaemon::stop() {
  if (listen_fd_ < 0) return;
  stopping_ = true;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  std::vector<std::thread> conns;
  {
    std::lock_guard<std::mutex> lock(mu_);
    conns.swap(conn_threads_);
  }
  for (auto& t : conns)
    if (t.joinable()) t.join();
  listen_fd_ = -1;
}

std::int64_t TcpDaemon::idle_ms() const { return now_ms() - last_activity_ms_; }

TcpTransport::~TcpTransport() { close_all(); }

void TcpTransport::close_all() {
  for (auto& [id, fd] : sockets_)
    if (fd >= 0) ::close(fd);
  sockets_.clear();
}

int TcpTransport::connection(MachineId target) {
  auto it = sockets_.find(target);
  if (it != sockets_.end()) return it->second;
  const HostEntry* entry = nullptr;
  for (const auto& h : hosts_)
    if (h.id == target) entry = &h;
  if (!entry) throw Error(Errc::TransportFailure, "no host entry for machine " +
                                                      std::to_string(target));
  // peers may come up later; retry briefly
  int fd = -1;
  for (int attempt = 0; attempt < 100 && fd < 0; ++attempt) {
    fd = connect_to(entry->host, entry->port);
    if (fd < 0) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  if (fd < 0)
    throw Error(Errc::TransportFailure,
                "cannot connect to " + entry->host + ":" + std::to_string(entry->port));
  int yes = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));
  sockets_[target] = fd;
  return fd;
}

Message TcpTransport::request(MachineId target, Message msg) {
  msg.sender = self_;
  msg.correlation_id = next_correlation_.fetch_add(1);
  int fd = connection(target);
  auto bytes = encode_message(msg);
  std::vector<std::uint8_t> frame;
  if (!write_exact(fd, bytes.data(), bytes.size()) || !read_frame(fd, frame)) {
    ::close(fd);
    sockets_.erase(target);
    throw Error(Errc::TransportFailure, "request to machine " + std::to_string(target) +
                                            " failed");
  }
  Message reply = decode_message(frame);
  if (reply.correlation_id != msg.correlation_id)
    throw Error(Errc::TransportFailure, "correlation id mismatch");
  return reply;
}

std::unordered_map<EdgeKey, bool, EdgeKeyHash> verify_edges(const std::vector<EdgeKey>& batch,
                                                            const PartitionView& pv,
                                                            Transport& transport,
                                                            TrafficCounters& counters) {
  std::unordered_map<EdgeKey, bool, EdgeKeyHash> verdicts;
  std::set<EdgeKey> dedup(batch.begin(), batch.end());
  std::map<MachineId, std::vector<EdgeKey>> by_target;
  for (const EdgeKey& e : dedup) {
    MachineId target = pv.owner(e.a);  // owner of the smaller endpoint
    by_target[target].push_back(e);
  }
  for (auto& [target, edges] : by_target) {
    Message req;
    req.kind = MsgKind::VerifyEReq;
    for (const EdgeKey& e : edges) req.edges.push_back({e.a, e.b});
    Message resp = transport.request(target, std::move(req));
    if (resp.kind != MsgKind::VerifyEResp || resp.verdicts.size() != edges.size())
      throw Error(Errc::TransportFailure, "bad verifyE response");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      verdicts[edges[i]] = resp.verdicts[i] != 0;
      ++counters.verifies_per_edge[edges[i]];
    }
    ++counters.verify_requests;
    counters.edges_verified += edges.size();
  }
  return verdicts;
}

void fetch_vertices(const std::vector<VertexId>& needed, PartitionView& pv, Transport& transport,
                    TrafficCounters& counters) {
  std::set<VertexId> dedup(needed.begin(), needed.end());
  std::map<MachineId, std::vector<VertexId>> by_owner;
  for (VertexId v : dedup) {
    if (pv.cached(v)) continue;  // never re-fetch while cached
    if (pv.owns(v)) throw Error(Errc::NotOwner, "fetch of owned vertex " + std::to_string(v));
    by_owner[pv.owner(v)].push_back(v);
  }
  for (auto& [owner, ids] : by_owner) {
    Message req;
    req.kind = MsgKind::FetchVReq;
    req.vertex_ids = ids;
    Message resp = transport.request(owner, std::move(req));
    if (resp.kind != MsgKind::FetchVResp || resp.adjacency.size() != ids.size())
      throw Error(Errc::TransportFailure, "bad fetchV response");
    for (auto& [v, nbrs] : resp.adjacency) {
      pv.cache_insert(v, std::move(nbrs));
      ++counters.fetches_per_vertex[v];
      ++counters.vertices_fetched;
    }
    ++counters.fetch_requests;
  }
}

StealOutcome steal_work(Transport& transport, TrafficCounters& counters) {
  StealOutcome out;
  MachineId best = 0;
  std::uint32_t best_count = 0;
  for (MachineId peer = 0; peer < transport.machine_count(); ++peer) {
    if (peer == transport.self()) continue;
    std::uint32_t count = 0;
    try {
      Message req;
      req.kind = MsgKind::CheckRReq;
      Message resp = transport.request(peer, std::move(req));
      ++counters.checkr_requests;
      if (resp.kind == MsgKind::CheckRResp) count = resp.count;
    } catch (const Error&) {
      count = 0;  // unreachable peers have nothing to share
    }
    if (count > best_count) {
      best_count = count;
      best = peer;
    }
  }
  if (best_count == 0) {
    out.cluster_empty = true;
    return out;
  }
  try {
    Message req;
    req.kind = MsgKind::ShareRReq;
    Message resp = transport.request(best, std::move(req));
    ++counters.sharer_requests;
    if (resp.kind == MsgKind::ShareRResp && !resp.vertex_ids.empty()) {
      out.group = std::move(resp.vertex_ids);
      ++counters.groups_stolen;
    }
  } catch (const Error&) {
    // lost the race or lost the peer; the next checkR sweep settles it
  }
  return out;
}

}  // namespace rads
