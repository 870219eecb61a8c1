#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "wired/event_queue.hpp"
#include "wired/rng.hpp"

namespace wired {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
using FrameSeq = std::uint64_t;

// Per-step closed form: probability that all bits sent within one step
// survive when each errs independently with p_bit.
inline double per_step_bit_survival(double p_bit, int bits_per_step) {
  if (p_bit <= 0.0) return 1.0;
  if (p_bit >= 1.0) return bits_per_step > 0 ? 0.0 : 1.0;
  return std::pow(1.0 - p_bit, bits_per_step);
}

struct GilbertElliottParams {
  double p_gb = 0.0;   // good -> bad transition probability per step
  double p_bg = 0.0;   // bad -> good transition probability per step
  double p_good = 0.0; // bit error probability in good state
  double p_bad = 0.0;  // bit error probability in bad state

  // Long-run fraction of steps spent in the bad state.
  double stationary_bad() const {
    if (p_gb + p_bg == 0.0) return 0.0;
    return p_gb / (p_gb + p_bg);
  }
};

// Two-state Markov disturbance process with a 1 us step. The chain is
// advanced lazily by drawing geometric sojourn lengths instead of stepping
// every microsecond; the resulting state trajectory is distributionally
// identical and is a function of the jammer stream alone.
class GilbertElliott {
 public:
  enum class State { Good, Bad };

  GilbertElliott(const GilbertElliottParams& p, RngStream rng)
      : p_(p), rng_(std::move(rng)) {
    state_ = State::Good;
    seg_end_ = rng_.geometric_steps(p_.p_gb);
  }

  // Visits state segments covering [from, to) in order: fn(state, steps).
  // Queries must move forward in time (from >= the last consumed instant).
  template <class Fn>
  void for_each_segment(Micros from, Micros to, Fn&& fn) {
    advance_to(from);
    Micros t = from;
    while (t < to) {
      const Micros e = std::min(seg_end_, to);
      fn(state_, e - t);
      t = e;
      if (seg_end_ <= t) next_segment();
    }
  }

  void advance_to(Micros t) {
    while (seg_end_ <= t) next_segment();
  }

  State state() const { return state_; }
  const GilbertElliottParams& params() const { return p_; }

 private:
  void next_segment() {
    if (state_ == State::Good) {
      state_ = State::Bad;
      seg_end_ += rng_.geometric_steps(p_.p_bg);
    } else {
      state_ = State::Good;
      seg_end_ += rng_.geometric_steps(p_.p_gb);
    }
  }

  GilbertElliottParams p_;
  RngStream rng_;
  State state_;
  Micros seg_end_;
};

enum class Verdict { Ok, Collided, BitErrors };

enum class FrameKind : std::uint8_t { Data, Ack };

struct TxDesc {
  FrameKind kind = FrameKind::Data;
  NodeId src = 0;
  NodeId dst = 0;
  LinkId link = 0;
  FrameSeq frame = 0;
  Micros airtime = 0;
};

struct MediumListener {
  virtual ~MediumListener() = default;
  virtual void on_medium_busy(Micros now) = 0;
  virtual void on_medium_idle(Micros now) = 0;
};

// One radio channel: a single collision domain shared by every attached
// node, a Gilbert-Elliott jammer, and receiver routing. Any temporal
// overlap between transmissions corrupts all of them (no capture).
class Channel {
 public:
  Channel(Engine& engine, const GilbertElliottParams& jam, RngStream jam_rng,
          RngStream verdict_rng, int bits_per_step)
      : engine_(engine),
        jammer_(jam, std::move(jam_rng)),
        verdict_rng_(std::move(verdict_rng)),
        bits_per_step_(bits_per_step) {}

  void attach_listener(MediumListener* l) { listeners_.push_back(l); }

  using DataSink = std::function<void(const TxDesc&, Micros)>;
  using AckSink = std::function<void(const TxDesc&, Micros)>;

  void register_data_sink(NodeId node, DataSink fn) {
    data_sinks_[node] = std::move(fn);
  }
  void register_ack_sink(NodeId node, AckSink fn) {
    ack_sinks_[node] = std::move(fn);
  }

  // Carrier sense with a half-open [t_start, t_end) convention: the medium
  // is already idle at the exact end instant of the last transmission.
  bool carrier_busy(Micros t) const { return t < busy_until_; }

  // Microseconds of continuous idle air at time t; -1 while busy.
  Micros idle_for(Micros t) const {
    return t < busy_until_ ? -1 : t - busy_until_;
  }

  // Starts a transmission at the current instant. Carrier sense is the
  // caller's job (DCF rules for data, SIFS rule for ACKs). The verdict is
  // reported at the end-of-air instant, after delivery to the destination.
  void transmit(const TxDesc& desc, std::function<void(Verdict)> on_done) {
    const Micros now = engine_.now();
    const Micros t_end = now + desc.airtime;
    const std::uint64_t id = ++next_tx_id_;

    bool overlap = false;
    for (auto& tx : active_) {
      if (tx.t_end > now) {
        tx.collided = true;
        overlap = true;
      }
    }
    active_.push_back(ActiveTx{desc, now, t_end, id, overlap, std::move(on_done)});
    if (overlap) ++collisions_;
    busy_until_ = std::max(busy_until_, t_end);

    if (!busy_flag_) {
      busy_flag_ = true;
      for (auto* l : listeners_) l->on_medium_busy(now);
    }
    engine_.schedule(t_end, [this, id] { finish(id); });
  }

  // Disturbance verdict for a clean (non-collided) transmission interval.
  // Advances the jammer over [t_start, t_end); one verdict draw covers the
  // whole interval, equivalent to one draw per 1 us step.
  Verdict corruption_verdict(Micros t_start, Micros t_end) {
    double survival = 1.0;
    jammer_.for_each_segment(t_start, t_end, [&](GilbertElliott::State s, Micros steps) {
      const double p_bit = s == GilbertElliott::State::Good
                               ? jammer_.params().p_good
                               : jammer_.params().p_bad;
      if (p_bit > 0.0) {
        survival *= std::pow(per_step_bit_survival(p_bit, bits_per_step_),
                             static_cast<double>(steps));
      }
    });
    if (survival >= 1.0) return Verdict::Ok;
    return verdict_rng_.uniform01() < survival ? Verdict::Ok : Verdict::BitErrors;
  }

  GilbertElliott& jammer() { return jammer_; }

  std::uint64_t collisions() const { return collisions_; }
  std::uint64_t bit_error_drops() const { return bit_error_drops_; }
  std::uint64_t delivered_frames() const { return delivered_frames_; }

 private:
  struct ActiveTx {
    TxDesc desc;
    Micros t_start;
    Micros t_end;
    std::uint64_t id;
    bool collided;
    std::function<void(Verdict)> on_done;
  };

  void finish(std::uint64_t id) {
    const Micros now = engine_.now();
    auto it = std::find_if(active_.begin(), active_.end(),
                           [id](const ActiveTx& t) { return t.id == id; });
    ActiveTx tx = std::move(*it);
    active_.erase(it);

    Verdict v;
    if (tx.collided) {
      v = Verdict::Collided;
    } else {
      v = corruption_verdict(tx.t_start, tx.t_end);
      if (v == Verdict::BitErrors) ++bit_error_drops_;
    }

    if (v == Verdict::Ok) {
      ++delivered_frames_;
      auto& sinks = tx.desc.kind == FrameKind::Data ? data_sinks_ : ack_sinks_;
      auto s = sinks.find(tx.desc.dst);
      if (s != sinks.end()) s->second(tx.desc, now);
    }
    if (tx.on_done) tx.on_done(v);

    bool still_busy = false;
    for (const auto& a : active_) {
      if (a.t_end > now) { still_busy = true; break; }
    }
    if (busy_flag_ && !still_busy) {
      busy_flag_ = false;
      for (auto* l : listeners_) l->on_medium_idle(now);
    }
  }

  Engine& engine_;
  GilbertElliott jammer_;
  RngStream verdict_rng_;
  int bits_per_step_;

  std::vector<ActiveTx> active_;
  Micros busy_until_ = 0;
  bool busy_flag_ = false;
  std::uint64_t next_tx_id_ = 0;

  std::vector<MediumListener*> listeners_;
  std::map<NodeId, DataSink> data_sinks_;
  std::map<NodeId, AckSink> ack_sinks_;

  std::uint64_t collisions_ = 0;
  std::uint64_t bit_error_drops_ = 0;
  std::uint64_t delivered_frames_ = 0;
};

}  // namespace wired
