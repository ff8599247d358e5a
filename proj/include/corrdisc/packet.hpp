#pragma once

// SREQ / SREP wire format. All integers are big-endian.
//
//   SREQ (14 bytes)
//     u8  type = 0x01
//     u16 origin
//     u32 seq
//     u32 session_seq
//     u16 requested service
//     u8  ttl
//
//   SREP (13 + 4k bytes)
//     u8  type = 0x02
//     u16 responder
//     u16 destination
//     u16 in_reply_to.origin
//     u32 in_reply_to.seq
//     u8  ttl
//     u8  k, 1 <= k <= 33
//     k x { u16 service, u16 provider }   record 0 is the answer

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "corrdisc/types.hpp"

namespace corrdisc {

struct MessageId {
    NodeId origin;
    std::uint32_t seq = 0;

    friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

/// Service and provider as carried on the wire.
struct ServiceAdvert {
    ServiceId service;
    NodeId provider;

    friend bool operator==(const ServiceAdvert&, const ServiceAdvert&) = default;
};

struct Sreq {
    MessageId id;
    std::uint32_t session_seq = 0;
    ServiceId requested;
    std::uint8_t ttl = 0;

    NodeId origin() const { return id.origin; }
    friend bool operator==(const Sreq&, const Sreq&) = default;
};

struct Srep {
    MessageId in_reply_to;
    NodeId responder;
    NodeId destination;
    std::uint8_t ttl = 0;
    ServiceAdvert answer;
    std::vector<ServiceAdvert> related;

    friend bool operator==(const Srep&, const Srep&) = default;
};

using Packet = std::variant<Sreq, Srep>;

inline constexpr std::uint8_t kSreqType = 0x01;
inline constexpr std::uint8_t kSrepType = 0x02;
inline constexpr std::size_t kSreqSize = 14;
inline constexpr std::size_t kSrepHeaderSize = 13;
inline constexpr std::size_t kRecordSize = 4;
inline constexpr std::size_t kMaxRelatedOnWire = 32;

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

class Writer {
public:
    explicit Writer(std::size_t reserve) { buf_.reserve(reserve); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v >> 8));
        u8(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        const std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw DecodeError("truncated packet");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::size_t encoded_size(const Packet& p) {
    if (const auto* srep = std::get_if<Srep>(&p)) {
        return kSrepHeaderSize + kRecordSize * (1 + srep->related.size());
    }
    return kSreqSize;
}

inline std::vector<std::uint8_t> encode_packet(const Packet& p) {
    detail::Writer w(encoded_size(p));
    if (const auto* sreq = std::get_if<Sreq>(&p)) {
        w.u8(kSreqType);
        w.u16(sreq->id.origin.value);
        w.u32(sreq->id.seq);
        w.u32(sreq->session_seq);
        w.u16(sreq->requested.value);
        w.u8(sreq->ttl);
        return w.take();
    }
    const auto& srep = std::get<Srep>(p);
    if (srep.related.size() > kMaxRelatedOnWire) {
        throw std::invalid_argument("SREP carries more than 32 related records");
    }
    w.u8(kSrepType);
    w.u16(srep.responder.value);
    w.u16(srep.destination.value);
    w.u16(srep.in_reply_to.origin.value);
    w.u32(srep.in_reply_to.seq);
    w.u8(srep.ttl);
    w.u8(static_cast<std::uint8_t>(1 + srep.related.size()));
    w.u16(srep.answer.service.value);
    w.u16(srep.answer.provider.value);
    for (const auto& r : srep.related) {
        w.u16(r.service.value);
        w.u16(r.provider.value);
    }
    return w.take();
}

/// Throws DecodeError on truncation, unknown type, a bad record count or
/// trailing bytes.
inline Packet decode_packet(std::span<const std::uint8_t> bytes) {
    detail::Reader r(bytes);
    const auto type = r.u8();
    if (type == kSreqType) {
        Sreq sreq;
        sreq.id.origin = NodeId{r.u16()};
        sreq.id.seq = r.u32();
        sreq.session_seq = r.u32();
        sreq.requested = ServiceId{r.u16()};
        sreq.ttl = r.u8();
        if (r.remaining() != 0) throw DecodeError("trailing bytes after SREQ");
        return sreq;
    }
    if (type != kSrepType) throw DecodeError("unknown packet type " + std::to_string(type));

    Srep srep;
    srep.responder = NodeId{r.u16()};
    srep.destination = NodeId{r.u16()};
    srep.in_reply_to.origin = NodeId{r.u16()};
    srep.in_reply_to.seq = r.u32();
    srep.ttl = r.u8();
    const std::size_t count = r.u8();
    if (count == 0 || count > kMaxRelatedOnWire + 1) {
        throw DecodeError("SREP record count out of range: " + std::to_string(count));
    }
    if (r.remaining() != count * kRecordSize) throw DecodeError("SREP length does not match record count");
    srep.answer.service = ServiceId{r.u16()};
    srep.answer.provider = NodeId{r.u16()};
    srep.related.reserve(count - 1);
    for (std::size_t i = 1; i < count; ++i) {
        ServiceAdvert a;
        a.service = ServiceId{r.u16()};
        a.provider = NodeId{r.u16()};
        srep.related.push_back(a);
    }
    return srep;
}

} // namespace corrdisc
