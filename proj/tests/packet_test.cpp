#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "corrdisc/packet.hpp"
#include "corrdisc/random.hpp"

namespace {

using namespace corrdisc;
using Bytes = std::vector<std::uint8_t>;

std::map<std::string, Bytes> load_golden() {
    std::ifstream in(std::string(CORRDISC_TEST_DATA) + "/packets.golden");
    std::map<std::string, Bytes> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name, hex;
        ls >> name >> hex;
        Bytes bytes;
        for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
            bytes.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
        }
        out[name] = bytes;
    }
    return out;
}

NodeId node(int n) { return NodeId{static_cast<std::uint16_t>(n)}; }
ServiceId svc(int s) { return ServiceId{static_cast<std::uint16_t>(s)}; }

Srep two_related() {
    Srep p;
    p.responder = node(7);
    p.destination = node(1);
    p.in_reply_to = MessageId{node(1), 0x01020304};
    p.ttl = 8;
    p.answer = {svc(3), node(7)};
    p.related = {{svc(7), node(2)}, {svc(9), node(0x0102)}};
    return p;
}

TEST(PacketCodec, GoldenBytes) {
    const auto golden = load_golden();
    ASSERT_EQ(golden.size(), 3u);

    const Sreq basic{MessageId{node(1), 0}, 0, svc(5), 4};
    EXPECT_EQ(encode_packet(basic), golden.at("sreq_basic"));
    EXPECT_EQ(std::get<Sreq>(decode_packet(golden.at("sreq_basic"))), basic);

    const Sreq extremes{MessageId{node(0xfffe), 0xdeadbeef}, 42, svc(0x0203), 255};
    EXPECT_EQ(encode_packet(extremes), golden.at("sreq_extremes"));

    EXPECT_EQ(encode_packet(two_related()), golden.at("srep_two_related"));
    EXPECT_EQ(std::get<Srep>(decode_packet(golden.at("srep_two_related"))), two_related());
}

TEST(PacketCodec, Sizes) {
    EXPECT_EQ(encode_packet(Sreq{}).size(), kSreqSize);
    EXPECT_EQ(encode_packet(two_related()).size(), kSrepHeaderSize + 3 * kRecordSize);
    EXPECT_EQ(encoded_size(two_related()), 25u);
}

TEST(PacketCodec, DecodeErrors) {
    EXPECT_THROW(decode_packet(Bytes{}), DecodeError);
    EXPECT_THROW(decode_packet(Bytes{0x03, 0, 0}), DecodeError);

    auto sreq = encode_packet(Sreq{});
    sreq.pop_back();
    EXPECT_THROW(decode_packet(sreq), DecodeError);
    sreq.push_back(0);
    sreq.push_back(0);
    EXPECT_THROW(decode_packet(sreq), DecodeError);  // trailing byte

    auto srep = encode_packet(two_related());
    auto zero = srep;
    zero[12] = 0;
    EXPECT_THROW(decode_packet(zero), DecodeError);
    auto too_many = srep;
    too_many[12] = 34;
    EXPECT_THROW(decode_packet(too_many), DecodeError);
    auto short_records = srep;
    short_records[12] = 4;  // claims more records than present
    EXPECT_THROW(decode_packet(short_records), DecodeError);
    srep.resize(20);
    EXPECT_THROW(decode_packet(srep), DecodeError);
}

TEST(PacketCodec, EncodeRejectsOversizedRelatedList) {
    auto p = two_related();
    p.related.assign(33, ServiceAdvert{svc(1), node(1)});
    EXPECT_THROW(encode_packet(p), std::invalid_argument);
    p.related.resize(32);
    EXPECT_EQ(std::get<Srep>(decode_packet(encode_packet(p))), p);
}

TEST(PacketCodec, RandomRoundTrip) {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        Packet p;
        if (rng.below(2) == 0) {
            p = Sreq{MessageId{node(static_cast<int>(rng.below(65536))), static_cast<std::uint32_t>(rng())},
                     static_cast<std::uint32_t>(rng()), svc(static_cast<int>(rng.below(65536))),
                     static_cast<std::uint8_t>(rng.below(256))};
        } else {
            Srep s;
            s.responder = node(static_cast<int>(rng.below(65536)));
            s.destination = node(static_cast<int>(rng.below(65536)));
            s.in_reply_to = MessageId{node(static_cast<int>(rng.below(65536))), static_cast<std::uint32_t>(rng())};
            s.ttl = static_cast<std::uint8_t>(rng.below(256));
            s.answer = {svc(static_cast<int>(rng.below(65536))), node(static_cast<int>(rng.below(65536)))};
            s.related.resize(rng.below(33));
            for (auto& r : s.related) r = {svc(static_cast<int>(rng.below(65536))), node(static_cast<int>(rng.below(65536)))};
            p = s;
        }
        const auto bytes = encode_packet(p);
        ASSERT_EQ(bytes.size(), encoded_size(p));
        ASSERT_EQ(decode_packet(bytes), p);
    }
}

} // namespace
