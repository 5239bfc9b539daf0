#pragma once

#include "lcba/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lcba {

// One round's messages, ordered by (from, to) with emission order kept inside
// each slot, plus an offset table for slot lookups.
class RoundMail {
 public:
  RoundMail() = default;
  RoundMail(std::vector<Message> messages, std::size_t n);

  const std::vector<Message>& messages() const { return messages_; }
  std::vector<Message>& mutable_messages() { return messages_; }
  std::span<const Message> slot(PartyId from, PartyId to) const;
  // First non-abort message, the one an honest receiver accepts.
  const Message* accepted(PartyId from, PartyId to) const;
  // The i-th non-abort message in the slot, or nullptr.
  const Message* delivered(PartyId from, PartyId to, std::size_t i) const;
  std::size_t delivered_count(PartyId from, PartyId to) const;

 private:
  std::vector<Message> messages_;
  std::vector<std::uint32_t> offsets_;
  std::size_t n_ = 0;
};

}  // namespace lcba
