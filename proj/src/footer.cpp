#include "rhylab/footer.hpp"

#include <cstring>
#include <stdexcept>

namespace rhylab {

Bytes EncryptedFooter::serialize() const {
    Bytes out(kFooterBytes);
    std::uint8_t* p = out.data();
    std::memcpy(p, rsa_key_ct.data(), kRsaFieldBytes);
    p += kRsaFieldBytes;
    std::memcpy(p, rsa_iv_ct.data(), kRsaFieldBytes);
    p += kRsaFieldBytes;
    std::memcpy(p, reserved.data(), kReservedBytes);
    p += kReservedBytes;
    std::memcpy(p, version.data(), kVersionBytes);
    return out;
}

EncryptedFooter EncryptedFooter::parse(ByteView raw) {
    if (raw.size() != kFooterBytes)
        throw std::invalid_argument("EncryptedFooter: need exactly 0x40C bytes");
    EncryptedFooter f;
    const std::uint8_t* p = raw.data();
    std::memcpy(f.rsa_key_ct.data(), p, kRsaFieldBytes);
    p += kRsaFieldBytes;
    std::memcpy(f.rsa_iv_ct.data(), p, kRsaFieldBytes);
    p += kRsaFieldBytes;
    std::memcpy(f.reserved.data(), p, kReservedBytes);
    p += kReservedBytes;
    std::memcpy(f.version.data(), p, kVersionBytes);
    return f;
}

}  // namespace rhylab
